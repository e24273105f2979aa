"""`nubot run`: simulate a rule set from a configuration, writing a trace and a terminal snapshot."""
from pathlib import Path
from typing import Optional

import click
import yaml
from pydantic import ValidationError

from app.cli.common import CliContext, dump_yaml, pass_cli, read_text, write_text
from app.core.config import get_settings
from app.core.errors import BudgetExhausted, ParseError
from app.core.logging import logger
from app.engine.kinetics import run
from app.formats.render import render_snapshot
from app.formats.ruledsl import parse_config, parse_ruleset
from app.formats.traces import write_trace
from app.models.enums import RateConvention, RenderFormat, StopReason
from app.schemas.schemas import RunManifest

SNAPSHOT_SUFFIX = {RenderFormat.ASCII: "txt", RenderFormat.SVG: "svg"}


def load_run_manifest(path: str) -> tuple[RunManifest, Path]:
    """The manifest and the directory its relative paths are resolved against."""
    try:
        payload = yaml.safe_load(read_text(path))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line, column = (mark.line + 1, mark.column + 1) if mark else (0, 0)
        raise ParseError(f"invalid YAML: {getattr(exc, 'problem', exc)}", line=line, column=column) from None
    try:
        return RunManifest.model_validate(payload or {}), Path(path).parent
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise ParseError(f"invalid run manifest: {where}: {first['msg']}") from None


def execute(ctx: CliContext, manifest: RunManifest, base: Path = Path("."), stem: Optional[str] = None) -> int:
    rules = parse_ruleset(read_text(base / manifest.rules))
    config = parse_config(read_text(base / manifest.config))
    stem = stem or Path(manifest.rules).stem
    logger.info(f"Running {stem}: {len(rules)} rules, {len(config)} monomers, seed {manifest.seed}")

    trajectory = run(
        config,
        rules,
        max_events=manifest.max_events,
        seed=manifest.seed,
        record=True,
        convention=manifest.rate_convention,
    )
    trace = write_trace(trajectory, len(rules), config.digest(), manifest)
    trace_path = write_text(ctx, manifest.trace_out or f"{stem}.nbt", trace)

    fmt = manifest.snapshot_format
    snapshot = render_snapshot(trajectory.terminal, fmt)
    snapshot_path = write_text(ctx, manifest.snapshot_out or f"{stem}.{SNAPSHOT_SUFFIX[fmt]}", snapshot)

    click.echo(f"stop: {trajectory.stop_reason.value}")
    click.echo(f"events: {trajectory.event_count}")
    click.echo(f"time: {trajectory.total_time:.6f}")
    click.echo(f"terminal monomers: {len(trajectory.terminal)}")
    click.echo(f"trace: {trace_path}")
    click.echo(f"snapshot: {snapshot_path}")
    if fmt == RenderFormat.ASCII:
        click.echo(snapshot, nl=False)

    if trajectory.stop_reason == StopReason.BUDGET:
        logger.warning(f"Event budget of {manifest.max_events} exhausted at t={trajectory.total_time:.4f}")
        return BudgetExhausted.exit_code
    return 0


@click.command("run")
@click.argument("rules", required=False)
@click.argument("config", required=False)
@click.option("--manifest", type=click.Path(dir_okay=False), help="Run manifest (YAML) instead of RULES CONFIG.")
@click.option(
    "--convention", type=click.Choice([c.value for c in RateConvention]), default=None,
    help="Event-rate convention (default from settings).",
)
@click.option("--save-manifest", is_flag=True, help="Also write the run manifest next to the trace.")
@pass_cli
def run_command(ctx: CliContext, rules, config, manifest, convention, save_manifest):
    """Run RULES (.nbr) from CONFIG (.nbc) until no event applies or the budget is spent."""
    if manifest:
        if rules or config:
            raise click.UsageError("give either --manifest or RULES CONFIG, not both")
        loaded, base = load_run_manifest(manifest)
        if convention:
            loaded = loaded.model_copy(update={"rate_convention": RateConvention(convention)})
        stem = Path(manifest).stem
    else:
        if not (rules and config):
            raise click.UsageError("RULES and CONFIG are required without --manifest")
        loaded = RunManifest(
            rules=rules,
            config=config,
            seed=ctx.seed,
            max_events=ctx.max_events,
            rate_convention=RateConvention(convention or get_settings().RATE_CONVENTION),
            snapshot_format=ctx.format,
        )
        base, stem = Path("."), None
    if save_manifest:
        write_text(ctx, f"{stem or Path(loaded.rules).stem}.run.yaml", dump_yaml(loaded))
    return execute(ctx, loaded, base, stem)
