"""`nubot stats`: expected completion time of a construction over seeded trials."""
import math
from pathlib import Path

import click
import yaml
from pydantic import ValidationError

from app.cli.common import CliContext, pass_cli, read_text, write_text
from app.cli.gen import build_from_text
from app.constructions.doubling import expected_doubling_time, harmonic_estimate
from app.core.config import get_settings
from app.core.errors import ParseError
from app.core.logging import logger
from app.engine.analysis import estimate_expected_time
from app.models.enums import RateConvention
from app.schemas.schemas import ConstructionManifest, RectSchema, StatsReport


def _split_param(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise click.BadParameter(f"'{text}' is not key=value", param_hint="--param")
    return key.strip(), value.strip()


def load_construction_manifest(path: str) -> ConstructionManifest:
    try:
        return ConstructionManifest.model_validate(yaml.safe_load(read_text(path)) or {})
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {getattr(exc, 'problem', exc)}") from None
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ParseError(f"invalid construction manifest: {'.'.join(map(str, first['loc']))}: {first['msg']}") from None


def reference_lines(construction: str, params: dict, convention: RateConvention) -> list[str]:
    """Closed-form expectations printed beside the estimate, where they exist."""
    if construction == "pds":
        return [f"exact chain mean: {expected_doubling_time(2, convention):.4f}"]
    if construction == "line-doubling":
        length = int(params["length"])
        return [
            f"exact mean of the slowest pair: {expected_doubling_time(length, convention):.4f}",
            f"13 * H(l/2) upper bound: {harmonic_estimate(length):.4f}",
        ]
    return []


@click.command("stats")
@click.argument("source")
@click.option("-p", "--param", "params", multiple=True, help="Generator parameter as key=value (with a construction name).")
@click.option("--trials", type=click.IntRange(min=1), default=100, show_default=True)
@click.option(
    "--convention", type=click.Choice([c.value for c in RateConvention]), default=None,
    help="Event-rate convention (default from settings).",
)
@pass_cli
def stats_command(ctx: CliContext, source, params, trials, convention):
    """Estimate the expected time of SOURCE: a manifest written by `gen`, or a construction name."""
    if Path(source).suffix in (".yaml", ".yml"):
        if params:
            raise click.UsageError("--param applies to a construction name, not a manifest")
        manifest = load_construction_manifest(source)
        construction, raw = manifest.construction, {k: str(v) for k, v in manifest.params.items()}
    else:
        construction, raw = source, dict(_split_param(p) for p in params)

    convention = RateConvention(convention or get_settings().RATE_CONVENTION)
    spec = build_from_text(construction, raw)
    estimate = estimate_expected_time(
        spec,
        trials=trials,
        seed=ctx.seed,
        workers=ctx.workers,
        max_events=ctx.max_events,
        convention=convention,
        track_space=True,
    )
    report = StatsReport(
        construction=spec.name,
        trials=trials,
        seed=ctx.seed,
        rate_convention=convention,
        mean_time=None if math.isnan(estimate.mean) else estimate.mean,
        std_error=estimate.std_error,
        success_rate=estimate.success_rate,
        max_rect=RectSchema(width=estimate.max_rect.width, height=estimate.max_rect.height),
        state_count=spec.state_count(),
        failed_trials=estimate.failed_trials(),
    )
    path = write_text(ctx, f"{spec.name}.stats.json", report.model_dump_json(indent=2) + "\n")

    mean = "n/a" if report.mean_time is None else f"{report.mean_time:.4f}"
    click.echo(f"construction: {report.construction}")
    click.echo(f"trials: {report.trials}  seed: {report.seed}  convention: {report.rate_convention.value}")
    click.echo(f"mean time: {mean} +/- {report.std_error:.4f}")
    click.echo(f"success rate: {report.success_rate:.4f}")
    click.echo(f"max rectangle: {report.max_rect.width} x {report.max_rect.height}")
    click.echo(f"distinct states: {report.state_count}")
    for line in reference_lines(construction, raw, convention):
        click.echo(line)
    if report.failed_trials:
        shown = ", ".join(str(t) for t in report.failed_trials[:10])
        click.echo(f"failed trials: {shown}{' ...' if len(report.failed_trials) > 10 else ''}")
    click.echo(f"report: {path}")
    logger.info(f"Stats for {spec.name} written to {path}")
