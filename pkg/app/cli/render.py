"""`nubot render`: draw a configuration file as ASCII or SVG."""
from pathlib import Path

import click

from app.cli.common import CliContext, pass_cli, read_text, write_text
from app.formats.render import render_snapshot
from app.formats.ruledsl import parse_config
from app.models.enums import RenderFormat

SUFFIX = {RenderFormat.ASCII: "txt", RenderFormat.SVG: "svg"}


@click.command("render")
@click.argument("config")
@click.option("--print/--no-print", "echo", default=True, help="Echo ASCII snapshots to stdout.")
@pass_cli
def render_command(ctx: CliContext, config, echo):
    """Render CONFIG (.nbc) in the global --format."""
    snapshot = render_snapshot(parse_config(read_text(config)), ctx.format)
    path = write_text(ctx, f"{Path(config).stem}.{SUFFIX[ctx.format]}", snapshot)
    if echo and ctx.format == RenderFormat.ASCII:
        click.echo(snapshot, nl=False)
    click.echo(f"snapshot: {path}")
