import click

from app.cli.common import EXIT_IO, default_context, handle_errors
from app.core.config import get_settings
from app.core.logging import configure_logging, logger
from app.models.enums import RenderFormat

settings = get_settings()


class NubotGroup(click.Group):
    """Command group with one top-level error handler for every subcommand."""

    def invoke(self, ctx: click.Context):
        try:
            rv = super().invoke(ctx)
        except click.FileError as exc:
            exc.show()
            ctx.exit(EXIT_IO)
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except Exception:
            debug = ctx.obj.debug if ctx.obj is not None else settings.DEBUG
            ctx.exit(handle_errors(debug))
        if isinstance(rv, int) and rv:
            ctx.exit(rv)
        return rv


@click.group(cls=NubotGroup)
@click.version_option(settings.VERSION, prog_name=settings.PROJECT_NAME)
@click.option("--seed", type=int, default=None, help="Seed for the run; trials derive their own from it.")
@click.option("--max-events", type=click.IntRange(min=1), default=None, help="Event budget per run.")
@click.option("--out", type=click.Path(file_okay=False), default=".", show_default=True, help="Output directory.")
@click.option(
    "--format", "fmt", type=click.Choice([f.value for f in RenderFormat]),
    default=RenderFormat.ASCII.value, show_default=True, help="Snapshot format.",
)
@click.option("--workers", type=int, default=None, help="Worker processes (default: available parallelism).")
@click.option("--log-level", default=None, help="Console log level.")
@click.option("--no-log-file", is_flag=True, help="Do not write the daily log file.")
@click.pass_context
def cli(ctx: click.Context, seed, max_events, out, fmt, workers, log_level, no_log_file):
    """Simulate the nubot model and generate, run and verify constructions."""
    configure_logging(log_level, log_file=not no_log_file)
    ctx.obj = default_context(seed, max_events, out, fmt, workers)
    logger.debug(f"CLI context: {ctx.obj}")


from app.cli import gen, render, run, stats, verify  # noqa: E402

cli.add_command(run.run_command)
cli.add_command(gen.gen_group)
cli.add_command(stats.stats_command)
cli.add_command(verify.verify_command)
cli.add_command(render.render_command)
