"""Shared plumbing for the subcommands: global options, file IO and error rendering."""
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import click
import numpy as np
import yaml

from app.core.config import get_settings
from app.core.errors import NubotError
from app.core.logging import logger
from app.models.enums import RenderFormat
from app.schemas.schemas import ErrorResponse

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_USAGE = 2
EXIT_IO = 5


class FileAccessError(NubotError):
    code = "IO_ERROR"
    exit_code = EXIT_IO


@dataclass
class CliContext:
    seed: int
    max_events: int
    out: Path
    format: RenderFormat = RenderFormat.ASCII
    workers: int = 1
    debug: bool = False
    written: list[Path] = field(default_factory=list)


pass_cli = click.make_pass_decorator(CliContext)


def read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileAccessError(f"cannot read {path}: {exc.strerror or exc}", details={"path": str(path)}) from None


def write_text(ctx: CliContext, name: str, text: str) -> Path:
    """Write one artifact under the output directory and remember it."""
    path = ctx.out / name
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise FileAccessError(f"cannot write {path}: {exc.strerror or exc}", details={"path": str(path)}) from None
    ctx.written.append(path)
    logger.debug(f"Wrote {path}")
    return path


def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return str(value)


def plain(value: Any) -> Any:
    """Tuples, numpy values and arbitrary objects reduced to JSON/YAML-safe data."""
    return json.loads(json.dumps(value, default=_plain))


def dump_yaml(model) -> str:
    return yaml.safe_dump(plain(model.model_dump(mode="json")), sort_keys=False)


def render_error(exc: NubotError, debug: bool = False) -> str:
    return ErrorResponse(**plain(exc.to_dict(debug=debug))).model_dump_json()


def handle_errors(debug: bool = False) -> int:
    """Exit status for the exception being handled; prints the error record to stderr."""
    exc = sys.exc_info()[1]
    if isinstance(exc, NubotError):
        logger.error(f"{exc.code}: {exc.message}")
        click.echo(render_error(exc, debug), err=True)
        return exc.exit_code
    logger.exception(f"Unhandled error: {exc}")
    payload = ErrorResponse(error={"code": "INTERNAL_ERROR", "message": "unexpected failure", "details": str(exc) if debug else None})
    click.echo(payload.model_dump_json(), err=True)
    return EXIT_OTHER


def default_context(
    seed: Optional[int] = None,
    max_events: Optional[int] = None,
    out: str | Path = ".",
    fmt: str = RenderFormat.ASCII.value,
    workers: Optional[int] = None,
) -> CliContext:
    settings = get_settings()
    return CliContext(
        seed=settings.DEFAULT_SEED if seed is None else seed,
        max_events=settings.MAX_EVENTS if max_events is None else max_events,
        out=Path(out),
        format=RenderFormat(fmt),
        workers=settings.worker_count() if workers is None else max(1, workers),
        debug=settings.DEBUG,
    )
