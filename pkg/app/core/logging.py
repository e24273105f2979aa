import sys
from pathlib import Path

from loguru import logger

from app.core.config import get_settings

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}"

_settings = get_settings()

logger.remove()
logger.add(sys.stderr, format=CONSOLE_FORMAT, level=_settings.LOG_LEVEL)


def configure_logging(level: str | None = None, log_file: bool = True) -> None:
    """Reset sinks: console at `level`, plus the rotating daily file sink."""
    logger.remove()
    logger.add(sys.stderr, format=CONSOLE_FORMAT, level=level or _settings.LOG_LEVEL)
    if log_file:
        Path(_settings.LOG_DIR).mkdir(parents=True, exist_ok=True)
        logger.add(
            f"{_settings.LOG_DIR}/nubot_{{time:YYYY-MM-DD}}.log",
            rotation="1 day",
            retention="30 days",
            format=FILE_FORMAT,
            level="DEBUG",
        )
