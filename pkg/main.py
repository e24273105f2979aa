from app.cli import cli
from app.core.config import get_settings
from app.core.logging import logger


settings = get_settings()


def main() -> None:
    logger.debug(f"{settings.PROJECT_NAME} {settings.VERSION}")
    cli(prog_name="nubot")


if __name__ == "__main__":
    main()
