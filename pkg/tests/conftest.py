import numpy as np
import pytest
from click.testing import CliRunner

from app.core.config import get_settings
from app.core.logging import configure_logging
from app.models.enums import BondType, Direction
from app.models.grid import GridPoint
from app.models.models import EMPTY, Configuration, Rule


@pytest.fixture(autouse=True, scope="session")
def quiet_logging():
    configure_logging("WARNING", log_file=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def settings():
    return get_settings()


@pytest.fixture
def fresh_settings(monkeypatch):
    """Settings rebuilt from the environment; the cache is restored afterwards."""
    get_settings.cache_clear()
    yield monkeypatch
    get_settings.cache_clear()


@pytest.fixture
def runner():
    yield CliRunner()
    # the CLI points the console sink at the runner's stream; point it back
    configure_logging("WARNING", log_file=False)


@pytest.fixture
def pair():
    """Two rigidly bonded monomers a-b along +x."""
    return Configuration.line(["a", "b"])


@pytest.fixture
def appear_rule():
    return Rule("a", EMPTY, BondType.NULL, Direction.PLUS_X, "a", "c", BondType.RIGID, Direction.PLUS_X)


@pytest.fixture
def origin():
    return GridPoint(0, 0)
