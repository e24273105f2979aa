import pytest
from pydantic import ValidationError

from app.core.config import Settings, get_settings, parse_caps


def test_defaults(settings):
    assert settings.DEFAULT_SEED == 1
    assert settings.MAX_EVENTS == 1_000_000
    assert settings.RATE_CONVENTION == "per_choice"
    assert settings.CONFIG_MATRIX_CAP == 65536


def test_caps_as_list():
    assert parse_caps("sort=4, matmul=2") == {"SORT_CAP": 4, "MATMUL_CAP": 2}
    assert parse_caps("STATE_SPACE_CAP=10") == {"STATE_SPACE_CAP": 10}
    assert parse_caps("  ") == {}


def test_caps_as_json():
    assert parse_caps('{"tm": 4, "circuit_depth": 2}') == {"TM_CONFIG_CAP": 4, "CIRCUIT_DEPTH_CAP": 2}


@pytest.mark.parametrize("raw, message", [
    ("speed=3", "unknown cap"),
    ("max_events=3", "unknown cap"),
    ("sort=0", "must be positive"),
    ("sort", "not name=value"),
])
def test_cap_errors(raw, message):
    with pytest.raises(ValueError, match=message):
        parse_caps(raw)


def test_caps_from_environment(fresh_settings):
    fresh_settings.setenv("NUBOT_CAPS", "counter=2,walker_steps=50")
    settings = get_settings()
    assert settings.COUNTER_WIDTH_CAP == 2
    assert settings.WALKER_STEP_CAP == 50
    assert settings.SORT_CAP == 8


def test_worker_count():
    assert Settings(WORKERS=3).worker_count() == 3
    assert Settings(WORKERS=0).worker_count() >= 1


def test_rate_convention_is_checked(fresh_settings):
    fresh_settings.setenv("RATE_CONVENTION", "per_event")
    with pytest.raises(ValidationError):
        get_settings()
    assert Settings(RATE_CONVENTION="per_rule").RATE_CONVENTION == "per_rule"
