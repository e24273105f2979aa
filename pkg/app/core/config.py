import json
import os
from functools import lru_cache

from pydantic import field_validator
from pydantic_settings import BaseSettings


# Short names accepted in NUBOT_CAPS, mapped to the Settings fields they override
CAP_ALIASES = {
    "state_space": "STATE_SPACE_CAP",
    "config_matrix": "CONFIG_MATRIX_CAP",
    "counter": "COUNTER_WIDTH_CAP",
    "sort": "SORT_CAP",
    "matmul": "MATMUL_CAP",
    "tm": "TM_CONFIG_CAP",
    "circuit_depth": "CIRCUIT_DEPTH_CAP",
    "circuit_width": "CIRCUIT_WIDTH_CAP",
    "circuit_inputs": "CIRCUIT_INPUT_CAP",
    "tm_steps": "TM_STEP_CAP",
    "walker_steps": "WALKER_STEP_CAP",
}


class Settings(BaseSettings):
    PROJECT_NAME: str = "Nubot Assembly Simulator"
    VERSION: str = "1.0.0"
    FORMAT_VERSION: int = 1

    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"
    LOG_DIR: str = "logs"

    DEFAULT_SEED: int = 1
    MAX_EVENTS: int = 1_000_000
    # "per_choice": every unblocked arm choice is its own rate-1 event.
    # "per_rule": one rate-1 event per located movement rule, arm drawn on apply.
    RATE_CONVENTION: str = "per_choice"

    STATE_SPACE_CAP: int = 100_000
    CONFIG_MATRIX_CAP: int = 2 ** 16
    COUNTER_WIDTH_CAP: int = 6
    SORT_CAP: int = 8
    MATMUL_CAP: int = 3
    TM_CONFIG_CAP: int = 8
    CIRCUIT_DEPTH_CAP: int = 3
    CIRCUIT_WIDTH_CAP: int = 4
    CIRCUIT_INPUT_CAP: int = 4
    TM_STEP_CAP: int = 100_000
    WALKER_STEP_CAP: int = 5_000_000

    WORKERS: int = 0

    class Config:
        env_file = ".env"

    @field_validator("RATE_CONVENTION")
    @classmethod
    def validate_rate_convention(cls, v):
        if v not in ("per_choice", "per_rule"):
            raise ValueError("RATE_CONVENTION must be 'per_choice' or 'per_rule'")
        return v

    def worker_count(self) -> int:
        """Workers for trial fan-out; 0 means available parallelism."""
        return self.WORKERS if self.WORKERS > 0 else (os.cpu_count() or 1)


def parse_caps(raw: str) -> dict[str, int]:
    """Parse NUBOT_CAPS: a JSON object or a comma-separated name=value list."""
    raw = raw.strip()
    if not raw:
        return {}
    if raw.startswith("{"):
        items = json.loads(raw).items()
    else:
        items = []
        for part in raw.split(","):
            if not part.strip():
                continue
            name, sep, value = part.partition("=")
            if not sep:
                raise ValueError(f"NUBOT_CAPS entry '{part}' is not name=value")
            items.append((name.strip(), value.strip()))

    overrides = {}
    for name, value in items:
        field = CAP_ALIASES.get(name.lower(), name.upper())
        if field not in Settings.model_fields or not field.endswith("_CAP"):
            raise ValueError(f"NUBOT_CAPS names unknown cap '{name}'")
        number = int(value)
        if number <= 0:
            raise ValueError(f"NUBOT_CAPS cap '{name}' must be positive, got {number}")
        overrides[field] = number
    return overrides


@lru_cache()
def get_settings() -> Settings:
    settings = Settings()
    overrides = parse_caps(os.environ.get("NUBOT_CAPS", ""))
    if overrides:
        settings = settings.model_copy(update=overrides)
    return settings
