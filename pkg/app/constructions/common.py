"""Helpers shared by the construction generators."""
from typing import Any, Callable, Optional, Sequence

from app.core.config import get_settings
from app.core.errors import CapExceeded, GenerationError, NubotError
from app.core.logging import logger
from app.engine.walker import Program, line_symbols
from app.models.enums import BondType, TimeScale
from app.models.grid import BoundingRect, GridPoint
from app.models.models import Configuration, ConstructionSpec


def require(condition: bool, message: str, **details) -> None:
    if not condition:
        raise GenerationError(message, details=details or None)


def check_cap(what: str, value: int, field: str) -> None:
    cap = getattr(get_settings(), field)
    if value > cap:
        raise CapExceeded(
            f"{what} {value} exceeds the cap of {cap}; raise it with NUBOT_CAPS if you have the patience",
            details={"cap": cap, "setting": field, "value": value},
        )


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def bare_line(config: Configuration) -> Optional[list[str]]:
    """States of a single rigidly bonded horizontal line, left to right; None for anything else."""
    if not config.monomers:
        return []
    points = sorted(config.monomers)
    y = points[0].y
    if any(p.y != y for p in points) or points[-1].x - points[0].x + 1 != len(points):
        return None
    for p, q in zip(points, points[1:]):
        if config.bond_between(p, q) != BondType.RIGID:
            return None
    if len(config.bonds) != len(points) - 1:
        return None
    return [config.monomers[p] for p in points]


def row_at(config: Configuration, y: int) -> dict[GridPoint, str]:
    return {p: s for p, s in config.monomers.items() if p.y == y}


def finish(spec: ConstructionSpec) -> ConstructionSpec:
    logger.info(
        f"Generated {spec.name}: {len(spec.rules)} rules, {spec.state_count()} states, "
        f"{len(spec.initial)} initial monomers"
    )
    return spec


def walker_spec(
    name: str,
    program: Program,
    initial: Configuration,
    decode: Callable[[list[str]], Any],
    expected: Any,
    params: dict,
    time_exponent: Optional[float] = None,
    time_scale: TimeScale = TimeScale.POLYNOMIAL,
    space_bound: Optional[BoundingRect] = None,
    description: str = "",
) -> ConstructionSpec:
    """Spec for a compiled walker whose result is read back from the final bare tape."""

    def decode_config(config: Configuration):
        symbols = line_symbols(program, config)
        if symbols is None:
            return None
        try:
            return decode(symbols)
        except (NubotError, ValueError):
            return None

    def target(config: Configuration) -> bool:
        return decode_config(config) == expected

    return finish(ConstructionSpec(
        name=name,
        rules=program.rules(),
        initial=initial,
        target=target,
        params=params,
        time_exponent=time_exponent,
        time_scale=time_scale,
        space_bound=space_bound,
        target_description=description,
        decode=decode_config,
        program=program,
    ))


def bits_of(value: int, width: int) -> list[int]:
    """MSB-first binary digits of value, zero-padded to width."""
    return [(value >> (width - 1 - i)) & 1 for i in range(width)]


def value_of(bits: Sequence[int]) -> int:
    out = 0
    for b in bits:
        out = out * 2 + int(b)
    return out
