"""Masking: the longer of two touching parallel lines learns their difference.

The shorter line lies directly on top of the longer one, left ends aligned,
and is tied to it by one rigid bond at the left end. Each bottom monomer looks
straight up: a monomer above makes it covered, an empty position above makes
it uncovered. Every bottom monomer decides on its own, so the whole line
finishes after one exponential wait per monomer.
"""
from typing import Optional

from app.constructions.common import bare_line, finish, require, row_at
from app.models.enums import BondType, Direction
from app.models.grid import BoundingRect, GridPoint
from app.models.models import EMPTY, Configuration, ConstructionSpec, Rule

BOTTOM = "mask_b"
TOP = "mask_t"
COVERED = "mask_c"
UNCOVERED = "mask_u"


def masking_rules(
    bottom: str = BOTTOM,
    top: str = TOP,
    covered: str = COVERED,
    uncovered: str = UNCOVERED,
) -> list[Rule]:
    up = Direction.PLUS_Y
    return [
        Rule(bottom, top, BondType.NULL, up, covered, top, BondType.NULL, up,
             comment="mask: monomer above, covered"),
        Rule(bottom, top, BondType.RIGID, up, covered, top, BondType.RIGID, up,
             comment="mask: tied left end, covered"),
        Rule(bottom, EMPTY, BondType.NULL, up, uncovered, EMPTY, BondType.NULL, up,
             comment="mask: nothing above, uncovered"),
    ]


def masking_input(longer: int, shorter: int) -> Configuration:
    config = Configuration.line([BOTTOM] * longer)
    config.add_line([TOP] * shorter, GridPoint(0, 1))
    config.set_bond(GridPoint(0, 0), GridPoint(0, 1), BondType.RIGID)
    return config


def masked_difference(config: Configuration) -> Optional[int]:
    """Uncovered monomer count once the bottom line is fully decided and shaped as expected."""
    if not config.monomers:
        return None
    y = min(p.y for p in config.monomers)
    bottom = Configuration.from_parts(row_at(config, y).items())
    for (p, q), bond in config.bonds.items():
        if p.y == y and q.y == y:
            bottom.set_bond(p, q, bond)
    states = bare_line(bottom)
    if not states:
        return None
    covered = states.count(COVERED)
    uncovered = states.count(UNCOVERED)
    if covered + uncovered != len(states) or states != [COVERED] * covered + [UNCOVERED] * uncovered:
        return None
    if set(config.monomers.values()) - {COVERED, UNCOVERED, TOP}:
        return None
    return uncovered


def gen_masking(longer: int, shorter: int) -> ConstructionSpec:
    require(longer > shorter >= 1, "masking needs two lines with longer > shorter >= 1",
            longer=longer, shorter=shorter)
    difference = longer - shorter
    return finish(ConstructionSpec(
        name="masking",
        rules=masking_rules(),
        initial=masking_input(longer, shorter),
        target=lambda c: masked_difference(c) == difference,
        params={"longer": longer, "shorter": shorter},
        time_exponent=1.0,
        space_bound=BoundingRect(longer, 2),
        target_description=f"{shorter} covered then {difference} uncovered monomers on the longer line",
        decode=masked_difference,
    ))
