import enum


class Direction(str, enum.Enum):
    PLUS_X = "+x"
    MINUS_X = "-x"
    PLUS_Y = "+y"
    MINUS_Y = "-y"
    PLUS_W = "+w"
    MINUS_W = "-w"

    @property
    def vector(self) -> tuple[int, int]:
        return _VECTORS[self]

    @property
    def opposite(self) -> "Direction":
        return _OPPOSITES[self]

    def __neg__(self) -> "Direction":
        return _OPPOSITES[self]

    @classmethod
    def from_vector(cls, dx: int, dy: int) -> "Direction":
        try:
            return _BY_VECTOR[(dx, dy)]
        except KeyError:
            raise ValueError(f"({dx}, {dy}) is not a unit direction") from None


_VECTORS = {
    Direction.PLUS_X: (1, 0),
    Direction.MINUS_X: (-1, 0),
    Direction.PLUS_Y: (0, 1),
    Direction.MINUS_Y: (0, -1),
    Direction.PLUS_W: (-1, 1),
    Direction.MINUS_W: (1, -1),
}
_BY_VECTOR = {v: d for d, v in _VECTORS.items()}
_OPPOSITES = {d: _BY_VECTOR[(-v[0], -v[1])] for d, v in _VECTORS.items()}

# Canonical order used wherever directions are enumerated
DIRECTIONS = tuple(Direction)


class BondType(str, enum.Enum):
    RIGID = "rigid"
    FLEXIBLE = "flexible"
    NULL = "null"


class ArmChoice(str, enum.Enum):
    FIRST = "s1"
    SECOND = "s2"


class StopReason(str, enum.Enum):
    HALTED = "halted"
    TARGET = "target"
    BUDGET = "budget"


class RateConvention(str, enum.Enum):
    PER_CHOICE = "per_choice"
    PER_RULE = "per_rule"


class TimeScale(str, enum.Enum):
    # expected time grows like (log n) ** exponent, or like n ** exponent
    POLYLOG = "polylog"
    POLYNOMIAL = "polynomial"


class RenderFormat(str, enum.Enum):
    ASCII = "ascii"
    SVG = "svg"


class GateType(str, enum.Enum):
    INPUT = "input"
    CONST0 = "const0"
    CONST1 = "const1"
    OR = "or"
    AND = "and"
    NOT = "not"
