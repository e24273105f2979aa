import hashlib
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Optional

from app.core.errors import BondNotAdjacent, BondToVacancy, DuplicateMonomer, NotOccupied
from app.models.enums import ArmChoice, BondType, Direction, StopReason, TimeScale
from app.models.grid import BoundingRect, GridPoint, bounding_rect

EMPTY = "empty"

BondKey = tuple[GridPoint, GridPoint]


def bond_key(p: GridPoint, q: GridPoint) -> BondKey:
    return (p, q) if p < q else (q, p)


class Configuration:
    """Monomers on grid points plus the non-null bonds between neighbours."""

    __slots__ = ("monomers", "_bonds")

    def __init__(self):
        self.monomers: dict[GridPoint, str] = {}
        self._bonds: dict[GridPoint, dict[GridPoint, BondType]] = {}

    # ----- construction -----

    @classmethod
    def from_parts(
        cls,
        monomers: Iterable[tuple[GridPoint, str]],
        bonds: Iterable[tuple[GridPoint, GridPoint, BondType]] = (),
    ) -> "Configuration":
        config = cls()
        for p, state in monomers:
            config.add_monomer(GridPoint(*p), state)
        for p, q, bond in bonds:
            config.set_bond(GridPoint(*p), GridPoint(*q), bond)
        return config

    @classmethod
    def line(
        cls,
        states: Iterable[str],
        start: GridPoint = GridPoint(0, 0),
        direction: Direction = Direction.PLUS_X,
        bond: BondType = BondType.RIGID,
    ) -> "Configuration":
        config = cls()
        config.add_line(states, start, direction, bond)
        return config

    def add_line(
        self,
        states: Iterable[str],
        start: GridPoint,
        direction: Direction = Direction.PLUS_X,
        bond: BondType = BondType.RIGID,
    ) -> list[GridPoint]:
        points = []
        p = start
        for state in states:
            self.add_monomer(p, state)
            if points and bond != BondType.NULL:
                self.set_bond(points[-1], p, bond)
            points.append(p)
            p = p + direction
        return points

    # ----- monomers -----

    def add_monomer(self, p: GridPoint, state: str) -> None:
        if p in self.monomers:
            raise DuplicateMonomer(f"position {p} is already occupied", details={"position": list(p)})
        if state == EMPTY:
            raise ValueError("the empty state cannot be placed in a configuration")
        self.monomers[p] = state

    def remove_monomer(self, p: GridPoint) -> str:
        if p not in self.monomers:
            raise NotOccupied(f"no monomer at {p}")
        for q in self._bonds.pop(p, {}):
            partners = self._bonds[q]
            del partners[p]
            if not partners:
                del self._bonds[q]
        return self.monomers.pop(p)

    def state_at(self, p: GridPoint) -> Optional[str]:
        return self.monomers.get(p)

    def set_state(self, p: GridPoint, state: str) -> None:
        if p not in self.monomers:
            raise NotOccupied(f"no monomer at {p}")
        self.monomers[p] = state

    def states(self) -> set[str]:
        return set(self.monomers.values())

    def __len__(self) -> int:
        return len(self.monomers)

    def __contains__(self, p) -> bool:
        return p in self.monomers

    # ----- bonds -----

    def bond_between(self, p: GridPoint, q: GridPoint) -> BondType:
        return self._bonds.get(p, {}).get(q, BondType.NULL)

    def set_bond(self, p: GridPoint, q: GridPoint, bond: BondType) -> None:
        if bond == BondType.NULL:
            self._drop_bond(p, q)
            return
        if p not in self.monomers or q not in self.monomers:
            raise BondToVacancy(f"bond {p}-{q} touches an empty position")
        if not p.is_neighbor(q):
            raise BondNotAdjacent(f"bond {p}-{q} joins points that are not neighbours")
        self._bonds.setdefault(p, {})[q] = bond
        self._bonds.setdefault(q, {})[p] = bond

    def _drop_bond(self, p: GridPoint, q: GridPoint) -> None:
        for a, b in ((p, q), (q, p)):
            partners = self._bonds.get(a)
            if partners and b in partners:
                del partners[b]
                if not partners:
                    del self._bonds[a]

    def bonded(self, p: GridPoint) -> dict[GridPoint, BondType]:
        return self._bonds.get(p, {})

    @property
    def bonds(self) -> dict[BondKey, BondType]:
        return {
            bond_key(p, q): b
            for p, partners in self._bonds.items()
            for q, b in partners.items()
            if p < q
        }

    # ----- movement -----

    def move(self, points: set[GridPoint], v: Direction) -> None:
        """Translate a monomer subset by v; bonds travel with their endpoints."""
        moved_states = {p: self.monomers.pop(p) for p in points}
        old_bonds = {p: self._bonds.pop(p, {}) for p in points}
        for p, partners in old_bonds.items():
            for q in partners:
                if q not in points:
                    self._bonds[q].pop(p, None)
                    if not self._bonds[q]:
                        del self._bonds[q]
        for p, state in moved_states.items():
            target = p + v
            if target in self.monomers:
                raise DuplicateMonomer(f"movement collides at {target}")
            self.monomers[target] = state
        for p, partners in old_bonds.items():
            for q, b in partners.items():
                q_new = q + v if q in points else q
                self._bonds.setdefault(p + v, {})[q_new] = b
                self._bonds.setdefault(q_new, {})[p + v] = b

    # ----- comparison -----

    def copy(self) -> "Configuration":
        clone = Configuration()
        clone.monomers = dict(self.monomers)
        clone._bonds = {p: dict(partners) for p, partners in self._bonds.items()}
        return clone

    def canonical(self) -> tuple:
        """Translation normal form: sorted monomers and bonds relative to the minimal point."""
        if not self.monomers:
            return ((), ())
        base = min(self.monomers)

        def rel(p: GridPoint) -> tuple[int, int]:
            return (p.x - base.x, p.y - base.y)

        monomers = tuple(sorted((rel(p), s) for p, s in self.monomers.items()))
        bonds = tuple(sorted((rel(a), rel(b), t.value) for (a, b), t in self.bonds.items()))
        return (monomers, bonds)

    def digest(self) -> str:
        """Stable 64-bit hex digest of the translation normal form."""
        monomers, bonds = self.canonical()
        h = hashlib.blake2b(digest_size=8)
        for (x, y), s in monomers:
            h.update(f"m{x},{y},{s};".encode())
        for (ax, ay), (bx, by), t in bonds:
            h.update(f"b{ax},{ay},{bx},{by},{t};".encode())
        return h.hexdigest()

    def equivalent(self, other: "Configuration") -> bool:
        return self.canonical() == other.canonical()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.monomers == other.monomers and self.bonds == other.bonds

    def __repr__(self) -> str:
        return f"Configuration({len(self.monomers)} monomers, {len(self.bonds)} bonds)"

    def bounding_rect(self) -> BoundingRect:
        return bounding_rect(self.monomers)

    def check_invariants(self) -> None:
        for p, partners in self._bonds.items():
            for q, b in partners.items():
                if p not in self.monomers or q not in self.monomers:
                    raise BondToVacancy(f"bond {p}-{q} touches an empty position")
                if not p.is_neighbor(q):
                    raise BondNotAdjacent(f"bond {p}-{q} joins points that are not neighbours")
                if self._bonds[q].get(p) != b:
                    raise ValueError(f"bond {p}-{q} is recorded asymmetrically")

    # ----- reading lines back -----

    def walk(self, start: GridPoint, direction: Direction = Direction.PLUS_X) -> Iterator[tuple[GridPoint, str]]:
        p = start
        while p in self.monomers:
            yield p, self.monomers[p]
            p = p + direction

    def row_states(self, y: Optional[int] = None) -> list[str]:
        """States of the row at height y (default: lowest row), left to right."""
        if not self.monomers:
            return []
        if y is None:
            y = min(p.y for p in self.monomers)
        return [s for p, s in sorted(self.monomers.items()) if p.y == y]


@dataclass(frozen=True, slots=True)
class Rule:
    """(s1, s2, b, u) -> (s1', s2', b', u'); s2 sits at p(s1) + u."""
    s1: str
    s2: str
    bond: BondType
    u: Direction
    s1p: str
    s2p: str
    bondp: BondType
    up: Direction
    comment: str = field(default="", compare=False)

    @property
    def is_movement(self) -> bool:
        return self.u != self.up

    @property
    def lhs(self) -> tuple[str, str, BondType, Direction]:
        return (self.s1, self.s2, self.bond, self.u)

    @property
    def rhs(self) -> tuple[str, str, BondType, Direction]:
        return (self.s1p, self.s2p, self.bondp, self.up)

    def movement_vector(self) -> GridPoint:
        """v = u' - u, the translation applied when s2 is the arm."""
        (ux, uy), (vx, vy) = self.u.vector, self.up.vector
        return GridPoint(vx - ux, vy - uy)

    def states(self) -> set[str]:
        return {self.s1, self.s2, self.s1p, self.s2p} - {EMPTY}

    def __str__(self) -> str:
        return (
            f"{self.s1}, {self.s2}, {self.bond.value}, {self.u.value} -> "
            f"{self.s1p}, {self.s2p}, {self.bondp.value}, {self.up.value}"
        )


@dataclass(frozen=True, slots=True)
class Event:
    rule_id: int
    anchor: GridPoint
    u: Direction
    arm: Optional[ArmChoice] = None
    v: Optional[Direction] = None
    movable: frozenset = frozenset()

    def sort_key(self) -> tuple:
        return (self.rule_id, self.anchor, self.arm.value if self.arm else "")


@dataclass(slots=True)
class TrajectoryStep:
    index: int
    time: float
    event: Event
    digest: str


@dataclass
class Trajectory:
    seed: int
    steps: list[TrajectoryStep] = field(default_factory=list)
    terminal: Optional[Configuration] = None
    stop_reason: StopReason = StopReason.HALTED
    total_time: float = 0.0
    event_count: int = 0
    max_rect: BoundingRect = BoundingRect(0, 0)

    def __len__(self) -> int:
        return self.event_count


@dataclass
class ConstructionSpec:
    name: str
    rules: list[Rule]
    initial: Configuration
    target: Callable[[Configuration], bool]
    params: dict[str, Any] = field(default_factory=dict)
    time_exponent: Optional[float] = None
    time_scale: TimeScale = TimeScale.POLYLOG
    space_bound: Optional[BoundingRect] = None
    target_description: str = ""
    decode: Optional[Callable[[Configuration], Any]] = None
    # compiled walker the rules came from, for direct interpretation
    program: Any = None

    def state_count(self) -> int:
        states: set[str] = set(self.initial.states())
        for rule in self.rules:
            states |= rule.states()
        return len(states)
