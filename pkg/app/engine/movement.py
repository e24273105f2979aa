"""Movable-set computation for movement rules.

A movement translates the arm's movable set M by v. M is the least set that
contains the arm, is closed under rigid bonds, keeps flexible partners outside
M adjacent after the move, and owns every monomer in its v-boundary. The A-B
bond being rewritten is ignored. If the closure reaches the base the move is
blocked and the empty set is returned.
"""
from itertools import combinations

from app.core.errors import NotAdjacent, NotOccupied
from app.models.enums import BondType, Direction
from app.models.grid import GridPoint
from app.models.models import Configuration


def _check_pair(config: Configuration, arm: GridPoint, base: GridPoint) -> None:
    if arm not in config.monomers:
        raise NotOccupied(f"arm position {arm} is empty")
    if base not in config.monomers:
        raise NotOccupied(f"base position {base} is empty")
    if not arm.is_neighbor(base):
        raise NotAdjacent(f"{arm} and {base} are not neighbours")


def movable_set(config: Configuration, arm: GridPoint, base: GridPoint, v: Direction) -> frozenset:
    _check_pair(config, arm, base)
    monomers = config.monomers
    moved = {arm}
    worklist = [arm]
    while worklist:
        m = worklist.pop()
        target = m + v
        forced = []
        if target in monomers:
            forced.append(target)
        for n, bond in config.bonded(m).items():
            if (m == arm and n == base) or (m == base and n == arm):
                continue
            if bond == BondType.RIGID:
                forced.append(n)
            elif n not in moved and not target.is_neighbor(n):
                forced.append(n)
        for n in forced:
            if n in moved:
                continue
            if n == base:
                return frozenset()
            moved.add(n)
            worklist.append(n)
    return frozenset(moved)


def is_valid_movable(
    config: Configuration, candidate: set, arm: GridPoint, base: GridPoint, v: Direction
) -> bool:
    """Check the three movable-set clauses for one candidate subset directly."""
    if arm not in candidate or base in candidate:
        return False
    for m in candidate:
        target = m + v
        if target in config.monomers and target not in candidate:
            return False
        for n, bond in config.bonded(m).items():
            if {m, n} == {arm, base} or n in candidate:
                continue
            if bond == BondType.RIGID:
                return False
            if bond == BondType.FLEXIBLE and not target.is_neighbor(n):
                return False
    return True


def brute_force_movable_set(
    config: Configuration, arm: GridPoint, base: GridPoint, v: Direction
) -> frozenset:
    """Smallest valid subset by exhaustive search; reference for `movable_set`."""
    _check_pair(config, arm, base)
    others = sorted(p for p in config.monomers if p not in (arm, base))
    for size in range(len(others) + 1):
        for extra in combinations(others, size):
            candidate = {arm, *extra}
            if is_valid_movable(config, candidate, arm, base, v):
                return frozenset(candidate)
    return frozenset()
