"""Triangular grid geometry.

Points use axial coordinates (x, y); the third axis is w = -x + y, so the six
neighbours of a point are reached by the unit vectors of `Direction`.
"""
from collections import deque
from typing import Iterable, NamedTuple, Union

from app.models.enums import DIRECTIONS, Direction


class GridPoint(NamedTuple):
    x: int
    y: int

    def __add__(self, other: Union["GridPoint", Direction]) -> "GridPoint":
        if isinstance(other, Direction):
            dx, dy = other.vector
            return GridPoint(self.x + dx, self.y + dy)
        return GridPoint(self.x + other[0], self.y + other[1])

    def __sub__(self, other: Union["GridPoint", Direction]) -> "GridPoint":
        if isinstance(other, Direction):
            dx, dy = other.vector
            return GridPoint(self.x - dx, self.y - dy)
        return GridPoint(self.x - other[0], self.y - other[1])

    def __neg__(self) -> "GridPoint":
        return GridPoint(-self.x, -self.y)

    def __str__(self) -> str:
        return f"({self.x},{self.y})"

    def is_neighbor(self, other: "GridPoint") -> bool:
        return (other.x - self.x, other.y - self.y) in _UNIT_VECTORS

    def direction_to(self, other: "GridPoint") -> Direction:
        return Direction.from_vector(other.x - self.x, other.y - self.y)


ORIGIN = GridPoint(0, 0)
_UNIT_VECTORS = frozenset(d.vector for d in DIRECTIONS)


class BoundingRect(NamedTuple):
    width: int
    height: int

    @property
    def area(self) -> int:
        return self.width * self.height

    def fits_within(self, other: "BoundingRect") -> bool:
        return self.width <= other.width and self.height <= other.height

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"


def neighbors(p: GridPoint) -> set[GridPoint]:
    return {p + d for d in DIRECTIONS}


def tri_distance(a: GridPoint, b: GridPoint) -> int:
    """Shortest path length between two points using unit steps."""
    dx = b.x - a.x
    dy = b.y - a.y
    if (dx < 0 < dy) or (dy < 0 < dx):
        return max(abs(dx), abs(dy))
    return abs(dx) + abs(dy)


def direction_distance(u: Direction, v: Direction) -> int:
    return tri_distance(GridPoint(*u.vector), GridPoint(*v.vector))


def bfs_distance(a: GridPoint, b: GridPoint, limit: int = 64) -> int:
    """Breadth-first reference for `tri_distance`; raises if b is beyond `limit` steps."""
    if a == b:
        return 0
    seen = {a}
    frontier = deque([(a, 0)])
    while frontier:
        p, dist = frontier.popleft()
        if dist >= limit:
            break
        for q in neighbors(p):
            if q == b:
                return dist + 1
            if q not in seen:
                seen.add(q)
                frontier.append((q, dist + 1))
    raise ValueError(f"{b} is further than {limit} steps from {a}")


def movement_targets(u: Direction) -> set[Direction]:
    """The two directions at unit distance from u (the legal u' of a movement rule)."""
    return {v for v in DIRECTIONS if direction_distance(u, v) == 1}


def translate(points: Iterable[GridPoint], v: Union[Direction, GridPoint]) -> set[GridPoint]:
    return {p + v for p in points}


def bounding_rect(config_or_points) -> BoundingRect:
    """Minimal axis-aligned l x w rectangle holding every monomer (0x0 when empty)."""
    points = getattr(config_or_points, "monomers", config_or_points)
    xs = [p[0] for p in points]
    if not xs:
        return BoundingRect(0, 0)
    ys = [p[1] for p in points]
    return BoundingRect(max(xs) - min(xs) + 1, max(ys) - min(ys) + 1)


def normalize(points: Iterable[GridPoint]) -> tuple[GridPoint, ...]:
    """Translate so the lexicographically minimal point is the origin; sorted."""
    ordered = sorted(points)
    if not ordered:
        return ()
    base = ordered[0]
    return tuple(GridPoint(p.x - base.x, p.y - base.y) for p in ordered)
