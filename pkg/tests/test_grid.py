import pytest
from hypothesis import given, strategies as st

from app.models.enums import DIRECTIONS, Direction
from app.models.grid import (
    GridPoint, bfs_distance, bounding_rect, direction_distance, movement_targets, neighbors, normalize,
    translate, tri_distance,
)

coords = st.integers(min_value=-12, max_value=12)
points = st.builds(GridPoint, coords, coords)


@given(points, points)
def test_distance_matches_bfs(a, b):
    assert tri_distance(a, b) == bfs_distance(a, b)


@given(points, points, points)
def test_distance_is_a_metric(a, b, c):
    assert tri_distance(a, b) == tri_distance(b, a)
    assert tri_distance(a, c) <= tri_distance(a, b) + tri_distance(b, c)
    assert (tri_distance(a, b) == 0) == (a == b)


def test_unit_vectors():
    assert Direction.PLUS_W.vector == (-1, 1)
    assert Direction.MINUS_W.vector == (1, -1)
    for d in DIRECTIONS:
        assert Direction.from_vector(*d.vector) is d
        assert -d is d.opposite
        assert direction_distance(d, d.opposite) == 2


def test_from_vector_rejects_non_units():
    with pytest.raises(ValueError):
        Direction.from_vector(1, 1)


def test_neighbours_are_at_distance_one(origin):
    around = neighbors(origin)
    assert len(around) == 6
    assert all(tri_distance(origin, p) == 1 for p in around)
    # (1, 1) is two steps away: there is no +x+y diagonal
    assert tri_distance(origin, GridPoint(1, 1)) == 2
    assert tri_distance(origin, GridPoint(-1, 1)) == 1


def test_movement_targets_are_the_adjacent_directions():
    assert movement_targets(Direction.PLUS_X) == {Direction.PLUS_Y, Direction.MINUS_W}
    for u in DIRECTIONS:
        assert len(movement_targets(u)) == 2


def test_point_arithmetic(origin):
    p = GridPoint(2, -3)
    assert p + Direction.PLUS_X == GridPoint(3, -3)
    assert p - Direction.PLUS_Y == GridPoint(2, -4)
    assert -p == GridPoint(-2, 3)
    assert p + p - p == p
    assert origin.direction_to(GridPoint(0, -1)) is Direction.MINUS_Y


@given(st.sets(points, min_size=1, max_size=8), points)
def test_normalize_ignores_translation(shape, shift):
    assert normalize(translate(shape, shift)) == normalize(shape)
    assert normalize(shape)[0] == GridPoint(0, 0)


def test_bounding_rect():
    assert bounding_rect([]) == (0, 0)
    rect = bounding_rect([GridPoint(0, 0), GridPoint(3, 1), GridPoint(-1, 0)])
    assert (rect.width, rect.height) == (5, 2)
    assert rect.area == 10
    assert str(rect) == "5x2"


def test_bfs_limit():
    with pytest.raises(ValueError):
        bfs_distance(GridPoint(0, 0), GridPoint(10, 0), limit=3)
