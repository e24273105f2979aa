import numpy as np
import pytest

from app.cli.suites import random_cluster
from app.core.errors import NotAdjacent, NotOccupied
from app.engine.movement import brute_force_movable_set, is_valid_movable, movable_set
from app.models.enums import BondType, Direction
from app.models.grid import GridPoint
from app.models.models import Configuration

O, PX, PY, MX, MY = GridPoint(0, 0), GridPoint(1, 0), GridPoint(0, 1), GridPoint(-1, 0), GridPoint(0, -1)


def cluster(monomers, bonds):
    return Configuration.from_parts([(p, "m") for p in monomers], bonds)


def test_lone_arm_moves_alone():
    config = cluster([O, MY], [(O, MY, BondType.RIGID)])
    assert movable_set(config, O, MY, Direction.PLUS_X) == {O}


def test_pushes_whatever_is_in_the_way():
    config = cluster([O, MY, PX, GridPoint(2, 0)], [(O, MY, BondType.RIGID)])
    assert movable_set(config, O, MY, Direction.PLUS_X) == {O, PX, GridPoint(2, 0)}


def test_pulls_rigid_partners():
    config = cluster([O, MY, PY], [(O, MY, BondType.RIGID), (O, PY, BondType.RIGID)])
    assert movable_set(config, O, MY, Direction.PLUS_X) == {O, PY}


def test_blocked_when_base_is_pushed():
    config = cluster([O, PX], [(O, PX, BondType.RIGID)])
    assert movable_set(config, O, PX, Direction.PLUS_X) == frozenset()


def test_blocked_through_rigid_chain():
    # arm pulls c rigidly, and c's move pushes into the base
    config = cluster([O, MY, MX], [(O, MY, BondType.RIGID), (O, MX, BondType.RIGID)])
    assert movable_set(config, O, MY, Direction.MINUS_W) == frozenset()


def test_flexible_partner_stays_while_adjacent():
    config = cluster([O, MY, PY], [(O, MY, BondType.RIGID), (O, PY, BondType.FLEXIBLE)])
    assert movable_set(config, O, MY, Direction.PLUS_X) == {O}


def test_flexible_partner_follows_when_stretched():
    config = cluster([O, MY, MX], [(O, MY, BondType.RIGID), (O, MX, BondType.FLEXIBLE)])
    assert movable_set(config, O, MY, Direction.PLUS_X) == {O, MX}


def test_result_satisfies_the_clauses():
    config = cluster([O, MY, PX, PY], [(O, MY, BondType.RIGID), (PX, PY, BondType.RIGID)])
    moved = movable_set(config, O, MY, Direction.PLUS_X)
    assert is_valid_movable(config, set(moved), O, MY, Direction.PLUS_X)
    assert not is_valid_movable(config, {O}, O, MY, Direction.PLUS_X)


def test_pair_must_be_adjacent_and_occupied():
    config = cluster([O, GridPoint(2, 0)], [])
    with pytest.raises(NotAdjacent):
        movable_set(config, O, GridPoint(2, 0), Direction.PLUS_Y)
    with pytest.raises(NotOccupied):
        movable_set(config, O, PX, Direction.PLUS_Y)


@pytest.mark.parametrize("seed", range(5))
def test_random_clusters_match_the_subset_oracle(seed):
    rng = np.random.default_rng(seed)
    for _ in range(100):
        config, arm, base, v = random_cluster(rng, int(rng.integers(2, 7)))
        assert movable_set(config, arm, base, v) == brute_force_movable_set(config, arm, base, v)
