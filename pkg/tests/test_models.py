import pytest

from app.core.errors import BondNotAdjacent, BondToVacancy, DuplicateMonomer, NotOccupied
from app.models.enums import BondType, Direction
from app.models.grid import GridPoint
from app.models.models import EMPTY, Configuration, ConstructionSpec, Rule


def test_line_bonds_neighbours(pair):
    assert pair.monomers == {GridPoint(0, 0): "a", GridPoint(1, 0): "b"}
    assert pair.bond_between(GridPoint(0, 0), GridPoint(1, 0)) == BondType.RIGID
    assert pair.bond_between(GridPoint(1, 0), GridPoint(0, 0)) == BondType.RIGID
    assert pair.bonds == {(GridPoint(0, 0), GridPoint(1, 0)): BondType.RIGID}
    pair.check_invariants()


def test_duplicate_monomer(pair):
    with pytest.raises(DuplicateMonomer) as exc:
        pair.add_monomer(GridPoint(1, 0), "c")
    assert exc.value.code == "DUPLICATE_MONOMER"
    assert exc.value.exit_code == 4


def test_bond_rules(pair):
    pair.add_monomer(GridPoint(3, 0), "c")
    with pytest.raises(BondNotAdjacent):
        pair.set_bond(GridPoint(1, 0), GridPoint(3, 0), BondType.FLEXIBLE)
    with pytest.raises(BondToVacancy):
        pair.set_bond(GridPoint(1, 0), GridPoint(2, 0), BondType.RIGID)
    # null bonds are never stored
    pair.set_bond(GridPoint(0, 0), GridPoint(1, 0), BondType.NULL)
    assert pair.bonds == {}


def test_missing_monomer(pair):
    with pytest.raises(NotOccupied):
        pair.set_state(GridPoint(5, 5), "x")
    with pytest.raises(NotOccupied):
        pair.remove_monomer(GridPoint(5, 5))


def test_empty_state_is_not_placeable():
    with pytest.raises(ValueError):
        Configuration().add_monomer(GridPoint(0, 0), EMPTY)


def test_remove_drops_bonds(pair):
    assert pair.remove_monomer(GridPoint(1, 0)) == "b"
    assert pair.bonds == {}
    assert pair.bonded(GridPoint(0, 0)) == {}


def test_move_carries_bonds():
    config = Configuration.line(["a", "b", "c"])
    config.move({GridPoint(1, 0), GridPoint(2, 0)}, Direction.PLUS_Y)
    assert config.monomers == {GridPoint(0, 0): "a", GridPoint(1, 1): "b", GridPoint(2, 1): "c"}
    assert config.bond_between(GridPoint(1, 1), GridPoint(2, 1)) == BondType.RIGID
    # the a-b bond followed b even though it is no longer between neighbours
    assert config.bond_between(GridPoint(0, 0), GridPoint(1, 1)) == BondType.RIGID


def test_digest_ignores_translation():
    a = Configuration.line(["a", "b", "c"])
    b = Configuration.line(["a", "b", "c"], start=GridPoint(-7, 4))
    assert a != b
    assert a.equivalent(b)
    assert a.digest() == b.digest()
    assert len(a.digest()) == 16


def test_digest_sees_states_and_bonds():
    rigid = Configuration.line(["a", "b"])
    flexible = Configuration.line(["a", "b"], bond=BondType.FLEXIBLE)
    renamed = Configuration.line(["a", "c"])
    assert len({rigid.digest(), flexible.digest(), renamed.digest()}) == 3


def test_copy_is_independent(pair):
    clone = pair.copy()
    clone.set_state(GridPoint(0, 0), "z")
    clone.set_bond(GridPoint(0, 0), GridPoint(1, 0), BondType.FLEXIBLE)
    assert pair.state_at(GridPoint(0, 0)) == "a"
    assert pair.bond_between(GridPoint(0, 0), GridPoint(1, 0)) == BondType.RIGID


def test_reading_rows():
    config = Configuration.line(["1", "0", "1"])
    config.add_line(["x"], GridPoint(0, 1))
    assert config.row_states() == ["1", "0", "1"]
    assert config.row_states(1) == ["x"]
    assert [s for _, s in config.walk(GridPoint(1, 0))] == ["0", "1"]
    assert str(config.bounding_rect()) == "3x2"


def test_rule_shape(appear_rule):
    assert not appear_rule.is_movement
    assert appear_rule.states() == {"a", "c"}
    assert str(appear_rule) == "a, empty, null, +x -> a, c, rigid, +x"

    move = Rule("a", "b", BondType.RIGID, Direction.PLUS_X, "a", "b", BondType.RIGID, Direction.PLUS_Y)
    assert move.is_movement
    assert move.movement_vector() == GridPoint(-1, 1)
    assert Direction.from_vector(*move.movement_vector()) is Direction.PLUS_W


def test_rule_equality_ignores_comment(appear_rule):
    twin = Rule(*appear_rule.lhs, *appear_rule.rhs, comment="grow")
    assert twin == appear_rule
    assert hash(twin) == hash(appear_rule)


def test_state_count(pair, appear_rule):
    spec = ConstructionSpec(name="t", rules=[appear_rule], initial=pair, target=lambda c: True)
    assert spec.state_count() == 3
