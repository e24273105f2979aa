import json

import pytest

from app.constructions.doubling import gen_line_doubling, gen_pds
from app.core.errors import BondNotAdjacent, DuplicateMonomer, EmptyPairBothSides, ParseError
from app.engine.kinetics import run
from app.formats.machinefiles import parse_circuit, parse_tm, serialize_circuit, serialize_tm
from app.formats.render import render_ascii, render_snapshot, render_svg
from app.formats.ruledsl import (
    config_from_word, parse_config, parse_ruleset, parse_ruleset_doc, serialize_config, serialize_ruleset,
)
from app.formats.traces import read_trace, write_trace
from app.machines.circuits import CIRCUITS, circuit_oracle
from app.machines.tm import MACHINES, accepts, tm_oracle
from app.models.enums import BondType, Direction, RenderFormat
from app.models.grid import GridPoint
from app.models.models import Configuration

RULES = """\
nubot-format 1
name demo
state a b c

# grow to the right
a, empty, null, +x -> a, c, rigid, +x    # grow
a, b, rigid, +x -> a, b, rigid, +y
"""

CONFIG = """\
nubot-format 1
monomer (0,0) a
monomer (1,0) b
monomer (-1,1) c
bond (0,0) (1,0) rigid
bond (0,0) (-1,1) flexible
"""


# ----- rule sets and configurations -----

def test_parse_ruleset():
    doc = parse_ruleset_doc(RULES)
    assert doc.name == "demo"
    assert doc.states == ["a", "b", "c"]
    grow, swing = doc.rules
    assert grow.comment == "grow"
    assert (grow.s2, grow.bondp, grow.up) == ("empty", BondType.RIGID, Direction.PLUS_X)
    assert swing.is_movement


def test_parse_config():
    config = parse_config(CONFIG)
    assert config.state_at(GridPoint(-1, 1)) == "c"
    assert config.bond_between(GridPoint(0, 0), GridPoint(-1, 1)) == BondType.FLEXIBLE
    assert parse_config(serialize_config(config)) == config


def test_bond_kinds_survive_a_round_trip():
    config = Configuration.line(["a", "b", "c"])
    config.set_bond(GridPoint(1, 0), GridPoint(2, 0), BondType.FLEXIBLE)
    text = serialize_config(config)
    assert "rigid" in text and "flexible" in text
    back = parse_config(text)
    assert back.bond_between(GridPoint(0, 0), GridPoint(1, 0)) == BondType.RIGID
    assert back.bond_between(GridPoint(1, 0), GridPoint(2, 0)) == BondType.FLEXIBLE
    assert back == config


def test_unknown_bond_kind():
    with pytest.raises(ParseError) as exc:
        parse_config("nubot-format 1\nmonomer (0,0) a\nmonomer (1,0) b\nbond (0,0) (1,0) sticky\n")
    assert exc.value.line == 4
    assert "rigid or flexible" in exc.value.message


def test_ruleset_round_trip_keeps_order_and_comments():
    rules = gen_pds().rules
    text = serialize_ruleset(rules, name="pds")
    back = parse_ruleset(text)
    assert back == rules
    assert [r.comment for r in back] == [r.comment for r in rules]
    assert parse_ruleset_doc(text).name == "pds"


@pytest.mark.parametrize("text, line", [
    ("nubot-format 1\na, empty, null, +x -> a, b, rigid, +q\n", 2),
    ("nubot-format 1\n\n\na, empty null, +x -> a, b, rigid, +x\n", 4),
    ("# comment\nnubot-format 7\n", 2),
    ("nubot-format 1\nstate a empty\n", 2),
])
def test_ruleset_errors_are_located(text, line):
    with pytest.raises(ParseError) as exc:
        parse_ruleset(text)
    assert exc.value.line == line
    assert f"line {line}" in exc.value.message
    assert exc.value.exit_code == 4


def test_invalid_rule_keeps_its_error_type():
    with pytest.raises(EmptyPairBothSides) as exc:
        parse_ruleset("nubot-format 1\n\nempty, empty, null, +x -> a, empty, null, +x\n")
    assert exc.value.details == {"line": 3}


@pytest.mark.parametrize("text, error", [
    ("nubot-format 1\nmonomer (0,0) a\nmonomer (0,0) b\n", DuplicateMonomer),
    ("nubot-format 1\nmonomer (0,0) a\nmonomer (2,0) b\nbond (0,0) (2,0) rigid\n", BondNotAdjacent),
    ("nubot-format 1\nmonomer (0,0) a\nmonomer (1,0) b\nbond (0,0) (1,0) null\n", ParseError),
    ("nubot-format 1\nmonomer (0,0) empty\n", ParseError),
    ("nubot-format 1\nmonomer (0,x) a\n", ParseError),
])
def test_config_errors(text, error):
    with pytest.raises(error) as exc:
        parse_config(text)
    assert "line" in exc.value.message


def test_config_from_word():
    config = config_from_word("1101")
    assert config.row_states() == ["1", "1", "0", "1"]
    assert len(config.bonds) == 3
    with pytest.raises(ValueError):
        config_from_word("12")


# ----- traces -----

def test_trace_round_trip():
    spec = gen_pds()
    trajectory = run(spec.initial, spec.rules, seed=4)
    text = write_trace(trajectory, len(spec.rules), spec.initial.digest())
    header, records = read_trace(text)
    assert header.seed == 4
    assert header.rule_count == 13
    assert header.initial_digest == spec.initial.digest()
    assert [r.digest for r in records] == [s.digest for s in trajectory.steps]
    assert records[-1].digest == trajectory.terminal.digest()
    assert {r.arm is not None for r in records if r.movable_size} == {True}
    assert len(text.splitlines()) == 14


def test_identical_seeds_give_identical_traces():
    spec = gen_line_doubling(4)

    def trace(seed):
        return write_trace(run(spec.initial, spec.rules, seed=seed), len(spec.rules), spec.initial.digest())

    assert trace(17) == trace(17)
    assert trace(17) != trace(18)


def test_trace_errors():
    with pytest.raises(ParseError, match="no header"):
        read_trace("")
    with pytest.raises(ParseError) as exc:
        read_trace('{"seed": 1, "rule_count": 1, "initial_digest": "00"}\n{oops\n')
    assert exc.value.line == 2

    spec = gen_pds()
    lines = write_trace(run(spec.initial, spec.rules, seed=1), 13, spec.initial.digest()).splitlines()
    swapped = [lines[0], lines[2], lines[1], *lines[3:]]
    with pytest.raises(ParseError, match="increasing"):
        read_trace("\n".join(swapped))

    record = json.loads(lines[1])
    record["rule_id"] = -1
    with pytest.raises(ParseError, match="invalid trace record"):
        read_trace("\n".join([lines[0], json.dumps(record)]))


# ----- snapshots -----

def test_ascii_snapshot(pair):
    assert render_ascii(pair) == "A * B\n\nA = a\nB = b\n"
    pair.set_bond(GridPoint(0, 0), GridPoint(1, 0), BondType.FLEXIBLE)
    assert render_ascii(pair).splitlines()[0] == "A o B"


def test_ascii_rows_are_offset():
    config = Configuration.line(["a", "b"], direction=Direction.PLUS_Y)
    assert render_ascii(config).splitlines()[:3] == ["  B", " *", "A"]
    assert render_ascii(Configuration()) == ""


def test_svg_snapshot(pair):
    svg = render_svg(pair)
    assert svg.startswith("<svg")
    assert ">a</text>" in svg and ">b</text>" in svg
    assert render_snapshot(pair, RenderFormat.SVG) == svg
    assert render_snapshot(pair, "ascii") == render_ascii(pair)


# ----- machines and circuits -----

def test_machine_files_round_trip():
    for name, build in MACHINES.items():
        tm = build()
        back = parse_tm(serialize_tm(tm))
        assert (back.name, back.delta, back.start, back.halting) == (tm.name, tm.delta, tm.start, tm.halting)
        for x in filter(lambda x: accepts(tm, x), ("", "1", "11", "101")):
            assert tm_oracle(back, x) == tm_oracle(tm, x)


def test_machine_file_errors():
    header = "nubot-format 1\nmachine m\nstates s h\n"
    with pytest.raises(ParseError, match="start"):
        parse_tm(header + "halt h\n")
    with pytest.raises(ParseError) as exc:
        parse_tm(header + "start s\nhalt h\ndelta s B _ -> q R - S -\n")
    assert exc.value.line == 6
    with pytest.raises(ParseError) as exc:
        parse_tm(header + "start s\nhalt h\ndelta s B _ -> h R - S -\ndelta s B _ -> h S - S -\n")
    assert exc.value.line == 7


def test_circuit_files_round_trip():
    for name, build in CIRCUITS.items():
        circuit = build()
        back = parse_circuit(serialize_circuit(circuit))
        assert back.gates == circuit.gates
        assert back.name == name


def test_circuit_file():
    text = "nubot-format 1\ncircuit and2\ngate 1 0 input 1 -> 3\ngate 2 0 input 2 -> 3\ngate 3 1 and 1 2\n"
    circuit = parse_circuit(text)
    assert [circuit_oracle(circuit, x) for x in ("00", "01", "10", "11")] == [0, 0, 0, 1]


@pytest.mark.parametrize("gates, line", [
    # destinations disagree with the wiring
    ("gate 1 0 input 1 -> 2\ngate 2 0 input 2 -> 3\ngate 3 1 and 1 2\n", 3),
    # gate 4 skips a layer
    ("gate 1 0 input 1\ngate 2 0 input 2\ngate 3 1 or 1 2\ngate 4 2 and 3 1\n", 6),
    ("gate 1 0 input 1 2\n", 3),
])
def test_circuit_errors_are_located(gates, line):
    with pytest.raises(ParseError) as exc:
        parse_circuit("nubot-format 1\ncircuit bad\n" + gates)
    assert exc.value.line == line
