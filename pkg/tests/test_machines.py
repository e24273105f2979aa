import numpy as np
import pytest

from app.cli.suites import answer_stays_fixed, kinetic_check, walker_check
from app.constructions.phases import circuit_phases, tm_phases
from app.core.errors import CapExceeded, GenerationError, NoAcceptingPath
from app.engine.walker import interpret
from app.machines.circuits import (
    CIRCUITS, CircuitDesc, Gate, all_inputs, check_circuit_caps, circuit_oracle, encode_circuit, encoded_layers,
    gen_circuit_sim, get_circuit, unfold_circuit,
)
from app.machines.pipeline import monomer_tm_pipeline
from app.machines.tm import (
    MACHINES, ConfigLayout, TMSpec, TMTransition, accepts, build_config_matrix, closure_oracle, extract_tm_output,
    get_machine, path_complete, reachable_configs, simulate_by_squaring, tm_oracle, unary_circuit_description,
)
from app.models.enums import GateType


# ----- machines -----

@pytest.mark.parametrize("name, x, out", [
    ("copy", "101", "101"),
    ("copy", "", ""),
    ("increment", "011", "100"),
    ("increment", "111", "000"),
    ("increment", "10", "11"),
    ("one-writer", "0110", "1"),
    ("two-writer", "", "10"),
    ("unary-circuit", "111", unary_circuit_description(3)),
])
def test_oracle(name, x, out):
    assert tm_oracle(get_machine(name), x) == out


@pytest.mark.parametrize("name, x", [
    ("copy", "10"), ("copy", "011"), ("increment", "101"), ("increment", "1"), ("unary-circuit", "11"),
    ("two-writer", "0"),
])
def test_squaring_matches_direct_execution(name, x):
    tm = get_machine(name)
    assert simulate_by_squaring(tm, x) == tm_oracle(tm, x)


def test_unary_machine_rejects_zeros():
    tm = get_machine("unary-circuit")
    assert not accepts(tm, "101")
    with pytest.raises(NoAcceptingPath):
        tm_oracle(tm, "0")


def test_unknown_machine():
    with pytest.raises(GenerationError):
        get_machine("busy-beaver")


def test_machine_validation():
    with pytest.raises(GenerationError, match="start state"):
        TMSpec("m", ("s", "h"), "q", frozenset({"h"})).validate()
    with pytest.raises(GenerationError, match="leaves a halting state"):
        TMSpec("m", ("s", "h"), "s", frozenset({"h"}), {("h", "#", "_"): TMTransition("s")}).validate()
    with pytest.raises(GenerationError, match="more than one cell"):
        TMSpec("m", ("s", "h"), "s", frozenset({"h"}), {("s", "#", "_"): TMTransition("h", 2)}).validate()


def test_configuration_layout_round_trip():
    tm = get_machine("increment")
    layout = ConfigLayout.of(tm, 3)
    for c in reachable_configs(tm, "011"):
        bits = layout.encode(c)
        assert len(bits) == layout.width
        assert layout.decode(bits) == c


def test_config_matrix_is_functional():
    cm = build_config_matrix(get_machine("copy"), "10")
    assert cm.matrix.sum(axis=1).max() == 1
    assert cm.k == ConfigLayout.of(get_machine("copy"), 2).count()


def test_config_matrix_cap(fresh_settings):
    fresh_settings.setenv("NUBOT_CAPS", "config_matrix=10")
    with pytest.raises(CapExceeded):
        build_config_matrix(get_machine("copy"), "10")


def test_path_completion_matches_transitive_closure(rng):
    for k in (1, 2, 5, 17, 40):
        m = rng.random((k, k)) < 2.0 / k
        assert np.array_equal(path_complete(m), closure_oracle(m))


def test_path_completion_on_a_chain():
    k = 9
    chain = np.eye(k, k, 1, dtype=bool)
    closed = path_complete(chain)
    assert np.array_equal(closed, np.triu(np.ones((k, k), dtype=bool), 1))


def test_output_is_read_off_the_closed_matrix():
    tm = get_machine("increment")
    cm = build_config_matrix(tm, "011")
    assert extract_tm_output(path_complete(cm.matrix), cm, tm, "011") == "100"
    with pytest.raises(NoAcceptingPath):
        extract_tm_output(np.zeros_like(cm.matrix), cm, tm, "011")


def test_tm_phases():
    run = tm_phases(get_machine("copy"), "10")
    assert run.result == "10"
    assert [p.name for p in run.phases][:2] == ["enumerate", "transition pairs"]


@pytest.mark.parametrize("name, x", [("one-writer", "1"), ("two-writer", ""), ("copy", "1")])
def test_monomer_pipeline_walker(name, x):
    spec = monomer_tm_pipeline(MACHINES[name](), x)
    assert spec.params["configurations"] <= 8
    assert walker_check(spec) is None


def test_monomer_pipeline_rules():
    assert kinetic_check(monomer_tm_pipeline(MACHINES["one-writer"](), ""), seed=1) is None


def test_monomer_pipeline_cap():
    with pytest.raises(CapExceeded):
        monomer_tm_pipeline(MACHINES["copy"](), "1010101")


# ----- circuits -----

def test_shipped_circuits_compute_their_functions():
    tables = {
        "and2": {"00": 0, "01": 0, "10": 0, "11": 1},
        "or2": {"00": 0, "01": 1, "10": 1, "11": 1},
        "not1": {"0": 1, "1": 0},
        "xor2": {"00": 0, "01": 1, "10": 1, "11": 0},
        "crossing": {"00": 0, "01": 0, "10": 1, "11": 0},
    }
    for name, table in tables.items():
        c = get_circuit(name)
        assert {x: circuit_oracle(c, x) for x in all_inputs(c)} == table
    majority = get_circuit("majority3")
    assert [circuit_oracle(majority, x) for x in all_inputs(majority)] == [0, 0, 0, 1, 0, 1, 1, 1]


def test_circuit_validation():
    def inputs(n):
        return tuple(Gate(i, 0, GateType.INPUT, index=i) for i in range(1, n + 1))

    with pytest.raises(GenerationError, match="exactly one output"):
        CircuitDesc("c", inputs(2) + (Gate(3, 1, GateType.NOT, (1,)),)).validate()
    with pytest.raises(GenerationError, match="not layered"):
        CircuitDesc("c", inputs(1) + (Gate(2, 2, GateType.NOT, (1,)),)).validate()
    with pytest.raises(GenerationError, match="takes 1"):
        CircuitDesc("c", inputs(2) + (Gate(3, 1, GateType.NOT, (1, 2)),)).validate()
    with pytest.raises(GenerationError, match="numbered"):
        CircuitDesc("c", (Gate(1, 0, GateType.INPUT, index=2), Gate(2, 1, GateType.NOT, (1,)))).validate()
    with pytest.raises(GenerationError, match="input bits"):
        circuit_oracle(get_circuit("and2"), "1")


def test_circuit_caps():
    gates = [Gate(1, 0, GateType.INPUT, index=1)] + [Gate(i, i - 1, GateType.OR, (i - 1,)) for i in range(2, 6)]
    deep = CircuitDesc("deep", tuple(gates)).validate()
    assert deep.depth == 4
    with pytest.raises(CapExceeded):
        check_circuit_caps(deep)
    for build in CIRCUITS.values():
        check_circuit_caps(build())


def test_encoding_keeps_layers():
    c = get_circuit("xor2")
    layers = encoded_layers(encode_circuit(c))
    assert list(layers.values()) == [["input", "input"], ["or", "and"], ["or", "not"], ["and"]]


def test_unfolding_reads_the_ladder_back():
    c = get_circuit("xor2")
    address = c.addresses()
    gates = unfold_circuit(encode_circuit(c))
    assert [g.type for g in gates] == [g.type for g in c.ordered()]
    assert [g.address for g in gates] == list(range(1, c.size + 1))
    assert [list(g.destinations) for g in gates] == [
        [address[d] for d in c.destinations(g.id)] for g in c.ordered()
    ]


def test_simulation_runs_on_the_encoding_not_the_gate_ids():
    # ids out of layer order; the encoding renumbers gates by position
    c = CircuitDesc("shuffled", (
        Gate(5, 0, GateType.INPUT, index=1),
        Gate(4, 0, GateType.INPUT, index=2),
        Gate(1, 1, GateType.AND, (5, 4)),
        Gate(2, 1, GateType.NOT, (4,)),
        Gate(3, 2, GateType.OR, (1, 2)),
    )).validate()
    assert c.addresses() == {5: 1, 4: 2, 1: 3, 2: 4, 3: 5}
    for x in all_inputs(c):
        spec = gen_circuit_sim(c, x)
        assert walker_check(spec) is None
        assert spec.decode(interpret(spec.program, spec.initial, strict=True)[0]) == circuit_oracle(c, x)


@pytest.mark.parametrize("name", ["and2", "not1", "crossing"])
def test_circuit_walker(name):
    c = get_circuit(name)
    for x in all_inputs(c):
        assert walker_check(gen_circuit_sim(c, x)) is None
        assert circuit_phases(c, x).result == circuit_oracle(c, x)


def test_circuit_rules():
    assert kinetic_check(gen_circuit_sim(get_circuit("not1"), "0"), seed=2) is None


def test_record_tape_generators_build_and_run():
    circuit = gen_circuit_sim(get_circuit("and2"), "11")
    pipeline = monomer_tm_pipeline(MACHINES["one-writer"](), "1")
    for spec in (circuit, pipeline):
        assert walker_check(spec) is None
        assert kinetic_check(spec, seed=3) is None


@pytest.mark.parametrize("name,x,seed", [("not1", "0", 1), ("not1", "1", 4), ("and2", "10", 2), ("and2", "11", 7)])
def test_answer_never_changes_once_written(name, x, seed):
    spec = gen_circuit_sim(get_circuit(name), x)
    assert answer_stays_fixed(spec, seed) is None
    assert answer_stays_fixed(spec, seed, trial=1) is None
