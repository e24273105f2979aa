"""Layered Boolean circuits: description, direct evaluation, encodings and the walker.

Gates on layer 0 are inputs and constants; a gate on layer i > 0 reads one or
two gates of layer i - 1 and has no other predecessors. Exactly one gate has
no successors: the output. OR and AND with one input pass it through.
"""
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import networkx as nx

from app.constructions.common import bits_of, check_cap, require, value_of, walker_spec
from app.constructions.records import (
    BLANK, DELIM, END, EQ, WALL, RecordTape, Role, bit_cell, is_bit, separator,
)
from app.core.errors import GenerationError
from app.engine.walker import L, R, Program
from app.models.enums import BondType, Direction, GateType
from app.models.grid import BoundingRect, GridPoint
from app.models.models import EMPTY, Configuration, ConstructionSpec

SOURCES = (GateType.INPUT, GateType.CONST0, GateType.CONST1)


@dataclass(frozen=True)
class Gate:
    id: int
    layer: int
    type: GateType
    inputs: tuple[int, ...] = ()
    # 1-based input number, input gates only
    index: Optional[int] = None


@dataclass(frozen=True)
class CircuitDesc:
    name: str
    gates: tuple[Gate, ...]
    description: str = ""

    @cached_property
    def by_id(self) -> dict[int, Gate]:
        return {g.id: g for g in self.gates}

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def depth(self) -> int:
        return max((g.layer for g in self.gates), default=0)

    @property
    def n_inputs(self) -> int:
        return sum(1 for g in self.gates if g.type == GateType.INPUT)

    def layers(self) -> list[list[Gate]]:
        """Gates per layer; inputs by input number then constants, other layers by id."""
        out: list[list[Gate]] = [[] for _ in range(self.depth + 1)]
        for g in self.gates:
            out[g.layer].append(g)
        out[0].sort(key=lambda g: (g.type != GateType.INPUT, g.index or 0, g.id))
        for layer in out[1:]:
            layer.sort(key=lambda g: g.id)
        return out

    def ordered(self) -> list[Gate]:
        return [g for layer in self.layers() for g in layer]

    def destinations(self, gid: int) -> list[int]:
        """Ids of the gates reading gid, once per wire, in tape order."""
        return [g.id for g in self.ordered() for src in g.inputs if src == gid]

    @property
    def output(self) -> int:
        return self.sinks()[0]

    def sinks(self) -> list[int]:
        fed = {src for g in self.gates for src in g.inputs}
        return [g.id for g in self.ordered() if g.id not in fed]

    def graph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        for gate in self.gates:
            g.add_node(gate.id, layer=gate.layer, type=gate.type)
        for gate in self.gates:
            for src in gate.inputs:
                g.add_edge(src, gate.id)
        return g

    def addresses(self) -> dict[int, int]:
        """Gate id to its 1-based position in layer order, the address the encodings carry."""
        return {g.id: i for i, g in enumerate(self.ordered(), start=1)}

    def address_width(self) -> int:
        return self.size.bit_length()

    def validate(self) -> "CircuitDesc":
        where = f"circuit {self.name}"
        if not self.gates:
            raise GenerationError(f"{where} has no gates")
        ids = Counter(g.id for g in self.gates)
        dup = sorted(i for i, c in ids.items() if c > 1)
        if dup:
            raise GenerationError(f"{where}: gate ids {dup} are used twice")
        if min(ids) < 1:
            raise GenerationError(f"{where}: gate ids start at 1")
        for g in self.gates:
            if g.type in SOURCES:
                if g.layer != 0 or g.inputs:
                    raise GenerationError(f"{where}: gate {g.id} ({g.type.value}) must sit on layer 0 with no inputs")
                continue
            arity = (1,) if g.type == GateType.NOT else (1, 2)
            if len(g.inputs) not in arity:
                raise GenerationError(f"{where}: gate {g.id} ({g.type.value}) takes {' or '.join(map(str, arity))} inputs")
            for src in g.inputs:
                if src not in self.by_id:
                    raise GenerationError(f"{where}: gate {g.id} reads unknown gate {src}")
                if self.by_id[src].layer != g.layer - 1:
                    raise GenerationError(
                        f"{where} is not layered: gate {g.id} on layer {g.layer} reads gate {src} "
                        f"on layer {self.by_id[src].layer}",
                        details={"gate": g.id, "source": src},
                    )
        indices = sorted(g.index or 0 for g in self.gates if g.type == GateType.INPUT)
        if indices != list(range(1, len(indices) + 1)):
            raise GenerationError(f"{where}: input gates must be numbered 1..{len(indices)}", details={"found": indices})
        if not nx.is_directed_acyclic_graph(self.graph()):
            raise GenerationError(f"{where} has a cycle")
        sinks = self.sinks()
        if len(sinks) != 1:
            raise GenerationError(f"{where} needs exactly one output gate, found {len(sinks)}", details={"sinks": sinks})
        return self


def _apply(gate: Gate, values: list[int]) -> int:
    if gate.type == GateType.AND:
        return int(all(values))
    if gate.type == GateType.OR:
        return int(any(values))
    if gate.type == GateType.NOT:
        return 1 - values[0]
    raise GenerationError(f"gate {gate.id} ({gate.type.value}) has no inputs to combine")


def check_input(c: CircuitDesc, x: str) -> None:
    if set(x) - {"0", "1"} or len(x) != c.n_inputs:
        raise GenerationError(f"circuit {c.name} takes {c.n_inputs} input bits, got '{x}'")


def evaluate_gates(c: CircuitDesc, x: str) -> dict[int, int]:
    """Value of every gate on input x."""
    check_input(c, x)
    values: dict[int, int] = {}
    for gid in nx.topological_sort(c.graph()):
        g = c.by_id[gid]
        if g.type == GateType.INPUT:
            values[gid] = int(x[g.index - 1])
        elif g.type in (GateType.CONST0, GateType.CONST1):
            values[gid] = int(g.type == GateType.CONST1)
        else:
            values[gid] = _apply(g, [values[src] for src in g.inputs])
    return values


def circuit_oracle(c: CircuitDesc, x: str) -> int:
    return evaluate_gates(c, x)[c.output]


def check_circuit_caps(c: CircuitDesc) -> None:
    check_cap("circuit depth", c.depth, "CIRCUIT_DEPTH_CAP")
    check_cap("gates per layer", max((len(layer) for layer in c.layers()[1:]), default=0), "CIRCUIT_WIDTH_CAP")
    check_cap("circuit inputs", c.n_inputs, "CIRCUIT_INPUT_CAP")


# ----- 2D encoding -----

GATE_STATE = "ckt_gate_{}"
RUNG_STATE = "ckt_rung"
SPINE_STATE = "ckt_spine"
RESULT_STATE = "ckt_res"
ADDRESS_STATE = "ckt_a{}"


def layer_spacing(c: CircuitDesc) -> int:
    """Horizontal distance between neighbouring gates of a layer."""
    widest = max((len(c.destinations(g.id)) for g in c.gates), default=0)
    return max(c.size, widest + 1, 2 * c.address_width() + 2)


def rung_height(c: CircuitDesc) -> int:
    return 2 * c.address_width() + 2


def encode_circuit(c: CircuitDesc) -> Configuration:
    """Gates written in layers, one horizontal rung per layer, joined by a spine on the left.

    A gate monomer carries its type. Its out-degree many result segments
    stand above it: a rail of result monomers on the row above the gate, each
    topped by the destination address in binary, most significant bit lowest.
    The rows below a gate, as many as the address width, stay empty for
    incoming values.
    """
    c.validate()
    a = c.address_width()
    spacing = layer_spacing(c)
    height = rung_height(c)
    config = Configuration()
    layers = c.layers()
    address = c.addresses()
    top = (len(layers) - 1) * height + a
    config.add_line([SPINE_STATE] * (top + 1), GridPoint(-1, 0), Direction.PLUS_Y)
    for i, layer in enumerate(layers):
        y = i * height + a
        width = (len(layer) - 1) * spacing + 1
        states = [RUNG_STATE] * width
        for j, g in enumerate(layer):
            states[j * spacing] = GATE_STATE.format(g.type.value)
        config.add_line(states, GridPoint(0, y))
        config.set_bond(GridPoint(-1, y), GridPoint(0, y), BondType.RIGID)
        for j, g in enumerate(layer):
            x0 = j * spacing
            dests = c.destinations(g.id)
            if not dests:
                continue
            rail = config.add_line([RESULT_STATE] * len(dests), GridPoint(x0, y + 1))
            config.set_bond(GridPoint(x0, y), rail[0], BondType.RIGID)
            for k, dest in enumerate(dests):
                column = config.add_line(
                    [ADDRESS_STATE.format(b) for b in bits_of(address[dest], a)], GridPoint(x0 + k, y + 2), Direction.PLUS_Y,
                )
                config.set_bond(rail[k], column[0], BondType.RIGID)
    return config


def encoded_layers(config: Configuration) -> dict[int, list[str]]:
    """Gate states per rung row, left to right."""
    return {y: [t for _, t in row] for y, row in sorted(_rungs(config).items())}


@dataclass(frozen=True)
class EncodedGate:
    type: GateType
    address: int
    destinations: tuple[int, ...]


def unfold_circuit(config: Configuration) -> list[EncodedGate]:
    """Read the ladder back rung by rung, left to right; gates are numbered in reading order."""
    gates = []
    for y, row in sorted(_rungs(config).items()):
        for x, kind in row:
            dests = []
            rail = GridPoint(x, y + 1)
            while config.state_at(rail) == RESULT_STATE:
                column = []
                p = rail + Direction.PLUS_Y
                while (config.state_at(p) or "").startswith("ckt_a"):
                    column.append(int(config.state_at(p)[-1]))
                    p = p + Direction.PLUS_Y
                if not column:
                    raise GenerationError(f"result monomer at {rail} carries no address")
                dests.append(value_of(column))
                rail = rail + Direction.PLUS_X
            gates.append(EncodedGate(GateType(kind), len(gates) + 1, tuple(dests)))
    return gates


def _rungs(config: Configuration) -> dict[int, list[tuple[int, str]]]:
    rows: dict[int, list[tuple[int, str]]] = defaultdict(list)
    for p, s in config.monomers.items():
        if s.startswith("ckt_gate_"):
            rows[p.y].append((p.x, s[len("ckt_gate_"):]))
    return {y: sorted(row) for y, row in rows.items()}


# ----- monomer-level evaluation -----

PREFIX = "ck"
INPUT_CELLS = ("j00", "j01", "j10", "j11")
ANSWER = "ans{}"
OPS = {
    GateType.INPUT: (0, 0), GateType.CONST0: (0, 0), GateType.CONST1: (0, 0),
    GateType.AND: (0, 1), GateType.OR: (1, 0), GateType.NOT: (1, 1),
}


def circuit_tape() -> RecordTape:
    return RecordTape(
        {"g": ("p", "q", "v", "u", "c", "t"), "r": ("w",)},
        {
            "c": Role(separator(1), "g", "c"),
            "t": Role(separator(1), "g", "t"),
            "w": Role(separator(1), "r", "w"),
        },
        fields=1,
    )


def gate_raw(p: int, q: int, v: int, u: int) -> str:
    return f"ck_g{p}{q}{v}{u}"


def circuit_program() -> Program:
    """Dock the input bits, evaluate gates in tape order, keep only the answer.

    Every gate record is followed by one result record per outgoing wire,
    holding the destination address. Evaluating a gate sends its value along
    each wire: the destination is found by comparing addresses and folds the
    value into its own according to its operation.
    """
    rt = circuit_tape()
    inputs = {
        "cki_0": "j00", "cki_1": "j10", "ck_s": separator(1),
        "ck_r": rt.head("r"), "ck_b0": bit_cell(0), "ck_b1": bit_cell(1), "ck_d": DELIM,
    }
    for p_ in (0, 1):
        for q in (0, 1):
            for v in (0, 1):
                for u in (0, 1):
                    inputs[gate_raw(p_, q, v, u)] = rt.head("g", p=p_, q=q, v=v, u=u)
    p = Program(
        "circuit", PREFIX, rt.alphabet([*INPUT_CELLS, ANSWER.format(0), ANSWER.format(1)]), blank=BLANK,
        inputs=inputs,
        registers={**rt.registers(), "gv": 0},
        kind_of=lambda s: s[0],
        adjacent=rt.adjacency({
            (WALL, R): ["j", "S"],
            ("j", L): ["j", WALL, EMPTY], ("j", R): ["j", "S"],
            ("S", L): ["j", WALL, EMPTY],
        }),
    )

    def at(symbol):
        return lambda s, r: s == symbol

    def awaiting(s, r):
        return rt.is_head(s, "g") and rt.digit(s, "u") == 1

    def gate_or_end(s, r):
        return rt.is_head(s, "g") or s == END

    def past_fields(s, r):
        return not (is_bit(s) or s == DELIM)

    def deliver(s, r):
        op = (rt.digit(s, "p"), rt.digit(s, "q"))
        v = rt.digit(s, "v")
        folded = {(0, 1): v & r.gv, (1, 0): v | r.gv, (1, 1): 1 - r.gv}.get(op, v)
        return rt.put(s, v=folded, t=0)

    p.move(L).write(WALL)
    p.seek(R, at(BLANK)).write(END)

    # input bits go to input gates in order
    p.label("dock").seek(L, at(WALL))
    p.seek(R, lambda s, r: s == END or awaiting(s, r))
    p.branch(at(END), "evaluate")
    p.seek(L, at(WALL)).seek(R, lambda s, r: s in ("j00", "j10"))
    p.set(lambda s, r: r.set(gv=int(s[1]))).write(lambda s, r: s[:2] + "1")
    p.seek(R, awaiting)
    p.write(lambda s, r: rt.put(s, v=r.gv, u=0)).set(gv=0).goto("dock")

    p.label("evaluate")
    rt.first(p, "c")
    p.label("gate")
    rt.goto(p, "c")
    p.set(lambda s, r: r.set(gv=rt.digit(s, "v")))
    p.move(R).seek(R, past_fields)

    p.label("wire").branch(lambda s, r: not rt.is_head(s, "r"), "next_gate")
    p.write(lambda s, r: rt.put(s, w=1))
    rt.first(p, "t")
    p.label("target")
    rt.compare(p, ("w", 1), ("t", 1), "address")
    rt.unless(p, EQ, "target_next")
    rt.goto(p, "t")
    p.write(deliver).goto("wire_next")
    p.label("target_next")
    rt.goto(p, "t")
    p.write(lambda s, r: rt.put(s, t=0)).move(R).seek(R, gate_or_end)
    p.branch(at(END), "lost")
    p.write(lambda s, r: rt.put(s, t=1)).goto("target")
    p.label("wire_next")
    rt.goto(p, "w")
    p.write(lambda s, r: rt.put(s, w=0)).move(R).seek(R, past_fields).goto("wire")

    p.label("next_gate")
    rt.goto(p, "c")
    p.write(lambda s, r: rt.put(s, c=0)).move(R).seek(R, gate_or_end)
    p.branch(at(END), "answer")
    p.write(lambda s, r: rt.put(s, c=1)).goto("gate")

    # the output gate is the last record
    p.label("answer").move(L).seek(L, lambda s, r: rt.is_head(s, "g"))
    p.set(lambda s, r: r.set(gv=rt.digit(s, "v")))
    p.seek(L, at(WALL))
    p.label("drop").branch(at(END), "done").erase(R).goto("drop")
    p.label("done").halt(lambda s, r: ANSWER.format(r.gv))
    p.label("lost").halt()

    rt.define_compare(p)
    return p


def circuit_input(c: CircuitDesc, x: str) -> Configuration:
    """The input bits followed by the ladder encoding unfolded into one record line."""
    a = c.address_width()
    states = [f"cki_{b}" for b in x] + ["ck_s"]
    for g in unfold_circuit(encode_circuit(c)):
        p, q = OPS[g.type]
        v = int(g.type in (GateType.CONST1, GateType.AND))
        states.append(gate_raw(p, q, v, int(g.type == GateType.INPUT)))
        states += [f"ck_b{b}" for b in bits_of(g.address, a)] + ["ck_d"]
        for dest in g.destinations:
            states.append("ck_r")
            states += [f"ck_b{b}" for b in bits_of(dest, a)] + ["ck_d"]
    return Configuration.line(states)


def is_answer(state: str) -> bool:
    return state in {f"{PREFIX}_{ANSWER.format(b)}" for b in (0, 1)}


def decode_answer(symbols: list[str]) -> int:
    if len(symbols) != 1 or symbols[0] not in (ANSWER.format(0), ANSWER.format(1)):
        raise ValueError("terminal tape is not a single answer monomer")
    return int(symbols[0][-1])


def gen_circuit_sim(c: CircuitDesc, x: str) -> ConstructionSpec:
    c.validate()
    check_circuit_caps(c)
    check_input(c, x)
    expected = circuit_oracle(c, x)
    initial = circuit_input(c, x)
    return walker_spec(
        f"circuit-{c.name}",
        circuit_program(),
        initial,
        decode=decode_answer,
        expected=expected,
        params={"circuit": c.name, "input": x, "depth": c.depth, "gates": c.size},
        space_bound=BoundingRect(len(initial) + 2, 1),
        description=f"one answer monomer holding {expected}",
    )


# ----- shipped circuits -----

def _circuit(name: str, description: str, *gates: tuple) -> CircuitDesc:
    built = []
    for gid, layer, kind, *args in gates:
        t = GateType(kind)
        if t == GateType.INPUT:
            built.append(Gate(gid, layer, t, index=args[0]))
        else:
            built.append(Gate(gid, layer, t, tuple(args)))
    return CircuitDesc(name, tuple(built), description).validate()


def _inputs(n: int) -> list[tuple]:
    return [(i, 0, "input", i) for i in range(1, n + 1)]


CIRCUITS = {
    "and2": lambda: _circuit("and2", "x1 AND x2", *_inputs(2), (3, 1, "and", 1, 2)),
    "or2": lambda: _circuit("or2", "x1 OR x2", *_inputs(2), (3, 1, "or", 1, 2)),
    "not1": lambda: _circuit("not1", "NOT x1", *_inputs(1), (2, 1, "not", 1)),
    # a NOT needs its own layer, and OR with one input carries a value up a layer
    "xor2": lambda: _circuit(
        "xor2", "(x1 OR x2) AND NOT (x1 AND x2)",
        *_inputs(2),
        (3, 1, "or", 1, 2), (4, 1, "and", 1, 2),
        (5, 2, "or", 3), (6, 2, "not", 4),
        (7, 3, "and", 5, 6),
    ),
    "crossing": lambda: _circuit(
        "crossing", "x1 AND NOT x2, with the two wires into layer 1 crossing",
        *_inputs(2),
        (3, 1, "not", 2), (4, 1, "or", 1, 2),
        (5, 2, "and", 3, 4),
    ),
    "majority3": lambda: _circuit(
        "majority3", "at least two of x1, x2, x3",
        *_inputs(3),
        (4, 1, "and", 1, 2), (5, 1, "and", 2, 3), (6, 1, "and", 1, 3),
        (7, 2, "or", 4, 5), (8, 2, "or", 6),
        (9, 3, "or", 7, 8),
    ),
}


def get_circuit(name: str) -> CircuitDesc:
    require(name in CIRCUITS, f"unknown circuit '{name}'", known=sorted(CIRCUITS))
    return CIRCUITS[name]()


def all_inputs(c: CircuitDesc) -> list[str]:
    n = c.n_inputs
    return [format(i, f"0{n}b") if n else "" for i in range(2 ** n)]
