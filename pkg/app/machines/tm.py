"""Deterministic logspace-style Turing machines and their configuration matrices.

A machine has a read-only input tape `#x#`, a binary work tape whose length
depends on |x|, and a write-only output tape whose head only moves right,
one cell per written symbol. A configuration records the state, both heads,
the work tape, the output head and the symbol written by the step that led to
it (None when that step wrote nothing).

The configuration matrix has a 1 at (i, j) exactly when configuration i steps
to configuration j. Closing it under composition exposes every configuration
on the path from the start to the halting configuration, and the written
symbols along that path, ordered by output position, are the output.
"""
import itertools
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import networkx as nx
import numpy as np

from app.constructions.common import bits_of, check_cap, value_of
from app.core.config import get_settings
from app.core.errors import GenerationError, NoAcceptingPath, StepCapExceeded
from app.core.logging import logger

INPUT_SYMBOLS = ("0", "1", "#")
WORK_SYMBOLS = ("0", "1")
NO_WORK = "_"
MOVES = (-1, 0, 1)


@dataclass(frozen=True)
class TMTransition:
    state: str
    in_move: int = 0
    work_write: Optional[str] = None
    work_move: int = 0
    out: Optional[str] = None


@dataclass
class TMSpec:
    name: str
    states: tuple[str, ...]
    start: str
    halting: frozenset[str]
    delta: dict[tuple[str, str, str], TMTransition] = field(default_factory=dict)
    # work tape cells: work_cells + work_log * bit_length(n)
    work_cells: int = 0
    work_log: int = 0
    # declared output bound: output_scale * n + output_offset symbols
    output_scale: int = 0
    output_offset: int = 0
    description: str = ""

    def work_len(self, n: int) -> int:
        return self.work_cells + self.work_log * n.bit_length()

    def output_len(self, n: int) -> int:
        return self.output_scale * n + self.output_offset

    def validate(self) -> "TMSpec":
        known = set(self.states)
        if self.start not in known:
            raise GenerationError(f"machine {self.name}: start state '{self.start}' is not declared")
        if not self.halting or not self.halting <= known:
            raise GenerationError(f"machine {self.name}: halting states must be declared states")
        for (q, a, w), t in self.delta.items():
            where = f"machine {self.name}: transition ({q}, {a}, {w})"
            if q not in known or t.state not in known:
                raise GenerationError(f"{where} uses an undeclared state")
            if q in self.halting:
                raise GenerationError(f"{where} leaves a halting state")
            if a not in INPUT_SYMBOLS or w not in WORK_SYMBOLS + (NO_WORK,):
                raise GenerationError(f"{where} reads an unknown symbol")
            if t.in_move not in MOVES or t.work_move not in MOVES:
                raise GenerationError(f"{where} moves a head by more than one cell")
            if t.work_write not in (None,) + WORK_SYMBOLS or t.out not in (None, "0", "1"):
                raise GenerationError(f"{where} writes an unknown symbol")
        return self


class TMConfig(NamedTuple):
    state: str
    in_head: int
    work: tuple[str, ...]
    work_head: int
    out_head: int
    out_sym: Optional[str]


def start_config(tm: TMSpec, x: str) -> TMConfig:
    return TMConfig(tm.start, 0, ("0",) * tm.work_len(len(x)), 0, 0, None)


def successor(tm: TMSpec, c: TMConfig, x: str) -> Optional[TMConfig]:
    """The configuration c steps to, or None when c halts, is stuck or would leave its ranges."""
    if c.state in tm.halting:
        return None
    tape = "#" + x + "#"
    work_sym = c.work[c.work_head] if c.work else NO_WORK
    t = tm.delta.get((c.state, tape[c.in_head], work_sym))
    if t is None:
        return None
    in_head = c.in_head + t.in_move
    work_head = c.work_head + t.work_move
    if not 0 <= in_head <= len(x) + 1 or not 0 <= work_head <= max(len(c.work) - 1, 0):
        return None
    work = c.work
    if t.work_write is not None and work:
        work = work[:c.work_head] + (t.work_write,) + work[c.work_head + 1:]
    if t.out is None:
        return TMConfig(t.state, in_head, work, work_head, c.out_head, None)
    if c.out_head + 1 > tm.output_len(len(x)):
        return None
    return TMConfig(t.state, in_head, work, work_head, c.out_head + 1, t.out)


def tm_oracle(tm: TMSpec, x: str) -> str:
    """Run the machine step by step and return its output tape at halt."""
    _check_input(x)
    cap = get_settings().TM_STEP_CAP
    tape = "#" + x + "#"
    state, in_head = tm.start, 0
    work = ["0"] * tm.work_len(len(x))
    work_head = 0
    out: list[str] = []
    for _ in range(cap):
        if state in tm.halting:
            return "".join(out)
        t = tm.delta.get((state, tape[in_head], work[work_head] if work else NO_WORK))
        if t is None:
            raise NoAcceptingPath(f"machine {tm.name} is stuck in state '{state}' on input '{x}'")
        if t.work_write is not None and work:
            work[work_head] = t.work_write
        if t.out is not None:
            out.append(t.out)
        state = t.state
        in_head += t.in_move
        work_head += t.work_move
        if not 0 <= in_head < len(tape) or (work and not 0 <= work_head < len(work)):
            raise GenerationError(f"machine {tm.name} moved a head off its tape on input '{x}'")
        if len(out) > tm.output_len(len(x)):
            raise GenerationError(f"machine {tm.name} exceeds its declared output bound on input '{x}'")
    raise StepCapExceeded(f"machine {tm.name} did not halt within {cap} steps on input '{x}'")


def _check_input(x: str) -> None:
    if set(x) - {"0", "1"}:
        raise GenerationError(f"machine input '{x}' is not a binary string")


# ----- configuration enumeration and encoding -----

@dataclass(frozen=True)
class ConfigLayout:
    """Bit widths of the binary encoding of a configuration."""
    states: tuple[str, ...]
    input_positions: int
    work_len: int
    output_positions: int

    @classmethod
    def of(cls, tm: TMSpec, n: int) -> "ConfigLayout":
        return cls(tm.states, n + 2, tm.work_len(n), tm.output_len(n) + 1)

    @property
    def widths(self) -> tuple[int, ...]:
        return (
            max(1, (len(self.states) - 1).bit_length()),
            (self.input_positions - 1).bit_length(),
            self.work_len,
            (self.work_len - 1).bit_length() if self.work_len > 1 else 0,
            (self.output_positions - 1).bit_length(),
            2,
        )

    @property
    def width(self) -> int:
        return sum(self.widths)

    def count(self) -> int:
        return (len(self.states) * self.input_positions * 2 ** self.work_len
                * max(self.work_len, 1) * self.output_positions * 3)

    def encode(self, c: TMConfig) -> list[int]:
        ws, wi, ww, wh, wo, _ = self.widths
        sym = {None: [0, 0], "0": [1, 0], "1": [1, 1]}[c.out_sym]
        return (bits_of(self.states.index(c.state), ws) + bits_of(c.in_head, wi)
                + [int(b) for b in c.work] + bits_of(c.work_head, wh) + bits_of(c.out_head, wo) + sym)

    def decode(self, bits: Sequence[int]) -> TMConfig:
        parts, pos = [], 0
        for w in self.widths:
            parts.append(list(bits[pos:pos + w]))
            pos += w
        state, in_head, work, work_head, out_head, sym = parts
        out_sym = None if sym[0] == 0 else str(sym[1])
        return TMConfig(self.states[value_of(state)], value_of(in_head), tuple(str(b) for b in work),
                        value_of(work_head), value_of(out_head), out_sym)


def enumerate_configs(tm: TMSpec, n: int) -> list[TMConfig]:
    layout = ConfigLayout.of(tm, n)
    return [
        TMConfig(q, i, tuple(work), h, o, sym)
        for q, i, work, h, o, sym in itertools.product(
            tm.states,
            range(layout.input_positions),
            itertools.product(WORK_SYMBOLS, repeat=layout.work_len),
            range(max(layout.work_len, 1)),
            range(layout.output_positions),
            (None, "0", "1"),
        )
    ]


@dataclass
class ConfigMatrix:
    matrix: np.ndarray
    configs: list[TMConfig]
    index: dict[TMConfig, int]
    start: int

    @property
    def k(self) -> int:
        return len(self.configs)


def matrix_over(tm: TMSpec, x: str, configs: list[TMConfig]) -> ConfigMatrix:
    index = {c: i for i, c in enumerate(configs)}
    m = np.zeros((len(configs), len(configs)), dtype=bool)
    for i, c in enumerate(configs):
        nxt = successor(tm, c, x)
        if nxt is not None and nxt in index:
            m[i, index[nxt]] = True
    return ConfigMatrix(m, configs, index, index[start_config(tm, x)])


def build_config_matrix(tm: TMSpec, x: str) -> ConfigMatrix:
    """One-step matrix over every syntactically valid configuration for input x."""
    _check_input(x)
    layout = ConfigLayout.of(tm, len(x))
    check_cap("configuration count", layout.count(), "CONFIG_MATRIX_CAP")
    cm = matrix_over(tm, x, enumerate_configs(tm, len(x)))
    logger.debug(f"Configuration matrix of {tm.name} on '{x}': k={cm.k}, {int(cm.matrix.sum())} transitions")
    return cm


def reachable_configs(tm: TMSpec, x: str) -> list[TMConfig]:
    """Configurations on the computation from the start, in order."""
    _check_input(x)
    cap = get_settings().TM_STEP_CAP
    path = [start_config(tm, x)]
    while len(path) <= cap:
        nxt = successor(tm, path[-1], x)
        if nxt is None:
            return path
        path.append(nxt)
    raise StepCapExceeded(f"machine {tm.name} did not halt within {cap} steps on input '{x}'")


def path_complete(m: np.ndarray) -> np.ndarray:
    """M := M^2 + M (Boolean), ceil(log2 k) + 1 times: paths of one or more steps."""
    m = np.asarray(m, dtype=bool)
    k = m.shape[0]
    rounds = math.ceil(math.log2(k)) + 1 if k > 1 else 1
    f = m.astype(np.float32)
    for _ in range(rounds):
        f = ((f @ f) + f > 0).astype(np.float32)
    return f > 0


def closure_oracle(m: np.ndarray) -> np.ndarray:
    """Transitive closure through networkx, for cross-checking path_complete."""
    m = np.asarray(m, dtype=bool)
    g = nx.DiGraph()
    g.add_nodes_from(range(m.shape[0]))
    g.add_edges_from(zip(*np.nonzero(m)))
    closed = nx.transitive_closure(g, reflexive=False)
    out = np.zeros_like(m)
    for i, j in closed.edges():
        out[i, j] = True
    return out


def extract_tm_output(closed: np.ndarray, cm: ConfigMatrix, tm: TMSpec, x: str) -> str:
    """Concatenate the symbols written on the start-to-halt path, by output position."""
    s = cm.start
    halts = [i for i, c in enumerate(cm.configs)
             if c.state in tm.halting and (i == s or closed[s, i])]
    if not halts:
        raise NoAcceptingPath(f"no halting configuration is reachable for {tm.name} on '{x}'")
    if len(halts) > 1:
        raise NoAcceptingPath(f"{len(halts)} halting configurations reachable; the machine is not deterministic")
    h = halts[0]
    on_path = closed[s, :] & closed[:, h]
    on_path[s] = on_path[h] = True
    writes = sorted((cm.configs[i].out_head, cm.configs[i].out_sym)
                    for i in np.nonzero(on_path)[0] if cm.configs[i].out_sym is not None)
    return "".join(sym for _, sym in writes)


def simulate_by_squaring(tm: TMSpec, x: str) -> str:
    cm = build_config_matrix(tm, x)
    return extract_tm_output(path_complete(cm.matrix), cm, tm, x)


# ----- shipped machines -----

def _machine(name, states, start, halting, delta, description, **kwargs) -> TMSpec:
    return TMSpec(name, tuple(states), start, frozenset(halting),
                  {k: TMTransition(*v) for k, v in delta.items()}, description=description, **kwargs).validate()


def copy_machine() -> TMSpec:
    return _machine(
        "copy", ("s", "q", "h"), "s", {"h"},
        {
            ("s", "#", NO_WORK): ("q", 1),
            ("q", "0", NO_WORK): ("q", 1, None, 0, "0"),
            ("q", "1", NO_WORK): ("q", 1, None, 0, "1"),
            ("q", "#", NO_WORK): ("h",),
        },
        "writes its input",
        output_scale=1,
    )


def increment_machine() -> TMSpec:
    """Binary increment modulo 2^n, MSB first.

    The input head keeps its place at the last 0 seen so far (or the left
    delimiter). Reaching the next 0, it walks back to that place and copies up
    to the new 0; reaching the end, it walks back and writes 1 then 0s.
    """
    return _machine(
        "increment", ("s", "scan", "back", "copy", "end", "zeros", "h"), "s", {"h"},
        {
            ("s", "#", NO_WORK): ("scan", 1),
            ("scan", "1", NO_WORK): ("scan", 1),
            ("scan", "0", NO_WORK): ("back", -1),
            ("scan", "#", NO_WORK): ("end", -1),
            ("back", "1", NO_WORK): ("back", -1),
            ("back", "0", NO_WORK): ("copy", 1, None, 0, "0"),
            ("back", "#", NO_WORK): ("copy", 1),
            ("copy", "1", NO_WORK): ("copy", 1, None, 0, "1"),
            ("copy", "0", NO_WORK): ("scan", 1),
            ("end", "1", NO_WORK): ("end", -1),
            ("end", "0", NO_WORK): ("zeros", 1, None, 0, "1"),
            ("end", "#", NO_WORK): ("zeros", 1),
            ("zeros", "1", NO_WORK): ("zeros", 1, None, 0, "0"),
            ("zeros", "#", NO_WORK): ("h",),
        },
        "adds one to its input, wrapping around",
        output_scale=1,
    )


def one_writer_machine() -> TMSpec:
    return _machine(
        "one-writer", ("s", "h"), "s", {"h"},
        {("s", "#", NO_WORK): ("h", 0, None, 0, "1")},
        "writes 1 and halts",
        output_offset=1,
    )


def two_writer_machine() -> TMSpec:
    return _machine(
        "two-writer", ("s", "a", "h"), "s", {"h"},
        {
            ("s", "#", NO_WORK): ("a", 0, None, 0, "1"),
            ("a", "#", NO_WORK): ("h", 0, None, 0, "0"),
        },
        "writes 10 and halts",
        output_offset=2,
    )


def unary_circuit_machine() -> TMSpec:
    """On 1^n writes the description of an n-input AND: "10" per input gate, then "11"."""
    return _machine(
        "unary-circuit", ("s", "q", "r", "f", "h"), "s", {"h"},
        {
            ("s", "#", NO_WORK): ("q", 1),
            ("q", "1", NO_WORK): ("r", 0, None, 0, "1"),
            ("r", "1", NO_WORK): ("q", 1, None, 0, "0"),
            ("q", "#", NO_WORK): ("f", 0, None, 0, "1"),
            ("f", "#", NO_WORK): ("h", 0, None, 0, "1"),
        },
        "writes a circuit description for 1^n",
        output_scale=2, output_offset=2,
    )


def unary_circuit_description(n: int) -> str:
    return "10" * n + "11"


MACHINES = {
    "copy": copy_machine,
    "increment": increment_machine,
    "one-writer": one_writer_machine,
    "two-writer": two_writer_machine,
    "unary-circuit": unary_circuit_machine,
}


def get_machine(name: str) -> TMSpec:
    try:
        return MACHINES[name]()
    except KeyError:
        raise GenerationError(f"unknown machine '{name}'", details={"known": sorted(MACHINES)}) from None


def accepts(tm: TMSpec, x: str) -> bool:
    """Whether x is in the machine's input language (unary machines take only 1s)."""
    try:
        tm_oracle(tm, x)
    except NoAcceptingPath:
        return False
    return True
