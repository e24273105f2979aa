"""Data-level simulators of the parallel constructions.

The monomer-level generators run as sequential walkers. The functions here
replay the parallel algorithms phase by phase on plain data, counting
parallel rounds, so their structure (and round counts that grow like log n)
can be checked against the same oracles. Line growth is the exception: every
iteration runs the real doubling, synchronization, tripling and masking rule
sets under kinetics and adds up their completion times.
"""
import heapq
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from app.constructions.doubling import gen_line_doubling, gen_line_tripling
from app.constructions.line_growth import line_growth_trace, parse_bits
from app.constructions.masking import gen_masking
from app.constructions.sync import gen_synchronization
from app.constructions.matrices import as_matrix, boolean_product
from app.constructions.parallel_eval import expected_output, get_fragment
from app.core.errors import VerificationFailed
from app.core.logging import logger
from app.engine.kinetics import run
from app.machines.circuits import CircuitDesc, check_input
from app.machines.tm import ConfigLayout, TMSpec, build_config_matrix, tm_oracle
from app.models.enums import GateType, StopReason
from app.models.models import ConstructionSpec


@dataclass
class Phase:
    name: str
    rounds: int = 1
    detail: dict = field(default_factory=dict)


@dataclass
class PhaseRun:
    construction: str
    result: Any = None
    phases: list[Phase] = field(default_factory=list)
    time: float = 0.0
    # expected time grows like (log n) ** time_exponent; None when only rounds are counted
    time_exponent: Optional[float] = None

    @property
    def rounds(self) -> int:
        return sum(p.rounds for p in self.phases)

    def add(self, name: str, rounds: int = 1, **detail) -> None:
        self.phases.append(Phase(name, rounds, detail))


def log_rounds(n: int) -> int:
    return math.ceil(math.log2(n)) if n > 1 else 0


# ----- line growth -----

def run_primitive(spec: ConstructionSpec, rng: np.random.Generator) -> tuple[Any, float]:
    """Run a construction to its target; the decoded result and the elapsed time."""
    trajectory = run(spec.initial, spec.rules, stop=spec.target, record=False, rng=rng)
    if trajectory.stop_reason != StopReason.TARGET:
        raise VerificationFailed(
            f"{spec.name} stopped ({trajectory.stop_reason.value}) before its target",
            details={"params": spec.params, "events": trajectory.event_count},
        )
    return spec.decode(trajectory.terminal), trajectory.total_time


def line_growth_phases(bits: str, seed: int = 1) -> PhaseRun:
    """One iteration per bit, least significant first, each primitive run under kinetics.

    Registers shorter than two monomers are doubled or tripled directly: the
    doubling and tripling rule sets need a pair to work on.
    """
    n = parse_bits(bits)
    rng = np.random.default_rng(seed)
    out = PhaseRun("line-growth", time_exponent=2.0)
    line, generator, mask = 0, 1, 1
    for k, b in enumerate(reversed(bits)):
        if mask >= 2:
            mask, dt = run_primitive(gen_line_doubling(mask), rng)
            out.time += dt
        else:
            mask *= 2
        if generator >= 2:
            received, dt = run_primitive(gen_synchronization(generator, int(b)), rng)
            out.time += dt
            if received != (int(b), generator):
                raise VerificationFailed(f"generator line received {received}", details={"bit": b})
        if b == "0":
            if generator >= 2:
                generator, dt = run_primitive(gen_line_doubling(generator), rng)
                out.time += dt
            else:
                generator *= 2
            out.add(f"iteration {k}", rounds=1, bit=0, line=line, generator=generator, mask=mask)
            continue
        if generator >= 2:
            generator, dt = run_primitive(gen_line_tripling(generator), rng)
            out.time += dt
        else:
            generator *= 3
        if generator > mask:
            difference, dt = run_primitive(gen_masking(generator, mask), rng)
            out.time += dt
        else:
            difference = 0
        line += difference
        generator = mask
        out.add(f"iteration {k}", rounds=2, bit=1, line=line, generator=generator, mask=mask)

    expected = line_growth_trace(bits)
    got = [(p.detail["line"], p.detail["generator"], p.detail["mask"]) for p in out.phases]
    if got != expected or line != n:
        raise VerificationFailed(f"line growth for '{bits}' diverged", details={"got": got, "expected": expected})
    out.result = line
    logger.debug(f"Line growth {bits}: length {line} after {len(bits)} iterations, t={out.time:.2f}")
    return out


# ----- sorting -----

def sort_phases(values: Sequence[int]) -> PhaseRun:
    """Rods, labels, then log n rounds of pairwise merges of sorted runs."""
    values = list(values)
    n = len(values)
    out = PhaseRun("sort")
    out.add("rods", rounds=1, heights=[v + 1 for v in values])
    out.add("labels", rounds=1, labels=list(range(n)))
    runs = [[v] for v in values]
    r = 0
    while len(runs) > 1:
        # runs whose label has bit r clear absorb their right neighbour
        runs = [list(heapq.merge(*runs[i:i + 2])) for i in range(0, len(runs), 2)]
        out.add(f"merge {r}", rounds=1, runs=len(runs))
        r += 1
    out.add("rotate", rounds=1)
    out.result = runs[0] if runs else []
    return out


# ----- pair evaluation -----

def pair_eval_phases(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], fragment: Any = "and") -> PhaseRun:
    """Duplicate A and B into an n x n grid of pairs, apply F everywhere, unfold row by row."""
    if isinstance(fragment, str):
        fragment = get_fragment(fragment)
    n = len(a)
    out = PhaseRun("parallel-eval")
    out.add("copy and rotate B", rounds=1)
    copies = 1
    while copies < n:
        copies *= 2
        out.add("duplicate A", rounds=1, copies=copies)
    out.add("duplicate B segments", rounds=log_rounds(n), copies=n)
    grid = [[(a_i, b_j) for a_i in a] for b_j in b]
    results = [[fragment.apply(x, y) for x, y in row] for row in grid]
    out.add("apply F", rounds=1, fragment=fragment.name)
    line: list[list[int]] = []
    for row in results:
        line.extend(row)
    out.add("unfold", rounds=log_rounds(n) + 1, rows=n)
    out.result = line
    if line != expected_output(a, b, fragment):
        raise VerificationFailed("pair evaluation phases disagree with direct evaluation")
    return out


# ----- matrix multiplication -----

def matmul_phases(a, b) -> PhaseRun:
    """Pair every A element with every B element, keep matching k, sort by (i, j, k), OR-fold over k."""
    a, b = as_matrix(a), as_matrix(b)
    n = a.shape[0]
    out = PhaseRun("matmul")
    left = [(i, k, int(a[i, k])) for i in range(n) for k in range(n)]
    right = [(k, j, int(b[k, j])) for k in range(n) for j in range(n)]
    paired: list[Optional[tuple[int, int, int, int]]] = []
    for k2, j, bv in right:
        for i, k1, av in left:
            paired.append((i, j, k1, av & bv) if k1 == k2 else None)
    out.add("pair elements", rounds=log_rounds(n * n) * 2 + 2, segments=len(paired))
    useful = [p for p in paired if p is not None]
    out.add("delete", rounds=1, kept=len(useful), dropped=len(paired) - len(useful))
    keyed = {(i * n + j) * n + k: v for i, j, k, v in useful}
    order = sort_phases(list(keyed)).result
    out.add("sort", rounds=log_rounds(len(order)) + 3, segments=len(order))
    column = [keyed[key] for key in order]
    width = n
    groups = [column[g:g + n] for g in range(0, len(column), n)]
    while width > 1:
        groups = [[g[t] | (g[t + 1] if t + 1 < len(g) else 0) for t in range(0, len(g), 2)] for g in groups]
        width = len(groups[0])
        out.add("or-fold", rounds=1, width=width)
    c = np.array([g[0] for g in groups], dtype=bool).reshape(n, n)
    if not np.array_equal(c, boolean_product(a, b)):
        raise VerificationFailed("matrix multiplication phases disagree with the Boolean product")
    out.result = c
    return out


# ----- configuration-matrix pipeline -----

def tm_phases(tm: TMSpec, x: str) -> PhaseRun:
    """Enumerate configurations, pair them through the transition function, square, extract."""
    cm = build_config_matrix(tm, x)
    layout = ConfigLayout.of(tm, len(x))
    out = PhaseRun("tm")
    out.add("enumerate", rounds=layout.width, configurations=cm.k)
    out.add("transition pairs", rounds=2 * log_rounds(cm.k) + 2, segments=cm.k * cm.k)
    m = cm.matrix.copy()
    squarings = log_rounds(cm.k) + 1
    for r in range(squarings):
        m = boolean_product(m, m) | m
        out.add(f"square {r}", rounds=1, entries=int(m.sum()))
    s = cm.start
    halts = [i for i, c in enumerate(cm.configs) if c.state in tm.halting and (i == s or m[s, i])]
    if len(halts) != 1:
        raise VerificationFailed(f"{len(halts)} halting configurations reachable from the start")
    h = halts[0]
    on_path = m[s, :] & m[:, h]
    on_path[s] = on_path[h] = True
    out.add("extract row and column", rounds=1, on_path=int(on_path.sum()))
    writers = [cm.configs[i] for i in np.nonzero(on_path)[0] if cm.configs[i].out_sym is not None]
    out.add("delete non-writers", rounds=1, kept=len(writers))
    by_position = {c.out_head - 1: c.out_sym for c in writers}
    order = sort_phases(list(by_position)).result
    out.add("sort by output position", rounds=log_rounds(len(order)) + 3)
    result = "".join(by_position[p] for p in order)
    out.add("compress", rounds=1)
    if result != tm_oracle(tm, x):
        raise VerificationFailed(f"machine {tm.name} phases disagree with direct execution on '{x}'")
    out.result = result
    return out


# ----- circuits -----

def circuit_phases(c: CircuitDesc, x: str) -> PhaseRun:
    """Evaluate layer by layer; result segments travel up sorted by destination address."""
    c.validate()
    check_input(c, x)
    out = PhaseRun("circuit")
    layers = c.layers()
    values: dict[int, int] = {}
    for g in layers[0]:
        if g.type == GateType.INPUT:
            values[g.id] = int(x[g.index - 1])
        else:
            values[g.id] = int(g.type == GateType.CONST1)
    out.add("dock inputs", rounds=1, inputs=len(x))
    for depth, upper in enumerate(layers[1:], start=1):
        segments = sorted((dest, values[g.id]) for g in layers[depth - 1] for dest in c.destinations(g.id))
        out.add(f"layer {depth}: sort results", rounds=log_rounds(max(len(segments), 1)) + 3, segments=len(segments))
        arriving: dict[int, list[int]] = {}
        for dest, v in segments:
            arriving.setdefault(dest, []).append(v)
        for g in upper:
            got = arriving.get(g.id, [])
            if g.type == GateType.AND:
                values[g.id] = int(all(got))
            elif g.type == GateType.OR:
                values[g.id] = int(any(got))
            else:
                values[g.id] = 1 - got[0]
        out.add(f"layer {depth}: evaluate", rounds=1, gates=len(upper))
        out.add(f"layer {depth}: delete lower layer", rounds=1)
    out.result = values[c.output]
    out.add("answer", rounds=1, value=out.result)
    return out
