"""C_{i + (j-1)n} = F(A_i, B_j) over every pair of segments."""
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Optional, Sequence

from app.constructions.common import check_cap, is_power_of_two, require, walker_spec
from app.constructions.records import (
    BLANK, DELIM, END, WALL, RecordTape, Role, bit, bit_cell, has_mark, is_bit, mark, separator,
)
from app.core.errors import GenerationError
from app.engine.walker import L, R, Program
from app.models.grid import BoundingRect
from app.models.models import EMPTY, Configuration, ConstructionSpec

PREFIX = "pev"
RAW = {"head": "pe_h", 0: "pe_0", 1: "pe_1", "delim": "pe_d", "sep": "pe_s"}
OUT_DELIM = "oz"
NO_OUTPUT = -1
MAX_FRAGMENT_STATES = 64

Step = Callable[[Hashable, int, int], tuple[Hashable, Optional[int]]]


@dataclass(frozen=True)
class Fragment:
    name: str
    start: Hashable
    step: Step
    final: Callable[[Hashable], Optional[int]] = field(default=lambda state: None)

    def apply(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        if len(a) != len(b):
            raise ValueError("fragment operands differ in length")
        state, out = self.start, []
        for x, y in zip(a, b):
            state, o = self.step(state, x, y)
            if o is not None:
                out.append(o)
        last = self.final(state)
        if last is not None:
            out.append(last)
        return out

    def states(self) -> set:
        """All states reachable from start; raises GenerationError if F is malformed."""
        seen, frontier = {self.start}, [self.start]
        while frontier:
            state = frontier.pop()
            for a in (0, 1):
                for b in (0, 1):
                    try:
                        nxt, out = self.step(state, a, b)
                        hash(nxt)
                    except Exception as exc:
                        raise GenerationError(f"fragment '{self.name}' fails on ({state!r}, {a}, {b}): {exc}") from None
                    if out not in (None, 0, 1):
                        raise GenerationError(f"fragment '{self.name}' emits {out!r}, not a bit")
                    if nxt not in seen:
                        seen.add(nxt)
                        frontier.append(nxt)
                        if len(seen) > MAX_FRAGMENT_STATES:
                            raise GenerationError(f"fragment '{self.name}' has more than {MAX_FRAGMENT_STATES} states")
            if self.final(state) not in (None, 0, 1):
                raise GenerationError(f"fragment '{self.name}' ends with a non-bit")
        return seen


def _compare_step(state: str, a: int, b: int) -> tuple[str, None]:
    if state != "eq" or a == b:
        return state, None
    return ("lt" if a < b else "gt"), None


FRAGMENTS: dict[str, Fragment] = {
    "and": Fragment("and", 0, lambda s, a, b: (s, a & b)),
    "or": Fragment("or", 0, lambda s, a, b: (s, a | b)),
    "xor": Fragment("xor", 0, lambda s, a, b: (s, a ^ b)),
    "left": Fragment("left", 0, lambda s, a, b: (s, a)),
    "right": Fragment("right", 0, lambda s, a, b: (s, b)),
    "eq": Fragment("eq", 1, lambda s, a, b: (s & int(a == b), None), final=lambda s: s),
    "lt": Fragment("lt", "eq", _compare_step, final=lambda s: int(s == "lt")),
}


def get_fragment(name: str) -> Fragment:
    try:
        return FRAGMENTS[name]
    except KeyError:
        raise GenerationError(f"unknown fragment '{name}'", details={"known": sorted(FRAGMENTS)}) from None


def pair_tape() -> RecordTape:
    return RecordTape(
        {"h": ("x", "y")},
        {"x": Role(WALL, "h", "x"), "y": Role(separator(1), "h", "y")},
        fields=1,
    )


def parallel_eval_program(fragment: Fragment) -> Program:
    fragment.states()
    rt = pair_tape()
    outputs = ["o0", "o1", OUT_DELIM]
    adjacency = rt.adjacency({
        (END, R): ["o", EMPTY],
        ("o", L): ["o", END], ("o", R): ["o", EMPTY],
    })
    p = Program(
        f"parallel-eval-{fragment.name}", PREFIX, rt.alphabet(outputs), blank=BLANK,
        inputs={
            RAW["head"]: rt.head("h"), RAW[0]: bit_cell(0), RAW[1]: bit_cell(1),
            RAW["delim"]: DELIM, RAW["sep"]: separator(1),
        },
        registers={**rt.registers(), "fs": fragment.start, "ob": NO_OUTPUT},
        kind_of=lambda s: s[0],
        adjacent=adjacency,
    )

    def step(s, r):
        state, out = fragment.step(r.fs, r.pb, r.qb)
        return r.set(fs=state, ob=NO_OUTPUT if out is None else out, pb=0, qb=0)

    def finish_pair(s, r):
        last = fragment.final(r.fs)
        return r.set(fs=fragment.start, ob=NO_OUTPUT if last is None else last)

    def at_blank(s, r):
        return s == BLANK

    p.move(L).write(WALL)
    p.seek(R, at_blank).write(END)
    rt.first(p, "y")
    p.label("column")
    rt.first(p, "x")

    # one position of the current pair per round trip
    p.label("position")
    rt.goto(p, "x")
    rt.enter(p, 1)
    p.seek(R, lambda s, r: s == DELIM or (is_bit(s) and not has_mark(s, 1)))
    p.branch(lambda s, r: s == DELIM, "pair_done")
    p.set(lambda s, r: r.set(pb=bit(s))).write(lambda s, r: mark(s, 1))
    rt.goto(p, "y")
    rt.enter(p, 1)
    p.seek(R, lambda s, r: is_bit(s) and not has_mark(s, 2))
    p.set(lambda s, r: r.set(qb=bit(s))).write(lambda s, r: mark(s, 2))
    p.set(step)
    p.branch(lambda s, r: r.ob == NO_OUTPUT, "position")
    p.seek(R, at_blank).write(lambda s, r: f"o{r.ob}").set(ob=NO_OUTPUT).goto("position")

    p.label("pair_done").set(finish_pair)
    p.branch(lambda s, r: r.ob == NO_OUTPUT, "close")
    p.seek(R, at_blank).write(lambda s, r: f"o{r.ob}").set(ob=NO_OUTPUT)
    p.label("close").seek(R, at_blank).write(OUT_DELIM)
    rt.goto(p, "x")
    rt.clear(p)
    rt.goto(p, "y")
    rt.clear(p)
    rt.advance(p, "x", "next_column")
    p.goto("position")
    p.label("next_column")
    rt.advance(p, "y", "finish")
    p.goto("column")

    p.label("finish").seek(L, lambda s, r: s == WALL)
    p.label("drop").branch(lambda s, r: s[0] == "o", "done").erase(R).goto("drop")
    p.label("done").halt()
    return p


def segment_tokens(segments: Sequence[Sequence[int]]) -> list[str]:
    out = []
    for seg in segments:
        out += [RAW["head"]] + [RAW[int(b)] for b in seg] + [RAW["delim"]]
    return out


def parallel_eval_input(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Configuration:
    return Configuration.line(segment_tokens(a) + [RAW["sep"]] + segment_tokens(b))


def decode_output(symbols: Sequence[str]) -> list[list[int]]:
    segments, current = [], []
    for s in symbols:
        if s == OUT_DELIM:
            segments.append(current)
            current = []
        elif s in ("o0", "o1"):
            current.append(int(s[1]))
        else:
            raise ValueError(f"'{s}' is not an output cell")
    if current:
        raise ValueError("output ends inside a segment")
    return segments


def expected_output(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], fragment: Fragment) -> list[list[int]]:
    return [fragment.apply(a_i, b_j) for b_j in b for a_i in a]


def validate_segments(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> tuple[int, int]:
    n = len(a)
    require(n >= 1 and len(b) == n, "both lines need the same positive number of segments", a=len(a), b=len(b))
    require(is_power_of_two(n), "the number of segments must be a power of two", n=n)
    check_cap("segment count", n, "SORT_CAP")
    lengths = {len(s) for s in list(a) + list(b)}
    require(len(lengths) == 1 and min(lengths) >= 1, "all segments need the same positive length")
    require(all(v in (0, 1) for s in list(a) + list(b) for v in s), "segments hold bits only")
    return n, lengths.pop()


def gen_parallel_eval(
    a: Sequence[Sequence[int]],
    b: Sequence[Sequence[int]],
    fragment: Any = "and",
) -> ConstructionSpec:
    if isinstance(fragment, str):
        fragment = get_fragment(fragment)
    a = [[int(v) for v in s] for s in a]
    b = [[int(v) for v in s] for s in b]
    n, k = validate_segments(a, b)
    expected = expected_output(a, b, fragment)
    initial = parallel_eval_input(a, b)
    out_cells = sum(len(c) + 1 for c in expected)
    return walker_spec(
        "parallel-eval",
        parallel_eval_program(fragment),
        initial,
        decode=decode_output,
        expected=expected,
        params={"a": a, "b": b, "fragment": fragment.name},
        time_exponent=4.0,
        space_bound=BoundingRect(len(initial) + 2 + out_cells, 1),
        description=f"{n * n} segments F(A_i, B_j), i fastest, F = {fragment.name}",
    )
