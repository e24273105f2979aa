"""Bubble sort over binary segments, MSB first, LSB on the end cell."""
from dataclasses import dataclass
from typing import Sequence

from app.constructions.common import bits_of, check_cap, is_power_of_two, require, value_of, walker_spec
from app.engine.walker import L, R, Program
from app.models.grid import BoundingRect
from app.models.models import EMPTY, Configuration, ConstructionSpec

PREFIX = "srt"
RAW_DATA = ("sort_s0", "sort_s1")
RAW_END = ("sort_e0", "sort_e1")


@dataclass(frozen=True)
class Segment:
    """A value written as w-1 data cells plus an end cell carrying the LSB."""
    bits: tuple[int, ...]

    @classmethod
    def of(cls, value: int, width: int) -> "Segment":
        return cls(tuple(bits_of(value, width)))

    @property
    def value(self) -> int:
        return value_of(self.bits)

    def raw_states(self) -> list[str]:
        *data, lsb = self.bits
        return [RAW_DATA[b] for b in data] + [RAW_END[lsb]]


def segment_width(n: int) -> int:
    return max(1, (n - 1).bit_length())


def kind(s: str) -> str:
    return "o" if s[:1] in ("o", "f") else s[:1]


def bit(s: str) -> int:
    return int(s[1]) if len(s) > 1 and s[1] in "01" else 0


def marked(s: str) -> bool:
    return kind(s) in ("d", "e") and s[2] == "1"


def with_mark(s: str, mark: int) -> str:
    return f"{s[:2]}{mark}" if kind(s) in ("d", "e") else s


def with_bit(s: str, value: int) -> str:
    return f"{s[0]}{value}1" if kind(s) in ("d", "e") else s


def to_output(s: str) -> str:
    if kind(s) == "d":
        return f"o{bit(s)}"
    if kind(s) == "e":
        return f"f{bit(s)}"
    return s


def is_kind(*kinds: str):
    return lambda s, r: kind(s) in kinds


def unmarked(s: str, r) -> bool:
    return not marked(s)


def sort_program() -> Program:
    cells = [f"{k}{b}{m}" for k in ("d", "e") for b in (0, 1) for m in (0, 1)]
    alphabet = cells + ["L", "R", "B", "o0", "o1", "f0", "f1"]
    inputs = {
        RAW_DATA[0]: "d00", RAW_DATA[1]: "d10",
        RAW_END[0]: "e00", RAW_END[1]: "e10",
    }
    adjacent = {
        ("d", L): ["d", "e", "L", EMPTY], ("d", R): ["d", "e"],
        ("e", L): ["d", "e", "L", EMPTY], ("e", R): ["d", "e", "R", EMPTY],
        ("L", L): [EMPTY], ("L", R): ["d", "e", "o"],
        ("R", L): ["e"], ("R", R): [EMPTY],
        ("o", L): ["d", "e", "L"], ("o", R): ["o", EMPTY],
        ("B", L): ["e", EMPTY], ("B", R): ["d", "e", EMPTY],
    }
    p = Program(
        "sort", PREFIX, alphabet, blank="B", inputs=inputs,
        registers={"a": 0, "b": 0, "cnt": 0, "swapped": 0, "ret": ""},
        kind_of=kind, adjacent=adjacent,
    )
    # fence the tape
    p.move(L).write("L")
    p.seek(R, lambda s, r: s == "B").write("R")

    p.label("pass").set(swapped=0).seek(L, lambda s, r: s == "L").move(R)

    # head somewhere in segment A; stop if A is the last segment
    p.label("pair").seek(R, is_kind("e")).move(R)
    p.branch(lambda s, r: s == "R", "pass_end")
    p.move(L).move(L).seek(L, is_kind("e", "L")).move(R)

    p.label("compare").set(lambda s, r: r.set(a=bit(s))).write(lambda s, r: with_mark(s, 1))
    p.seek(R, is_kind("e")).move(R).seek(R, unmarked)
    p.set(lambda s, r: r.set(b=bit(s))).write(lambda s, r: with_mark(s, 1))
    p.branch(lambda s, r: r.a < r.b, "keep")
    p.branch(lambda s, r: r.a > r.b, "swap")
    p.branch(is_kind("e"), "keep")
    p.move(L).seek(L, is_kind("e")).move(L)
    p.seek(L, lambda s, r: marked(s) or kind(s) in ("e", "L")).move(R).goto("compare")

    p.label("keep").call("unmark", "advance")
    p.label("swap").call("unmark", "swap_start")

    # exchange A and B cell by cell, marking as we go
    p.label("swap_start").move(R)
    p.label("swap_loop").set(lambda s, r: r.set(a=bit(s))).write(lambda s, r: with_mark(s, 1))
    p.seek(R, is_kind("e")).move(R).seek(R, unmarked)
    p.set(lambda s, r: r.set(b=bit(s))).write(lambda s, r: with_bit(s, r.a))
    p.move(L).seek(L, is_kind("e")).seek(L, lambda s, r: marked(s))
    p.write(lambda s, r: with_bit(s, r.b))
    p.branch(is_kind("e"), "swap_done").move(R).goto("swap_loop")
    p.label("swap_done").set(swapped=1).move(R).call("unmark", "advance")

    # from B's end leftwards through A; returns standing left of A
    p.label("unmark").seek(R, is_kind("e")).set(cnt=0)
    p.label("unmark_loop").branch(lambda s, r: kind(s) in ("e", "L") and r.cnt == 2, "unmark_done")
    p.set(lambda s, r: r.set(cnt=r.cnt + 1) if kind(s) == "e" else r)
    p.write(lambda s, r: with_mark(s, 0)).move(L).goto("unmark_loop")
    p.label("unmark_done").set(cnt=0).ret()

    p.label("advance").move(R).seek(R, is_kind("e")).move(R).goto("pair")

    p.label("pass_end").branch(lambda s, r: r.swapped == 1, "pass")
    p.erase(L)
    p.label("output").branch(lambda s, r: s == "L", "output_done")
    p.write(lambda s, r: to_output(s)).move(L).goto("output")
    p.label("output_done").erase(R).halt()
    return p


def sort_input(values: Sequence[int]) -> Configuration:
    width = segment_width(len(values))
    states = [s for v in values for s in Segment.of(v, width).raw_states()]
    return Configuration.line(states)


def decode_segments(symbols: Sequence[str]) -> list[int]:
    """Values of an output tape: o cells are data bits, f cells close a segment."""
    values, current = [], []
    for s in symbols:
        if kind(s) != "o":
            raise ValueError(f"'{s}' is not an output cell")
        current.append(bit(s))
        if s[0] == "f":
            values.append(value_of(current))
            current = []
    if current:
        raise ValueError("output tape ends inside a segment")
    return values


def validate_values(values: Sequence[int]) -> None:
    n = len(values)
    require(n >= 1, "nothing to sort")
    require(is_power_of_two(n), "the number of values must be a power of two", n=n)
    check_cap("sort size", n, "SORT_CAP")
    require(len(set(values)) == n, "values must be distinct", values=list(values))
    require(all(0 <= v < n for v in values), f"values must lie in [0, {n - 1}]", values=list(values))


def gen_sort(values: Sequence[int]) -> ConstructionSpec:
    values = list(values)
    validate_values(values)
    n = len(values)
    width = segment_width(n)
    return walker_spec(
        "sort",
        sort_program(),
        sort_input(values),
        decode=decode_segments,
        expected=sorted(values),
        params={"values": values},
        time_exponent=2.0,
        space_bound=BoundingRect(n * width + 2, 1),
        description=f"{n} segments of width {width} in increasing order",
    )
