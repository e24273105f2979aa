"""Growing a line of n monomers from the binary string of n, LSB first."""
from typing import Optional

from app.constructions.common import finish, require
from app.engine.walker import D, L, R, U, Program, line_symbols
from app.models.enums import BondType, Direction, TimeScale
from app.models.grid import BoundingRect
from app.models.models import EMPTY, Configuration, ConstructionSpec

PREFIX = "lg"
RAW = ("grow_0", "grow_1")
ANCHORS = ("A", "G", "M")  # line, generator, mask


def kind(s: str) -> str:
    return "b" if s in ("b0", "b1") else s


def is_(*symbols: str):
    return lambda s, r: s in symbols


def is_anchor(s: str, r) -> bool:
    return s in ANCHORS


def line_growth_program() -> Program:
    alphabet = ["b0", "b1", "c", "W", "H", *ANCHORS, "u", "x", "n", "E", "B"]
    cells = ["u", "x", "n"]
    adjacent: dict[tuple[str, Direction], list[str]] = {
        ("b", L): ["W", "b", "c", EMPTY], ("b", R): ["b", "c", "H", EMPTY],
        ("c", L): ["W", "b", "c"], ("c", R): ["b", "c", "H"],
        ("W", R): ["b", "c"],
        ("H", L): ["b", "c"], ("H", U): ["A", EMPTY],
        ("A", D): ["H"], ("A", U): ["G", EMPTY], ("A", R): ["u", "E", EMPTY],
        ("G", D): ["A"], ("G", U): ["M", EMPTY], ("G", R): [*cells, "E", EMPTY],
        ("M", D): ["G"], ("M", R): ["u", "x", "E", EMPTY],
        ("u", L): [*ANCHORS, *cells], ("u", R): [*cells, "E", EMPTY],
        ("x", L): [*ANCHORS, *cells], ("x", R): [*cells, "E", EMPTY],
        ("n", L): [*ANCHORS, *cells], ("n", R): [*cells, "E", EMPTY],
        ("E", L): [*ANCHORS, *cells],
    }
    for k in ("b", "c", "W", "H", "A", "G", "M", "u", "x", "n", "E", "B"):
        for d in (L, R, U, D):
            adjacent.setdefault((k, d), [])

    p = Program(
        "line-growth", PREFIX, alphabet, blank="B",
        inputs={RAW[0]: "b0", RAW[1]: "b1"},
        registers={"bit": 0, "times": 2, "ret": ""},
        moves=(R, L, U, D),
        bonds=(BondType.RIGID, BondType.NULL),
        kind_of=kind,
        adjacent=adjacent,
    )

    # wall left of the input, home cell right of it, three rows above home
    p.move(L).write("W")
    p.seek(R, is_("B")).write("H")
    p.move(U).write("A").move(R).write("E").move(L)
    p.move(U).write("G").move(R).write("u").move(R).write("E").seek(L, is_("G"))
    p.move(U).write("M").move(R).write("u").move(R).write("E").seek(L, is_("M"))
    p.seek(D, is_("H"))

    p.label("read").move(L).seek(L, is_("b0", "b1", "W"))
    p.branch(is_("W"), "finish")
    p.set(lambda s, r: r.set(bit=int(s[1]))).write("c")
    p.seek(R, is_("H")).move(U).move(U).move(U)
    p.set(times=2).call("mul", "mask_done")
    p.label("mask_done").move(D).set(lambda s, r: r.set(times=2 + r.bit)).call("mul", "generator_done")
    p.label("generator_done").set(times=2).branch(lambda s, r: r.bit == 0, "iteration_done")

    # pair every mask cell with a generator cell
    p.move(U)
    p.label("pair").move(R).seek(R, is_("u", "E"))
    p.branch(is_("E"), "excess")
    p.write("x").seek(L, is_("M")).move(D).move(R).seek(R, is_("u")).write("x")
    p.seek(L, is_("G")).move(U).goto("pair")

    # unpaired generator cells each add one cell to the line
    p.label("excess").seek(L, is_("M")).move(D)
    p.label("excess_loop").move(R).seek(R, is_("u", "E"))
    p.branch(is_("E"), "trim")
    p.write("n").seek(L, is_("G")).move(D).seek(R, is_("E")).write("u").move(R).write("E")
    p.seek(L, is_("A")).move(U).goto("excess_loop")

    p.label("trim").erase(L)
    p.label("trim_loop").branch(lambda s, r: s != "n", "trimmed").erase(L).goto("trim_loop")
    p.label("trimmed").move(R).write("E").seek(L, is_("G")).call("unmark", "generator_clean")
    p.label("generator_clean").move(U).call("unmark", "iteration_done")

    p.label("iteration_done").set(bit=0, times=2).seek(D, is_("H")).goto("read")

    # multiply the row right of the current anchor by `times`
    p.label("mul").move(R)
    p.label("mul_loop").seek(R, is_("u", "n", "E"))
    p.branch(lambda s, r: s != "u", "mul_norm")
    p.write("x").seek(R, is_("E")).write("n").move(R)
    p.branch(lambda s, r: r.times == 2, "mul_end").write("n").move(R)
    p.label("mul_end").write("E").seek(L, lambda s, r: s == "x" or s in ANCHORS).move(R).goto("mul_loop")
    p.label("mul_norm").seek(L, is_anchor)

    # clear marks in the row right of the current anchor, return to the anchor
    p.label("unmark").move(R)
    p.label("unmark_loop").branch(is_("E"), "unmark_done").write("u").move(R).goto("unmark_loop")
    p.label("unmark_done").seek(L, is_anchor).ret()

    # keep only the line row
    p.label("finish").seek(R, is_("H")).move(U).move(U).move(U).seek(R, is_("E"))
    p.label("drop_mask").branch(is_("M"), "mask_gone").erase(L).goto("drop_mask")
    p.label("mask_gone").erase(D).seek(R, is_("E"))
    p.label("drop_generator").branch(is_("G"), "generator_gone").erase(L).goto("drop_generator")
    p.label("generator_gone").erase(D).seek(R, is_("E")).erase(L).seek(L, is_("A")).move(D)
    p.seek(L, is_("W"))
    p.label("drop_input").branch(is_("H"), "input_gone").erase(R).goto("drop_input")
    p.label("input_gone").erase(U).erase(R).halt()
    return p


def parse_bits(bits: str) -> int:
    require(bool(bits), "the bit string is empty")
    require(set(bits) <= {"0", "1"}, "the bit string may only contain 0 and 1", bits=bits)
    require(bits[0] == "1", "the most significant bit must be 1", bits=bits)
    return int(bits, 2)


def line_growth_trace(bits: str) -> list[tuple[int, int, int]]:
    """(line, generator, mask) after each iteration, least significant bit first."""
    parse_bits(bits)
    line, generator, mask = 0, 1, 1
    trace = []
    for b in reversed(bits):
        mask *= 2
        if b == "0":
            generator *= 2
        else:
            generator *= 3
            line += generator - mask
            generator -= generator - mask
        trace.append((line, generator, mask))
    return trace


def line_growth_input(bits: str) -> Configuration:
    return Configuration.line(RAW[int(b)] for b in bits)


def grown_length(program: Program, config: Configuration) -> Optional[int]:
    symbols = line_symbols(program, config)
    if not symbols or any(s != "u" for s in symbols):
        return None
    return len(symbols)


def gen_line_growth(bits: str) -> ConstructionSpec:
    n = parse_bits(bits)
    program = line_growth_program()

    def decode(config: Configuration):
        return grown_length(program, config)

    return finish(ConstructionSpec(
        name="line-growth",
        rules=program.rules(),
        initial=line_growth_input(bits),
        target=lambda c: decode(c) == n,
        params={"bits": bits},
        time_exponent=2.0,
        time_scale=TimeScale.POLYNOMIAL,
        space_bound=BoundingRect(len(bits) + 3 * n + 3, 4),
        target_description=f"bare line of {n} monomers",
        decode=decode,
        program=program,
    ))
