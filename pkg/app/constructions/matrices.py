"""Boolean matrices as lines of element segments, and their product.

Element (i, j) of an n x n matrix is written as one monomer holding m_ij,
then the binary index i and the binary index j, each closed by a delimiter
monomer. Indices are 1-based, MSB first, in n.bit_length() bits. Elements
appear ordered first by i, then by j.

The product walker treats the elements as records. Three flags on the heads
name the output element c, the left operand x and the right operand y; for
every c it runs x over the first matrix and, when x sits on c's row with a 1,
runs y over the second matrix looking for a 1 in the matching row and c's
column. Hits set a result digit on c, which finally replaces m.
"""
from typing import Optional, Sequence, Union

import numpy as np

from app.constructions.common import bits_of, check_cap, require, value_of, walker_spec
from app.constructions.records import (
    BLANK, DELIM, END, EQ, WALL, RecordTape, Role, bit, bit_cell, is_bit, separator,
)
from app.core.errors import GenerationError, ParseError
from app.engine.walker import L, R, Program
from app.models.grid import BoundingRect
from app.models.models import Configuration, ConstructionSpec

PREFIX = "mm"
RAW_SEPARATOR = "mat_s"
HEAD_DIGITS = ("m", "c", "x", "y", "r")

MatrixLike = Union[np.ndarray, Sequence[Sequence[int]]]


def as_matrix(m: MatrixLike) -> np.ndarray:
    a = np.asarray(m, dtype=bool)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    return a


def as_rows(m: np.ndarray) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in m)


def boolean_product(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    """C[i, j] = OR over k of A[i, k] AND B[k, j]."""
    a, b = as_matrix(a), as_matrix(b)
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def parse_matrix(text: str) -> np.ndarray:
    """Rows of 0/1 digits separated by commas or semicolons, e.g. "10,01"."""
    rows = [r.strip() for r in text.replace(";", ",").split(",") if r.strip()]
    for r, row in enumerate(rows, start=1):
        for c, ch in enumerate(row, start=1):
            if ch not in "01":
                raise ParseError(f"matrix entry '{ch}' is not 0 or 1", line=r, column=c)
    try:
        return as_matrix([[int(ch) for ch in row] for row in rows])
    except ValueError as exc:
        raise ParseError(str(exc), line=1, column=1) from None


def index_width(n: int) -> int:
    return n.bit_length()


def matrix_tokens(m: MatrixLike) -> list[str]:
    a = as_matrix(m)
    n = a.shape[0]
    w = index_width(n)
    tokens = []
    for i in range(n):
        for j in range(n):
            tokens.append(f"m{int(a[i, j])}")
            tokens += [f"b{b}" for b in bits_of(i + 1, w)] + ["d"]
            tokens += [f"b{b}" for b in bits_of(j + 1, w)] + ["d"]
    return tokens


def encode_matrix(m: MatrixLike) -> Configuration:
    return Configuration.line(f"mat_{t}" for t in matrix_tokens(m))


def decode_matrix(line: Union[Configuration, Sequence[str]]) -> np.ndarray:
    """Inverse of `encode_matrix`; accepts a configuration, raw states or bare tokens."""
    if isinstance(line, Configuration):
        points = sorted(line.monomers)
        if len({p.y for p in points}) > 1:
            raise ParseError("matrix line is not horizontal", line=1, column=1)
        line = [line.monomers[p] for p in points]
    tokens = [t[4:] if t.startswith("mat_") else t for t in line]
    elements: list[tuple[int, list[int], list[int]]] = []
    pos = 0
    while pos < len(tokens):
        head = tokens[pos]
        if head not in ("m0", "m1"):
            raise ParseError(f"expected an element monomer, found '{head}'", line=1, column=pos + 1)
        pos += 1
        fields = []
        for _ in range(2):
            field = []
            while pos < len(tokens) and tokens[pos] in ("b0", "b1"):
                field.append(int(tokens[pos][1]))
                pos += 1
            if pos >= len(tokens) or tokens[pos] != "d":
                raise ParseError("index segment is not closed by a delimiter", line=1, column=pos + 1)
            if not field:
                raise ParseError("empty index segment", line=1, column=pos + 1)
            fields.append(field)
            pos += 1
        elements.append((int(head[1]), fields[0], fields[1]))

    n = int(round(len(elements) ** 0.5))
    if n == 0 or n * n != len(elements):
        raise ParseError(f"{len(elements)} elements do not form a square matrix", line=1, column=1)
    w = index_width(n)
    out = np.zeros((n, n), dtype=bool)
    for e, (v, i_bits, j_bits) in enumerate(elements):
        want = (e // n + 1, e % n + 1)
        got = (value_of(i_bits), value_of(j_bits))
        if len(i_bits) != w or len(j_bits) != w or got != want:
            raise ParseError(f"element {e + 1} has index {got}, expected {want} in {w} bits", line=1, column=e + 1)
        out[want[0] - 1, want[1] - 1] = bool(v)
    return out


# ----- product walker -----

def product_tape(y_start: str) -> RecordTape:
    return RecordTape(
        {"h": HEAD_DIGITS},
        {
            "c": Role(WALL, "h", "c"),
            "x": Role(WALL, "h", "x"),
            "y": Role(y_start, "h", "y"),
        },
    )


def raw_inputs(rt: RecordTape) -> dict[str, str]:
    return {
        "mat_m0": rt.head("h", m=0), "mat_m1": rt.head("h", m=1),
        "mat_b0": bit_cell(0), "mat_b1": bit_cell(1),
        "mat_d": DELIM, RAW_SEPARATOR: separator(1),
    }


def emit_product(p: Program, rt: RecordTape, done: str, stem: str) -> None:
    """Set digit r of every record in the first region to its entry of the product with y's region.

    The routine ends at `done` with no role flags left set.
    """
    row, inner, col = f"{stem}_row", f"{stem}_inner", f"{stem}_col"
    x_next, y_next, c_next = f"{stem}_x_next", f"{stem}_y_next", f"{stem}_c_next"

    def m_is_zero(s, r):
        return rt.digit(s, "m") == 0

    rt.first(p, "c")
    p.label(row)
    rt.first(p, "x")
    p.label(inner)
    rt.goto(p, "x")
    p.branch(m_is_zero, x_next)
    rt.compare(p, ("x", 1), ("c", 1), f"{stem}_same_row")
    rt.unless(p, EQ, x_next)
    rt.first(p, "y")
    p.label(col)
    rt.goto(p, "y")
    p.branch(m_is_zero, y_next)
    rt.compare(p, ("y", 1), ("x", 2), f"{stem}_same_k")
    rt.unless(p, EQ, y_next)
    rt.compare(p, ("y", 2), ("c", 2), f"{stem}_same_column")
    rt.unless(p, EQ, y_next)
    rt.goto(p, "c")
    p.write(lambda s, r: rt.put(s, r=1))
    p.label(y_next)
    rt.advance(p, "y", x_next)
    p.goto(col)
    p.label(x_next)
    rt.advance(p, "x", c_next)
    p.goto(inner)
    p.label(c_next)
    rt.advance(p, "c", done)
    p.goto(row)


def matmul_program() -> Program:
    rt = product_tape(separator(1))
    p = Program(
        "matmul", PREFIX, rt.alphabet(), blank=BLANK,
        inputs=raw_inputs(rt),
        registers=rt.registers(),
        kind_of=lambda s: s[0],
        adjacent=rt.adjacency(),
    )
    p.move(L).write(WALL)
    p.seek(R, lambda s, r: s == BLANK).write(END)
    emit_product(p, rt, "collect", "mul")

    # results replace the first matrix, the second one is erased
    p.label("collect").seek(L, lambda s, r: s == WALL).move(R)
    p.label("collect_loop").branch(lambda s, r: s == separator(1), "drop")
    p.write(lambda s, r: rt.head("h", m=rt.digit(s, "r")) if rt.is_head(s) else s)
    p.move(R).goto("collect_loop")
    p.label("drop").seek(R, lambda s, r: s == END)
    p.label("drop_loop").branch(lambda s, r: s == separator(1), "drop_separator").erase(L).goto("drop_loop")
    p.label("drop_separator").erase(L).seek(L, lambda s, r: s == WALL).erase(R).halt()

    rt.define_compare(p)
    return p


def symbols_to_tokens(rt: RecordTape, symbols: Sequence[str]) -> list[str]:
    out = []
    for s in symbols:
        if rt.is_head(s, "h"):
            out.append(f"m{rt.digit(s, 'm')}")
        elif is_bit(s):
            out.append(f"b{bit(s)}")
        elif s == DELIM:
            out.append("d")
        else:
            raise ValueError(f"'{s}' is not part of a matrix")
    return out


def matmul_input(a: MatrixLike, b: MatrixLike) -> Configuration:
    states = [f"mat_{t}" for t in matrix_tokens(a)] + [RAW_SEPARATOR] + [f"mat_{t}" for t in matrix_tokens(b)]
    return Configuration.line(states)


def gen_matmul(a: MatrixLike, b: MatrixLike) -> ConstructionSpec:
    try:
        a, b = as_matrix(a), as_matrix(b)
    except ValueError as exc:
        raise GenerationError(str(exc)) from None
    require(a.shape == b.shape, "matrices must have the same size", a=list(a.shape), b=list(b.shape))
    n = a.shape[0]
    check_cap("matrix size", n, "MATMUL_CAP")
    program = matmul_program()
    rt = product_tape(separator(1))
    initial = matmul_input(a, b)

    def decode(symbols: list[str]) -> Optional[tuple]:
        return as_rows(decode_matrix(symbols_to_tokens(rt, symbols)))

    return walker_spec(
        "matmul",
        program,
        initial,
        decode=decode,
        expected=as_rows(boolean_product(a, b)),
        params={"a": as_rows(a), "b": as_rows(b)},
        time_exponent=7.0,
        space_bound=BoundingRect(len(initial) + 2, 1),
        description=f"encoding of the {n}x{n} Boolean product",
    )
