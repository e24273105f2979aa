"""Padded binary counter grown right to left; states depend on `padding` only."""
from typing import Optional

from app.constructions.common import check_cap, finish, require
from app.engine.walker import D, L, R, U, Program
from app.models.enums import BondType, Direction, TimeScale
from app.models.grid import BoundingRect
from app.models.models import EMPTY, Configuration, ConstructionSpec

PREFIX = "cnt"
POSITIONS = ("b", "m", "t", "s")  # bottom, middle, top, single
RAW = {pos: f"counter_{pos}" for pos in POSITIONS}
FILLER = "p"


def pos_of(s: str) -> str:
    return s[2] if s.startswith("v") and len(s) == 3 else ""


def bit(s: str) -> int:
    return int(s[1]) if s.startswith("v") and len(s) == 3 else 0


def is_end(*positions: str):
    return lambda s, r: pos_of(s) in positions


def kind(s: str) -> str:
    return f"v{pos_of(s)}" if s.startswith("v") else s


def counter_program(padding: int) -> Program:
    values = [f"v{b}{pos}" for b in (0, 1) for pos in POSITIONS]
    value_kinds = [f"v{pos}" for pos in POSITIONS]
    adjacent: dict[tuple[str, Direction], list[str]] = {}
    for pos in POSITIONS:
        adjacent[(f"v{pos}", L)] = [FILLER, f"v{pos}", EMPTY]
        adjacent[(f"v{pos}", R)] = [FILLER, f"v{pos}", EMPTY]
    adjacent.update({
        ("vb", U): ["vm", "vt"], ("vm", U): ["vm", "vt"], ("vt", U): [EMPTY], ("vs", U): [EMPTY],
        ("vt", D): ["vm", "vb"], ("vm", D): ["vm", "vb"], ("vb", D): [EMPTY], ("vs", D): [EMPTY],
        (FILLER, L): [FILLER, *value_kinds, EMPTY], (FILLER, R): [FILLER, *value_kinds],
        (FILLER, U): [], (FILLER, D): [],
    })
    for d in (L, R, U, D):
        adjacent[("B", d)] = []

    p = Program(
        f"counter-p{padding}", PREFIX, values + [FILLER, "B"], blank="B",
        inputs={RAW[pos]: f"v1{pos}" for pos in POSITIONS},
        registers={"nz": 0, "borrow": 0, "nb": 0, "ps": "", "k": 0},
        moves=(R, L, U, D),
        bonds=(BondType.RIGID, BondType.NULL),
        ignite_dir=U,
        kind_of=kind,
        adjacent=adjacent,
    )

    # is the current column zero? head starts at its bottom
    p.label("scan").set(nz=0)
    p.label("scan_loop").set(lambda s, r: r.set(nz=r.nz | bit(s)))
    p.branch(is_end("t", "s"), "scan_top").move(U).goto("scan_loop")
    p.label("scan_top").branch(lambda s, r: r.nz == 0, "done")
    p.set(nz=0, borrow=1).seek(D, is_end("b", "s"))

    # write one decremented cell padding + 1 to the left
    p.label("dec").set(lambda s, r: r.set(nb=bit(s) ^ r.borrow, borrow=r.borrow & (1 - bit(s)), ps=pos_of(s), k=0))
    p.label("left").move(L).branch(lambda s, r: r.k == padding, "place")
    p.write(FILLER).set(lambda s, r: r.set(k=r.k + 1)).goto("left")
    p.label("place").write(lambda s, r: f"v{r.nb}{r.ps}")
    p.branch(lambda s, r: r.ps in ("t", "s"), "column_done").set(k=0)
    p.label("back").move(R).branch(lambda s, r: r.k == padding, "backed")
    p.set(lambda s, r: r.set(k=r.k + 1)).goto("back")
    p.label("backed").set(k=0, nb=0, ps="").move(U).goto("dec")
    p.label("column_done").set(k=0, nb=0, ps="", borrow=0).seek(D, is_end("b", "s")).goto("scan")

    # zero column: pad its rows on the left, then halt on its top
    p.label("done").seek(D, is_end("b", "s"))
    p.label("pad_row").set(k=0)
    p.label("pad_left").branch(lambda s, r: r.k == padding, "pad_back")
    p.move(L).write(FILLER).set(lambda s, r: r.set(k=r.k + 1)).goto("pad_left")
    p.label("pad_back").branch(lambda s, r: r.k == 0, "pad_up")
    p.move(R).set(lambda s, r: r.set(k=r.k - 1)).goto("pad_back")
    p.label("pad_up").branch(is_end("t", "s"), "finish").move(U).goto("pad_row")
    p.label("finish").halt()
    return p


def counter_input(width: int) -> Configuration:
    if width == 1:
        states = [RAW["s"]]
    else:
        states = [RAW["b"]] + [RAW["m"]] * (width - 2) + [RAW["t"]]
    return Configuration.line(states, direction=Direction.PLUS_Y)


def expected_columns(width: int, padding: int) -> list[Optional[int]]:
    """Left to right: `padding` fillers before every value, values 0 .. 2^width - 1."""
    columns: list[Optional[int]] = []
    for value in range(2 ** width):
        columns += [None] * padding + [value]
    return columns


def counter_columns(program: Program, config: Configuration, width: int) -> Optional[list[Optional[int]]]:
    """Column readings of a finished rectangle (None entries are filler columns); None if malformed."""
    if not config.monomers:
        return None
    symbols = {}
    for p, state in config.monomers.items():
        sym = program.symbol_of(state)
        if sym is None or "__" in state:
            return None
        symbols[p] = sym
    xs = [p.x for p in symbols]
    ys = [p.y for p in symbols]
    x0, x1, y0 = min(xs), max(xs), min(ys)
    if max(ys) - y0 + 1 != width or len(symbols) != (x1 - x0 + 1) * width:
        return None
    columns: list[Optional[int]] = []
    for x in range(x0, x1 + 1):
        column = [symbols.get((x, y0 + i)) for i in range(width)]
        if all(s == FILLER for s in column):
            columns.append(None)
        elif all(s is not None and s.startswith("v") for s in column):
            columns.append(sum(bit(s) << i for i, s in enumerate(column)))
        else:
            return None
    return columns


def gen_counter(width: int, padding: int) -> ConstructionSpec:
    require(width >= 1, "counter width must be at least 1", width=width)
    require(padding >= 0, "padding must not be negative", padding=padding)
    check_cap("counter width", width, "COUNTER_WIDTH_CAP")
    program = counter_program(padding)
    expected = expected_columns(width, padding)

    def decode(config: Configuration):
        return counter_columns(program, config, width)

    return finish(ConstructionSpec(
        name="counter",
        rules=program.rules(),
        initial=counter_input(width),
        target=lambda c: decode(c) == expected,
        params={"width": width, "padding": padding},
        time_scale=TimeScale.POLYNOMIAL,
        space_bound=BoundingRect((padding + 1) * 2 ** width, width),
        target_description=f"values {2 ** width - 1}..0 right to left, {padding} filler columns apart",
        decode=decode,
        program=program,
    ))
