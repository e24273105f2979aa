"""Running a machine at monomer level by squaring its configuration matrix.

The tape holds the configuration matrix as element records (indices are
encoded configurations), then a separator, then one table record per
configuration: its code, the output position it writes to, and head digits
for "is the start", "writes" and the written symbol. An output line starts
with a marker cell past the end cell.

The walker
  1. squares the matrix in place (M := M^2 + M) until a pass changes nothing,
  2. keeps each table entry that is the start or has a 1 in the start's row,
  3. repeatedly picks the kept writer with the smallest output position and
     appends its symbol to the output line,
  4. erases everything before the output marker.

Only configurations reachable from the start are laid down, so k counts the
steps of the computation plus one.
"""
from app.constructions.common import bits_of, check_cap, walker_spec
from app.constructions.matrices import emit_product
from app.constructions.records import (
    BLANK, DELIM, END, EQ, LT, WALL, RecordTape, Role, bit_cell, separator,
)
from app.engine.walker import L, R, Program
from app.machines.tm import ConfigLayout, TMSpec, matrix_over, reachable_configs, tm_oracle
from app.models.grid import BoundingRect
from app.models.models import EMPTY, Configuration, ConstructionSpec

PREFIX = "tmp"
MATRIX_DIGITS = ("m", "c", "x", "y", "r")
TABLE_DIGITS = ("s", "w", "v", "t", "k", "b")
OUT_MARK = "oS"


def table_raw(s: int, w: int, v: int) -> str:
    return f"tmc_{s}{w}{v}"


def pipeline_tape() -> RecordTape:
    return RecordTape(
        {"h": MATRIX_DIGITS, "g": TABLE_DIGITS},
        {
            "c": Role(WALL, "h", "c"),
            "x": Role(WALL, "h", "x"),
            "y": Role(WALL, "h", "y"),
            "e": Role(WALL, "h", "x"),
            "st": Role(separator(1), "g", "s"),
            "t": Role(separator(1), "g", "t"),
            "b": Role(separator(1), "g", "b"),
        },
    )


def pipeline_program() -> Program:
    rt = pipeline_tape()
    inputs = {
        "tmm_0": rt.head("h", m=0), "tmm_1": rt.head("h", m=1),
        "tm_b0": bit_cell(0), "tm_b1": bit_cell(1), "tm_d": DELIM, "tm_s": separator(1),
    }
    for s in (0, 1):
        for w in (0, 1):
            for v in (0, 1):
                inputs[table_raw(s, w, v)] = rt.head("g", s=s, w=w, v=v)
    p = Program(
        "tm-pipeline", PREFIX, rt.alphabet([OUT_MARK, "o0", "o1"]), blank=BLANK,
        inputs=inputs,
        registers={**rt.registers(), "chg": 0, "hb": 0, "ov": 0},
        kind_of=lambda s: s[0],
        adjacent=rt.adjacency({
            (END, R): ["o", EMPTY],
            ("o", L): ["o", END], ("o", R): ["o", EMPTY],
        }),
    )

    def at(symbol):
        return lambda s, r: s == symbol

    p.move(L).write(WALL)
    p.seek(R, at(BLANK)).write(END).move(R).write(OUT_MARK)

    # 1. square until nothing changes
    p.label("square")
    emit_product(p, rt, "fold", "sq")
    p.label("fold").seek(L, at(WALL)).move(R)
    p.label("fold_loop").branch(at(separator(1)), "folded")
    p.set(lambda s, r: r.set(chg=r.chg | (rt.digit(s, "r") & (1 - rt.digit(s, "m")))) if rt.is_head(s, "h") else r)
    p.write(lambda s, r: rt.put(s, m=rt.digit(s, "m") | rt.digit(s, "r"), r=0) if rt.is_head(s, "h") else s)
    p.move(R).goto("fold_loop")
    p.label("folded").branch(lambda s, r: r.chg == 0, "extract").set(chg=0).goto("square")

    # 2. keep the start and everything in its row
    p.label("extract")
    rt.first(p, "t")
    p.label("ext_t")
    rt.goto(p, "t")
    p.branch(lambda s, r: rt.digit(s, "s") == 1, "keep")
    rt.first(p, "e")
    p.label("ext_e")
    rt.goto(p, "e")
    p.branch(lambda s, r: rt.digit(s, "m") == 0, "ext_e_next")
    rt.compare(p, ("e", 1), ("st", 1), "ext_row")
    rt.unless(p, EQ, "ext_e_next")
    rt.compare(p, ("e", 2), ("t", 1), "ext_column")
    rt.unless(p, EQ, "ext_e_next")
    rt.goto(p, "e")
    p.write(lambda s, r: rt.put(s, x=0)).goto("keep")
    p.label("ext_e_next")
    rt.advance(p, "e", "ext_t_next")
    p.goto("ext_e")
    p.label("keep")
    rt.goto(p, "t")
    p.write(lambda s, r: rt.put(s, k=1))
    p.label("ext_t_next")
    rt.advance(p, "t", "select")
    p.goto("ext_t")

    # 3. emit kept writers by increasing output position
    p.label("select").set(hb=0)
    rt.first(p, "t")
    p.label("sel_t")
    rt.goto(p, "t")
    p.branch(lambda s, r: not (rt.digit(s, "k") == 1 and rt.digit(s, "w") == 1), "sel_next")
    p.branch(lambda s, r: r.hb == 0, "take")
    rt.compare(p, ("t", 2), ("b", 2), "sel_cmp")
    rt.unless(p, LT, "sel_next")
    rt.goto(p, "b")
    p.write(lambda s, r: rt.put(s, b=0))
    p.label("take")
    rt.goto(p, "t")
    p.write(lambda s, r: rt.put(s, b=1)).set(hb=1)
    p.label("sel_next")
    rt.advance(p, "t", "emit")
    p.goto("sel_t")
    p.label("emit").branch(lambda s, r: r.hb == 0, "finish")
    rt.goto(p, "b")
    p.set(lambda s, r: r.set(ov=rt.digit(s, "v"))).write(lambda s, r: rt.put(s, b=0, k=0))
    p.seek(R, at(BLANK)).write(lambda s, r: f"o{r.ov}").set(ov=0).goto("select")

    # 4. keep only the output line
    p.label("finish").seek(L, at(WALL))
    p.label("drop").branch(at(OUT_MARK), "done").erase(R).goto("drop")
    p.label("done").halt()

    rt.define_compare(p)
    return p


def pipeline_input(tm: TMSpec, x: str) -> tuple[Configuration, int]:
    """Initial tape for machine tm on x, and the number of configurations on it."""
    configs = reachable_configs(tm, x)
    check_cap("configuration count", len(configs), "TM_CONFIG_CAP")
    layout = ConfigLayout.of(tm, len(x))
    cm = matrix_over(tm, x, configs)
    codes = [layout.encode(c) for c in configs]
    position_width = max(1, (layout.output_positions - 1).bit_length())

    states: list[str] = []
    for i, ci in enumerate(codes):
        for j, cj in enumerate(codes):
            states.append(f"tmm_{int(cm.matrix[i, j])}")
            states += [f"tm_b{b}" for b in ci] + ["tm_d"]
            states += [f"tm_b{b}" for b in cj] + ["tm_d"]
    states.append("tm_s")
    for i, c in enumerate(configs):
        writes = c.out_sym is not None
        states.append(table_raw(int(i == cm.start), int(writes), int(c.out_sym == "1")))
        states += [f"tm_b{b}" for b in codes[i]] + ["tm_d"]
        position = c.out_head - 1 if writes else 0
        states += [f"tm_b{b}" for b in bits_of(position, position_width)] + ["tm_d"]
    return Configuration.line(states), len(configs)


def decode_output(symbols: list[str]) -> str:
    if not symbols or symbols[0] != OUT_MARK:
        raise ValueError("output line must start with its marker")
    body = symbols[1:]
    if any(s not in ("o0", "o1") for s in body):
        raise ValueError("output line holds a non-output cell")
    return "".join(s[1] for s in body)


def monomer_tm_pipeline(tm: TMSpec, x: str) -> ConstructionSpec:
    expected = tm_oracle(tm, x)
    initial, k = pipeline_input(tm, x)
    return walker_spec(
        f"tm-{tm.name}",
        pipeline_program(),
        initial,
        decode=decode_output,
        expected=expected,
        params={"machine": tm.name, "input": x, "configurations": k},
        space_bound=BoundingRect(len(initial) + 3 + len(expected), 1),
        description=f"output line encoding '{expected}'",
    )
