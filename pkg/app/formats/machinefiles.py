"""Text formats for Turing machines (.tm) and layered circuits (.ckt).

Machines, with B for the input delimiter, _ for "no work tape", moves L/S/R
and - for "writes nothing":
    nubot-format 1
    machine copy
    states s q h
    start s
    halt h
    work 0 0          # cells, cells per bit of n
    output 1 0        # symbols per input bit, extra symbols
    delta s B _ -> q R - S -
    delta q 0 _ -> q R - S 0

Circuits, one gate per line (id, layer, type, inputs or input number, and
optionally the destinations, which must match the wiring):
    nubot-format 1
    circuit and2
    gate 1 0 input 1 -> 3
    gate 2 0 input 2 -> 3
    gate 3 1 and 1 2
"""
from typing import Optional

from lark import Lark, Transformer

from app.core.errors import GenerationError, ParseError
from app.formats.ruledsl import FORMAT_HEADER, FORMAT_VERSION, _check_header, _content_lines, _parse_line
from app.machines.circuits import CircuitDesc, Gate
from app.machines.tm import TMSpec, TMTransition
from app.models.enums import GateType

GRAMMAR = r"""
tm_line: header | machine_decl | states_decl | start_decl | halt_decl | work_decl | output_decl | delta
ckt_line: header | circuit_decl | gate

header: HEADER INT
machine_decl: "machine" IDENT
states_decl: "states" IDENT+
start_decl: "start" IDENT
halt_decl: "halt" IDENT+
work_decl: "work" INT INT
output_decl: "output" INT INT
delta: "delta" IDENT TAPE_SYM WORK_SYM "->" IDENT MOVE WRITE MOVE WRITE

circuit_decl: "circuit" IDENT
gate: "gate" INT INT GATE_TYPE INT* dests?
dests: "->" INT+

HEADER.2: "nubot-format"
TAPE_SYM: /[01B]/
WORK_SYM: /[01_]/
MOVE: /[LSR]/
WRITE: /[01-]/
GATE_TYPE: "input" | "const0" | "const1" | "or" | "and" | "not"
IDENT: /[A-Za-z][A-Za-z0-9_-]*/

%import common.INT
%import common.WS_INLINE
%ignore WS_INLINE
"""

_parser = Lark(GRAMMAR, start=["tm_line", "ckt_line"], parser="lalr")

MOVES = {"L": -1, "S": 0, "R": 1}
MOVE_NAMES = {v: k for k, v in MOVES.items()}
DELIMITER = "B"


class _MachineTransformer(Transformer):
    def tm_line(self, items):
        return items[0]

    ckt_line = tm_line

    def header(self, items):
        return ("header", int(items[1]))

    def machine_decl(self, items):
        return ("name", str(items[0]))

    circuit_decl = machine_decl

    def states_decl(self, items):
        return ("states", [str(t) for t in items])

    def start_decl(self, items):
        return ("start", str(items[0]))

    def halt_decl(self, items):
        return ("halt", [str(t) for t in items])

    def work_decl(self, items):
        return ("work", int(items[0]), int(items[1]))

    def output_decl(self, items):
        return ("output", int(items[0]), int(items[1]))

    def delta(self, items):
        q, a, w, nq, in_move, work_write, work_move, out = (str(t) for t in items)
        key = (q, "#" if a == DELIMITER else a, w)
        return ("delta", key, TMTransition(
            nq, MOVES[in_move], None if work_write == "-" else work_write, MOVES[work_move],
            None if out == "-" else out,
        ))

    def dests(self, items):
        return [int(t) for t in items]

    def gate(self, items):
        gid, layer, kind, *rest = items
        dests = rest.pop() if rest and isinstance(rest[-1], list) else None
        return ("gate", int(gid), int(layer), GateType(str(kind)), [int(t) for t in rest], dests)


_transformer = _MachineTransformer()


def _parse(body: str, start: str, line_no: int):
    return _parse_line(body, start, line_no, parser=_parser, transformer=_transformer)


def parse_tm(text: str) -> TMSpec:
    name, states, start, halting = None, [], None, []
    work, output = (0, 0), (0, 0)
    delta: dict = {}
    for line_no, body, _ in _content_lines(text):
        parsed = _parse(body, "tm_line", line_no)
        kind = parsed[0]
        if kind == "header":
            _check_header(parsed[1], line_no)
        elif kind == "name":
            name = parsed[1]
        elif kind == "states":
            states.extend(parsed[1])
        elif kind == "start":
            start = parsed[1]
        elif kind == "halt":
            halting.extend(parsed[1])
        elif kind == "work":
            work = parsed[1:]
        elif kind == "output":
            output = parsed[1:]
        else:
            _, key, t = parsed
            if key in delta:
                raise ParseError(f"second transition for {key}", line=line_no, column=1)
            for q in (key[0], t.state):
                if q not in states:
                    raise ParseError(f"state '{q}' is not declared before use", line=line_no, column=1)
            delta[key] = t
    if start is None:
        raise ParseError("machine file has no start state", line=1, column=1)
    try:
        return TMSpec(
            name or "machine", tuple(states), start, frozenset(halting), delta,
            work_cells=work[0], work_log=work[1], output_scale=output[0], output_offset=output[1],
        ).validate()
    except GenerationError as exc:
        raise ParseError(exc.message, line=1, column=1) from None


def parse_circuit(text: str) -> CircuitDesc:
    name: Optional[str] = None
    gates: list[Gate] = []
    declared: list[tuple[int, int, Optional[list[int]]]] = []
    for line_no, body, _ in _content_lines(text):
        parsed = _parse(body, "ckt_line", line_no)
        if parsed[0] == "header":
            _check_header(parsed[1], line_no)
        elif parsed[0] == "name":
            name = parsed[1]
        else:
            _, gid, layer, kind, args, dests = parsed
            if kind == GateType.INPUT:
                if len(args) != 1:
                    raise ParseError("an input gate names exactly one input number", line=line_no, column=1)
                gates.append(Gate(gid, layer, kind, index=args[0]))
            else:
                gates.append(Gate(gid, layer, kind, tuple(args)))
            declared.append((line_no, gid, dests))
    try:
        circuit = CircuitDesc(name or "circuit", tuple(gates)).validate()
    except GenerationError as exc:
        line_no = next((ln for ln, gid, _ in declared if gid == (exc.details or {}).get("gate")), 1)
        raise ParseError(exc.message, line=line_no, column=1) from None
    for line_no, gid, dests in declared:
        if dests is not None and sorted(dests) != sorted(circuit.destinations(gid)):
            raise ParseError(
                f"gate {gid} lists destinations {dests}, but is read by {circuit.destinations(gid)}",
                line=line_no, column=1,
            )
    return circuit


def serialize_tm(tm: TMSpec) -> str:
    lines = [
        f"{FORMAT_HEADER} {FORMAT_VERSION}",
        f"machine {tm.name}",
        "states " + " ".join(tm.states),
        f"start {tm.start}",
        "halt " + " ".join(sorted(tm.halting)),
        f"work {tm.work_cells} {tm.work_log}",
        f"output {tm.output_scale} {tm.output_offset}",
    ]
    for (q, a, w), t in tm.delta.items():
        a = DELIMITER if a == "#" else a
        lines.append(
            f"delta {q} {a} {w} -> {t.state} {MOVE_NAMES[t.in_move]} {t.work_write or '-'} "
            f"{MOVE_NAMES[t.work_move]} {t.out or '-'}"
        )
    return "\n".join(lines) + "\n"


def serialize_circuit(c: CircuitDesc) -> str:
    lines = [f"{FORMAT_HEADER} {FORMAT_VERSION}", f"circuit {c.name}"]
    for g in c.ordered():
        args = [g.index] if g.type == GateType.INPUT else list(g.inputs)
        line = f"gate {g.id} {g.layer} {g.type.value} " + " ".join(str(a) for a in args)
        dests = c.destinations(g.id)
        if dests:
            line += " -> " + " ".join(str(d) for d in dests)
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"
