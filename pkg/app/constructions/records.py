"""Walker routines over record tapes fenced by `W` and `E`.

The kind of any symbol is its first character; adjacency is declared per kind.
"""
from dataclasses import dataclass
from itertools import count
from typing import Iterable, Mapping, Optional, Sequence

from app.core.errors import GenerationError
from app.engine.walker import L, R, Act, Program
from app.models.enums import Direction
from app.models.models import EMPTY

WALL = "W"
END = "E"
DELIM = "d"
BLANK = "N"
# field cells carry two independent marks: 1 for the first operand, 2 for the second
BITS = tuple(f"x{b}{m}" for b in (0, 1) for m in range(4))

# comparison outcomes left in the `res` register
EQ, LT, GT = "eq", "lt", "gt"


def separator(i: int) -> str:
    return f"S{i}"


def bit_cell(b: int, mark: int = 0) -> str:
    return f"x{b}{mark}"


def is_bit(s: str) -> bool:
    return s in BITS


def bit(s: str) -> int:
    return int(s[1])


def mark(s: str, which: int) -> str:
    return f"{s[:2]}{int(s[2]) | which}" if is_bit(s) else s


def has_mark(s: str, which: int) -> bool:
    return is_bit(s) and int(s[2]) & which != 0


def unmark(s: str) -> str:
    return s[:2] + "0" if is_bit(s) else s


def kind(s: str) -> str:
    return s[0]


@dataclass(frozen=True)
class Role:
    start: str   # wall or separator the role's region begins after
    letter: str  # head letter of the region's records
    flag: str    # head digit marking the record that plays the role


class RecordTape:
    def __init__(self, heads: Mapping[str, Sequence[str]], roles: Mapping[str, Role], fields: int = 2):
        self.heads = {letter: tuple(names) for letter, names in heads.items()}
        self.roles = dict(roles)
        self.fields = fields
        self.compare_label = "compare"
        self._fresh = count()
        for letter in self.heads:
            if len(letter) != 1 or letter in "xdWENSo":
                raise GenerationError(f"record head letter '{letter}' clashes with a tape symbol")
        for name, role in self.roles.items():
            if role.flag not in self.heads.get(role.letter, ()):
                raise GenerationError(f"role '{name}' uses unknown flag '{role.flag}'")

    # ----- symbols -----

    def head(self, letter: str, **values: int) -> str:
        names = self.heads[letter]
        unknown = set(values) - set(names)
        if unknown:
            raise GenerationError(f"unknown head digits {sorted(unknown)} for '{letter}'")
        return letter + "".join(str(values.get(n, 0)) for n in names)

    def is_head(self, s: str, letter: Optional[str] = None) -> bool:
        names = self.heads.get(s[0]) if s else None
        if names is None or (letter is not None and s[0] != letter):
            return False
        return len(s) == 1 + len(names) and all(c in "01" for c in s[1:])

    def digit(self, s: str, name: str) -> int:
        return int(s[1 + self.heads[s[0]].index(name)])

    def put(self, s: str, **values: int) -> str:
        if not self.is_head(s):
            return s
        names = self.heads[s[0]]
        digits = list(s[1:])
        for name, v in values.items():
            digits[names.index(name)] = str(v)
        return s[0] + "".join(digits)

    def head_symbols(self) -> list[str]:
        out = []
        for letter, names in self.heads.items():
            for i in range(2 ** len(names)):
                out.append(letter + format(i, f"0{len(names)}b") if names else letter)
        return out

    def alphabet(self, extra: Iterable[str] = (), separators: int = 1) -> list[str]:
        walls = [WALL, END, BLANK] + [separator(i) for i in range(1, separators + 1)]
        return self.head_symbols() + list(BITS) + [DELIM] + walls + list(extra)

    def adjacency(self, extra: Optional[Mapping[tuple[str, Direction], list[str]]] = None):
        letters = list(self.heads)
        adj: dict[tuple[str, Direction], list[str]] = {
            ("x", L): [*letters, "x", DELIM], ("x", R): ["x", DELIM],
            (DELIM, L): ["x"], (DELIM, R): ["x", *letters, "S", END, EMPTY],
            (WALL, L): [EMPTY], (WALL, R): letters,
            ("S", L): [DELIM], ("S", R): letters,
            (END, L): [DELIM], (END, R): [EMPTY],
            (BLANK, L): [DELIM, EMPTY], (BLANK, R): [*letters, EMPTY],
        }
        for letter in letters:
            adj[(letter, L)] = [DELIM, WALL, "S", EMPTY]
            adj[(letter, R)] = ["x"]
        adj.update(extra or {})
        return adj

    def registers(self) -> dict:
        return {"pr": "", "pf": 0, "qr": "", "qf": 0, "pb": 0, "qb": 0, "res": "", "cret": ""}

    def label(self, stem: str) -> str:
        return f"{stem}_{next(self._fresh)}"

    # ----- macros -----

    def flagged(self, s: str, role: Role) -> bool:
        return self.is_head(s, role.letter) and self.digit(s, role.flag) == 1

    def goto(self, p: Program, role: Optional[str] = None, register: Optional[str] = None) -> None:
        """Walk to the head of the record playing `role` (or the role named by `register`)."""
        def pick(r) -> Role:
            return self.roles[role] if register is None else self.roles[r[register]]

        p.seek(L, lambda s, r: s == WALL)
        p.seek(R, lambda s, r: s == pick(r).start)
        p.seek(R, lambda s, r: self.flagged(s, pick(r)))

    def enter(self, p: Program, field: Optional[int] = None, register: Optional[str] = None) -> None:
        """From a head, step onto the first cell of a field (1-based)."""
        def want(r) -> int:
            return field if register is None else r[register]

        p.move(R)
        for f in range(2, self.fields + 1):
            skip = self.label("field")
            p.branch(lambda s, r, f=f: want(r) < f, skip)
            p.seek(R, lambda s, r: s == DELIM).move(R)
            p.label(skip)

    def clear(self, p: Program) -> None:
        """From a head, clear the marks of its record; stops on the next cell after it."""
        loop, done = self.label("clear"), self.label("cleared")
        p.move(R)
        p.label(loop).branch(lambda s, r: not (is_bit(s) or s == DELIM), done)
        p.write(lambda s, r: unmark(s)).move(R).goto(loop)
        p.label(done)

    def first(self, p: Program, role: str) -> None:
        """Set the role's flag on the first record of its region."""
        spec = self.roles[role]
        p.seek(L, lambda s, r: s == WALL).seek(R, lambda s, r: s == spec.start).move(R)
        p.write(lambda s, r: self.put(s, **{spec.flag: 1}))

    def advance(self, p: Program, role: str, done: str) -> None:
        """Move the role's flag to the next record; jump to `done` past the last one."""
        spec = self.roles[role]
        self.goto(p, role)
        p.write(lambda s, r: self.put(s, **{spec.flag: 0}))
        p.move(R).seek(R, lambda s, r: not (is_bit(s) or s == DELIM))
        p.branch(lambda s, r: not self.is_head(s, spec.letter), done)
        p.write(lambda s, r: self.put(s, **{spec.flag: 1}))

    def compare(self, p: Program, first: tuple[str, int], second: tuple[str, int], back: str) -> None:
        """Compare two fields as binary numbers; the outcome lands in `res` at label `back`."""
        (pr, pf), (qr, qf) = first, second
        p.set(pr=pr, pf=pf, qr=qr, qf=qf).call(self.compare_label, back, register="cret")
        p.label(back)

    def unless(self, p: Program, outcome: str, label: str) -> None:
        """Jump to `label` unless the last comparison gave `outcome`; consumes `res`."""
        p.op(lambda s, r: Act(jump=None if r.res == outcome else label, regs=r.set(res="")))

    def define_compare(self, p: Program, label: Optional[str] = None) -> None:
        """Emit the comparison routine.

        Bits are compared most significant first, one pair per round trip,
        marking each bit read with the operand's own mark, so a record may
        be compared with itself. Both records are unmarked before returning.
        """
        label = self.compare_label = label or self.compare_label
        loop, eq, lt, gt, clear = (self.label(f"{label}_{x}") for x in ("loop", "eq", "lt", "gt", "clear"))
        p.label(label)
        p.label(loop)
        self.goto(p, register="pr")
        self.enter(p, register="pf")
        p.seek(R, lambda s, r: s == DELIM or (is_bit(s) and not has_mark(s, 1)))
        p.branch(lambda s, r: s == DELIM, eq)
        p.set(lambda s, r: r.set(pb=bit(s))).write(lambda s, r: mark(s, 1))
        self.goto(p, register="qr")
        self.enter(p, register="qf")
        p.seek(R, lambda s, r: is_bit(s) and not has_mark(s, 2))
        p.set(lambda s, r: r.set(qb=bit(s))).write(lambda s, r: mark(s, 2))
        p.branch(lambda s, r: r.pb < r.qb, lt)
        p.branch(lambda s, r: r.pb > r.qb, gt)
        p.set(pb=0, qb=0).goto(loop)
        p.label(eq).set(res=EQ).goto(clear)
        p.label(lt).set(res=LT).goto(clear)
        p.label(gt).set(res=GT)
        p.label(clear)
        self.goto(p, register="pr")
        self.clear(p)
        self.goto(p, register="qr")
        self.clear(p)
        p.ret(register="cret", pr="", pf=0, qr="", qf=0, pb=0, qb=0)


def record_tokens(head: str, *fields: Sequence[int]) -> list[str]:
    """Working symbols of one record: the head, then each field's bits closed by a delimiter."""
    out = [head]
    for f in fields:
        out += [bit_cell(b) for b in f]
        out.append(DELIM)
    return out


def split_records(symbols: Sequence[str], is_head) -> list[tuple[str, list[list[int]]]]:
    """Inverse of `record_tokens` over a run of records."""
    records: list[tuple[str, list[list[int]]]] = []
    field: list[int] = []
    for i, s in enumerate(symbols):
        if is_head(s):
            if field:
                raise ValueError(f"record before position {i} ends inside a field")
            records.append((s, []))
        elif not records:
            raise ValueError(f"position {i}: '{s}' before the first record head")
        elif is_bit(s):
            field.append(bit(s))
        elif s == DELIM:
            records[-1][1].append(field)
            field = []
        else:
            raise ValueError(f"position {i}: '{s}' is not a record cell")
    if field:
        raise ValueError("tape ends inside a field")
    return records
