"""Shift and lift synchronization of a line."""
from dataclasses import dataclass
from typing import Iterable, Optional

from app.constructions.common import bare_line, finish, require
from app.models.enums import BondType, Direction
from app.models.grid import BoundingRect
from app.models.models import EMPTY, Configuration, ConstructionSpec, Rule

RIGID, NULL = BondType.RIGID, BondType.NULL
PX, MY, MW = Direction.PLUS_X, Direction.MINUS_Y, Direction.MINUS_W

PARITIES = ("a", "b")
LINE_KINDS = ("i", "e")  # interior, end


def other(parity: str) -> str:
    return "b" if parity == "a" else "a"


def parity_at(index: int) -> str:
    return PARITIES[index % 2]


@dataclass(frozen=True)
class SyncStates:
    """State names of one synchronization alphabet.

    `payloads` are tags carried through the protocol unchanged, so a caller
    can tell its monomers apart again after the broadcast.
    """
    prefix: str = "sync"
    payloads: tuple[str, ...] = ("",)
    bits: tuple[int, ...] = (0, 1)

    def line(self, p: str, t: str = "") -> str:
        return f"{self.prefix}_{p}{t}"

    def marked(self, p: str, t: str, kind: str) -> str:
        return f"{self.prefix}_{p}{t}_m{kind}"

    def waiting(self, p: str, t: str, kind: str) -> str:
        return f"{self.prefix}_{p}{t}_w{kind}"

    def received(self, bit: int, p: str, t: str = "") -> str:
        return f"{self.prefix}_{p}{t}_r{bit}"

    def pending(self, p: str, t: str) -> str:
        return f"{self.prefix}_{p}{t}_x"

    def head(self, bit: int, t: str = "") -> str:
        return f"{self.prefix}_h{bit}{t}"

    def head_z(self, t: str) -> str:
        return f"{self.prefix}_h1{t}_z"

    def head_wait(self, bit: int, t: str) -> str:
        return f"{self.prefix}_h{bit}{t}_w"

    def sync(self, p: str, kind: str, lb: int, rb: int) -> str:
        return f"{self.prefix}_s{p}{kind}{lb}{rb}"

    def helper(self, name: str) -> str:
        return f"{self.prefix}_{name}"

    # ----- state families -----

    def sync_states(self) -> list[tuple[str, str, int, int]]:
        """(parity, kind, left bonded, right bonded) of every synchronization monomer state."""
        found = []
        for rb in (0, 1):
            if 0 in self.bits:
                found.append(("a", "h", 0, rb))
            if 1 in self.bits:
                found.append(("a", "l", 0, rb))
        for p in PARITIES:
            for lb in (0, 1):
                for rb in (0, 1):
                    found.append((p, "i", lb, rb))
                found.append((p, "e", lb, 0))
        return found

    def line_family(self, p: str) -> list[str]:
        """Every state a non-head line monomer of parity p can be in."""
        states = []
        for t in self.payloads:
            states.append(self.line(p, t))
            for kind in LINE_KINDS:
                states += [self.marked(p, t, kind), self.waiting(p, t, kind)]
            states += [self.received(bit, p, t) for bit in self.bits]
            if 0 in self.bits:
                states.append(self.pending(p, t))
        return states

    def received_states(self, bit: Optional[int] = None) -> set[str]:
        bits = self.bits if bit is None else (bit,)
        return {self.received(b, p, t) for b in bits for p in PARITIES for t in self.payloads}

    def sync_names(self) -> set[str]:
        return {self.sync(*s) for s in self.sync_states()}


def sync_rules(states: SyncStates = SyncStates()) -> list[Rule]:
    rules: list[Rule] = []
    add = rules.append

    for t in states.payloads:
        for p in PARITIES:
            for neighbour in states.line_family(other(p)):
                add(Rule(states.line(p, t), neighbour, RIGID, PX,
                         states.marked(p, t, "i"), neighbour, RIGID, PX,
                         comment="sync: has a right neighbour"))
            add(Rule(states.line(p, t), EMPTY, NULL, PX,
                     states.marked(p, t, "e"), EMPTY, NULL, PX,
                     comment="sync: rightmost monomer"))
            for kind in LINE_KINDS:
                add(Rule(states.marked(p, t, kind), EMPTY, NULL, MY,
                         states.waiting(p, t, kind), states.sync(p, kind, 0, 0), RIGID, MY,
                         comment="sync: grow the synchronization monomer below"))
            add(Rule(states.waiting(p, t, "i"), states.sync(p, "i", 1, 1), RIGID, MY,
                     states.waiting(p, t, "i"), states.sync(p, "i", 1, 1), NULL, MY,
                     comment="sync: both horizontal bonds held, release"))
            add(Rule(states.waiting(p, t, "e"), states.sync(p, "e", 1, 0), RIGID, MY,
                     states.waiting(p, t, "e"), states.sync(p, "e", 1, 0), NULL, MY,
                     comment="sync: left bond held at the end, release"))

        if 0 in states.bits:
            add(Rule(states.head(0, t), EMPTY, NULL, MY,
                     states.head_wait(0, t), states.sync("a", "h", 0, 0), RIGID, MY,
                     comment="sync: head grows the shift monomer"))
            add(Rule(states.head_wait(0, t), states.sync("a", "h", 0, 1), RIGID, MY,
                     states.received(0, "a", t), states.sync("a", "h", 0, 1), NULL, MW,
                     comment="sync: shift the whole row right; blocked until every vertical bond is gone"))
            for p in PARITIES:
                for q, kind, lb, rb in states.sync_states():
                    if q == p:
                        continue
                    below = states.sync(q, kind, lb, rb)
                    add(Rule(states.waiting(p, t, "i"), below, NULL, MY,
                             states.received(0, p, t), EMPTY, NULL, MY,
                             comment="sync: other parity below means shifted; take 0"))
                    add(Rule(states.waiting(p, t, "e"), below, NULL, MY,
                             states.pending(p, t), EMPTY, NULL, MY,
                             comment="sync: shifted at the end; take 0"))
                for s in states.sync_states():
                    add(Rule(states.pending(p, t), states.sync(*s), NULL, MW,
                             states.received(0, p, t), EMPTY, NULL, MW,
                             comment="sync: delete the last shifted monomer"))

        if 1 in states.bits:
            z, z3 = states.helper("z"), states.helper("z3")
            add(Rule(EMPTY, states.head(1, t), NULL, PX,
                     z, states.head_z(t), RIGID, PX,
                     comment="sync: head grows the lift helper to its left"))
            add(Rule(states.head_z(t), EMPTY, NULL, MY,
                     states.head_wait(1, t), states.sync("a", "l", 0, 0), RIGID, MY,
                     comment="sync: head grows the lift monomer"))
            add(Rule(states.head_wait(1, t), states.sync("a", "l", 0, 1), RIGID, MY,
                     states.head_wait(1, t), states.sync("a", "l", 0, 1), NULL, MY,
                     comment="sync: lift monomer bonded right, release"))
            add(Rule(states.head_wait(1, t), EMPTY, NULL, MY,
                     states.received(1, "a", t), EMPTY, NULL, MY,
                     comment="sync: nothing below the head; take 1"))
            for p in PARITIES:
                for kind in LINE_KINDS:
                    add(Rule(states.waiting(p, t, kind), EMPTY, NULL, MY,
                             states.received(1, p, t), EMPTY, NULL, MY,
                             comment="sync: nothing below; take 1"))
            for head_state in (states.head_wait(1, t), states.received(1, "a", t)):
                add(Rule(z3, head_state, RIGID, PX,
                         EMPTY, head_state, NULL, PX,
                         comment="sync: remove the lift helper"))

    if 1 in states.bits:
        z, z2, z3, k, k2 = (states.helper(n) for n in ("z", "z2", "z3", "k", "k2"))
        add(Rule(z, EMPTY, NULL, MY, z2, k, RIGID, MY,
                 comment="sync: helper grows its anchor below"))
        add(Rule(k, states.sync("a", "l", 0, 1), NULL, PX,
                 k2, states.sync("a", "l", 0, 1), NULL, MW,
                 comment="sync: pull the whole row down; blocked until every vertical bond is gone"))
        add(Rule(z2, k2, RIGID, MY, z3, EMPTY, NULL, MY,
                 comment="sync: remove the anchor after the lift"))

    for p, kind, lb, rb in states.sync_states():
        if kind == "e" or rb:
            continue
        for q, kind2, lb2, rb2 in states.sync_states():
            if kind2 not in LINE_KINDS or lb2 or q == p:
                continue
            add(Rule(states.sync(p, kind, lb, rb), states.sync(q, kind2, lb2, rb2), NULL, PX,
                     states.sync(p, kind, lb, 1), states.sync(q, kind2, 1, rb2), RIGID, PX,
                     comment="sync: bond neighbouring synchronization monomers"))
    return rules


def sync_line(n: int, bit: int, states: SyncStates = SyncStates()) -> Configuration:
    require(n >= 2, "synchronization needs a line of at least 2 monomers", n=n)
    require(bit in (0, 1), "the broadcast bit must be 0 or 1", bit=bit)
    line = [states.head(bit)] + [states.line(parity_at(i)) for i in range(1, n)]
    return Configuration.line(line)


def split_received(config: Configuration, line_states: Iterable[str]) -> tuple[list[str], Configuration]:
    """The bare line made of `line_states` monomers, and everything else."""
    line_states = set(line_states)
    line = Configuration()
    rest = Configuration()
    for p, s in config.monomers.items():
        (line if s in line_states else rest).add_monomer(p, s)
    for (p, q), bond in config.bonds.items():
        if p in line.monomers and q in line.monomers:
            line.set_bond(p, q, bond)
        elif p in rest.monomers and q in rest.monomers:
            rest.set_bond(p, q, bond)
        else:
            return [], rest
    states = bare_line(line)
    return (states or []), rest


def received_bits(config: Configuration, states: SyncStates = SyncStates()) -> Optional[tuple[int, int]]:
    """(bit, line length) once every line monomer holds the same received bit; None otherwise."""
    line, rest = split_received(config, states.received_states())
    if not line:
        return None
    bits = {s.rsplit("_r", 1)[1] for s in line}
    if len(bits) != 1:
        return None
    bit = int(bits.pop())
    for i, s in enumerate(line):
        if not s.startswith(f"{states.prefix}_{parity_at(i)}"):
            return None
    line_y = _line_row(config, states.received_states())
    if bit == 0 and rest.monomers:
        return None
    if bit == 1:
        if set(rest.monomers.values()) - states.sync_names():
            return None
        if any(p.y != line_y - 2 for p in rest.monomers):
            return None
    return bit, len(line)


def _line_row(config: Configuration, line_states: set[str]) -> int:
    return next(p.y for p, s in config.monomers.items() if s in line_states)


def gen_synchronization(n: int, bit: int) -> ConstructionSpec:
    states = SyncStates()
    initial = sync_line(n, bit, states)

    def target(config: Configuration) -> bool:
        return received_bits(config, states) == (bit, n)

    return finish(ConstructionSpec(
        name="sync",
        rules=sync_rules(states),
        initial=initial,
        target=target,
        params={"n": n, "bit": bit},
        time_exponent=1.0,
        space_bound=BoundingRect(n + 1, 3),
        target_description=f"all {n} line monomers hold received bit {bit}",
        decode=lambda c: received_bits(c, states),
    ))
