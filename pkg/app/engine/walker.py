"""Single-head walkers compiled to nubot rules.

Compiled states are `<prefix>_<symbol>` for bare cells and
`<prefix>_<symbol>__<control>` for the cell carrying the head.
"""
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Optional

from app.core.config import get_settings
from app.core.errors import GenerationError, StepCapExceeded, TapeError
from app.core.logging import logger
from app.models.enums import BondType, Direction
from app.models.grid import GridPoint
from app.models.models import EMPTY, Configuration, Rule

R = Direction.PLUS_X
L = Direction.MINUS_X
U = Direction.PLUS_Y
D = Direction.MINUS_Y

MAX_MICRO_STEPS = 512
ANY = "*"


class Regs(Mapping):
    """Immutable register file; `regs.set(a=1)` returns an updated copy."""

    __slots__ = ("_items", "_hash")

    def __init__(self, values: Optional[Mapping[str, Any]] = None, **kwargs):
        merged = dict(values or {})
        merged.update(kwargs)
        self._items = tuple(sorted(merged.items()))
        self._hash = hash(self._items)

    def __getitem__(self, key):
        for k, v in self._items:
            if k == key:
                return v
        raise KeyError(key)

    def __getattr__(self, key):
        if key.startswith("_"):
            raise AttributeError(key)
        try:
            return self[key]
        except KeyError:
            raise AttributeError(key) from None

    def __iter__(self):
        return (k for k, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Regs) and self._items == other._items

    def set(self, **kwargs) -> "Regs":
        merged = dict(self._items)
        merged.update(kwargs)
        return Regs(merged)

    def __repr__(self):
        return "Regs(" + ", ".join(f"{k}={v!r}" for k, v in self._items) + ")"


@dataclass(frozen=True)
class Act:
    """Effect of one instruction on the current cell.

    `jump` is a label name or an instruction index; without it execution falls
    through to the next instruction.
    """
    write: Optional[str] = None
    move: Optional[Direction] = None
    jump: Any = None
    regs: Optional[Regs] = None
    halt: bool = False
    erase: bool = False


Instruction = Callable[[str, Regs], Optional[Act]]
Ctrl = tuple[int, Regs]


@dataclass(frozen=True)
class Transition:
    write: Optional[str]
    move: Optional[Direction]
    target: Optional[Ctrl]
    halt: bool = False
    erase: bool = False


@dataclass
class WalkerResult:
    tape: dict[GridPoint, str]
    steps: int
    halted: bool
    head: Optional[GridPoint] = None


class Program:
    def __init__(
        self,
        name: str,
        prefix: str,
        alphabet: Iterable[str],
        blank: str,
        inputs: Mapping[str, str],
        registers: Optional[Mapping[str, Any]] = None,
        moves: Iterable[Direction] = (R, L),
        bonds: Iterable[BondType] = (BondType.RIGID,),
        ignite_dir: Direction = R,
        halt_dir: Direction = R,
        kind_of: Optional[Callable[[str], str]] = None,
        adjacent: Optional[Mapping[tuple[str, Direction], Iterable[str]]] = None,
    ):
        self.name = name
        self.prefix = prefix
        self.alphabet = list(dict.fromkeys(alphabet))
        self.blank = blank
        self.inputs = dict(inputs)
        self.initial_regs = Regs(registers or {})
        self.moves = tuple(moves)
        self.bonds = tuple(bonds)
        self.ignite_dir = ignite_dir
        self.halt_dir = halt_dir
        self.kind_of = kind_of
        self.adjacent = {k: frozenset(v) for k, v in (adjacent or {}).items()}
        self.instructions: list[Instruction] = []
        self.labels: dict[str, int] = {}
        self._resolved: dict[tuple[Ctrl, str], Optional[Transition]] = {}
        self._explored: Optional[tuple[list[tuple[Ctrl, str]], dict[Ctrl, str]]] = None
        self._rules: Optional[list[Rule]] = None

        for sym in self.alphabet:
            if "__" in sym or not sym.isalnum():
                raise GenerationError(f"walker symbol '{sym}' must be alphanumeric")
        if blank not in self.alphabet:
            raise GenerationError(f"blank symbol '{blank}' is not in the alphabet")
        for raw, sym in self.inputs.items():
            if sym not in self.alphabet:
                raise GenerationError(f"input '{raw}' maps to unknown symbol '{sym}'")

    # ----- assembling -----

    def label(self, name: str) -> "Program":
        if name in self.labels:
            raise GenerationError(f"label '{name}' defined twice in {self.name}")
        self.labels[name] = len(self.instructions)
        return self

    def op(self, fn: Instruction) -> "Program":
        self.instructions.append(fn)
        return self

    def move(self, d: Direction) -> "Program":
        return self.op(lambda s, r: Act(move=d))

    def seek(self, d: Direction, pred: Callable[[str, Regs], bool]) -> "Program":
        """Move in d until the current cell satisfies pred (checked before moving)."""
        me = len(self.instructions)
        return self.op(lambda s, r: Act() if pred(s, r) else Act(move=d, jump=me))

    def write(self, fn) -> "Program":
        if isinstance(fn, str):
            token = fn
            return self.op(lambda s, r: Act(write=token))
        return self.op(lambda s, r: Act(write=fn(s, r)))

    def set(self, fn=None, **values) -> "Program":
        if fn is None:
            return self.op(lambda s, r: Act(regs=r.set(**values)))
        return self.op(lambda s, r: Act(regs=fn(s, r)))

    def branch(self, pred: Callable[[str, Regs], bool], label: str) -> "Program":
        return self.op(lambda s, r: Act(jump=label) if pred(s, r) else Act())

    def goto(self, label: str) -> "Program":
        return self.op(lambda s, r: Act(jump=label))

    def call(self, label: str, back: str, register: str = "ret") -> "Program":
        """Jump to a shared routine that returns with `ret()` to label `back`.

        Routines that call other routines keep their return label in a
        register of their own.
        """
        return self.op(lambda s, r: Act(jump=label, regs=r.set(**{register: back})))

    def ret(self, register: str = "ret", **reset) -> "Program":
        """Return to the saved label; `reset` clears scratch registers on the way out."""
        return self.op(lambda s, r: Act(jump=r[register], regs=r.set(**{register: ""}, **reset)))

    def halt(self, fn=None) -> "Program":
        if isinstance(fn, str):
            token = fn
            return self.op(lambda s, r: Act(write=token, halt=True))
        return self.op(lambda s, r: Act(write=fn(s, r) if fn else None, halt=True))

    def erase(self, d: Direction) -> "Program":
        return self.op(lambda s, r: Act(erase=True, move=d))

    # ----- semantics -----

    def _target_pc(self, act: Act, pc: int) -> int:
        if act.jump is None:
            return pc + 1
        if isinstance(act.jump, int):
            return act.jump
        if act.jump not in self.labels:
            raise GenerationError(f"unknown label '{act.jump}' in {self.name}")
        return self.labels[act.jump]

    def resolve(self, ctrl: Ctrl, sym: str) -> Optional[Transition]:
        """Fold non-moving instructions; None when the walker is stuck on this symbol."""
        key = (ctrl, sym)
        if key in self._resolved:
            return self._resolved[key]
        pc, regs = ctrl
        current = sym
        result = None
        for _ in range(MAX_MICRO_STEPS):
            if pc >= len(self.instructions):
                break
            act = self.instructions[pc](current, regs)
            if act is None:
                break
            if act.regs is not None:
                regs = act.regs
            if act.halt:
                result = Transition(act.write or current, None, None, halt=True)
                break
            if act.erase:
                result = Transition(None, act.move, (self._target_pc(act, pc), regs), erase=True)
                break
            if act.write is not None:
                current = act.write
            if act.move is not None:
                result = Transition(current, act.move, (self._target_pc(act, pc), regs))
                break
            pc = self._target_pc(act, pc)
        else:
            raise GenerationError(f"{self.name}: instruction loop without movement from pc={ctrl[0]}")
        if result is not None:
            if result.write is not None and result.write not in self.alphabet:
                raise GenerationError(f"{self.name}: writes unknown symbol '{result.write}'")
            if result.move is not None and result.move not in self.moves:
                raise GenerationError(f"{self.name}: moves {result.move.value}, not allowed on this tape")
        self._resolved[key] = result
        return result

    @property
    def start(self) -> Ctrl:
        return (0, self.initial_regs)

    def neighbours(self, sym: str, d: Direction) -> list[str]:
        """Working symbols, raw inputs and possibly EMPTY that may sit at d from sym."""
        kinds = None
        if self.kind_of is not None:
            kinds = self.adjacent.get((self.kind_of(sym), d))
        if kinds is None or ANY in kinds:
            return self.alphabet + sorted(self.inputs) + [EMPTY]
        found = [s for s in self.alphabet if self.kind_of(s) in kinds]
        found += [raw for raw in sorted(self.inputs) if self.kind_of(self.inputs[raw]) in kinds]
        if EMPTY in kinds:
            found.append(EMPTY)
        return found

    def working(self, state: str) -> str:
        return self.inputs.get(state, state)

    def explore(self) -> tuple[list[tuple[Ctrl, str]], dict[Ctrl, str]]:
        """Reachable (control, symbol) pairs and control names c0, c1, ... in discovery order."""
        if self._explored is not None:
            return self._explored
        names: dict[Ctrl, str] = {self.start: "c0"}
        seen: set[tuple[Ctrl, str]] = set()
        order: list[tuple[Ctrl, str]] = []
        queue = deque((self.start, self.inputs[raw]) for raw in sorted(self.inputs))

        def visit(ctrl: Ctrl, sym: str) -> None:
            if ctrl not in names:
                names[ctrl] = f"c{len(names)}"
            queue.append((ctrl, sym))

        while queue:
            pair = queue.popleft()
            if pair in seen:
                continue
            seen.add(pair)
            order.append(pair)
            ctrl, sym = pair
            t = self.resolve(ctrl, sym)
            if t is None or t.halt:
                continue
            source = sym if t.erase else t.write
            for nb in self.neighbours(source, t.move):
                if nb == EMPTY:
                    if not t.erase:
                        visit(t.target, self.blank)
                else:
                    visit(t.target, self.working(nb))
        self._explored = (order, names)
        return self._explored

    def controls(self) -> dict[Ctrl, str]:
        return self.explore()[1]

    def state(self, sym: str, ctrl: Optional[Ctrl] = None) -> str:
        if ctrl is None:
            return f"{self.prefix}_{sym}"
        return f"{self.prefix}_{sym}__{self.controls()[ctrl]}"

    def symbol_of(self, state: str) -> Optional[str]:
        """Working symbol of a state (head stripped, raw inputs converted), else None."""
        if state in self.inputs:
            return self.inputs[state]
        if not state.startswith(self.prefix + "_"):
            return None
        return state[len(self.prefix) + 1:].split("__", 1)[0]

    def _nb_state(self, nb: str) -> str:
        return nb if nb in self.inputs else self.state(nb)

    # ----- compilation -----

    def rules(self) -> list[Rule]:
        if self._rules is None:
            self._rules = self.compile()
        return self._rules

    def compile(self) -> list[Rule]:
        pairs, controls = self.explore()
        rules: list[Rule] = []
        for raw in sorted(self.inputs):
            rules.append(Rule(
                EMPTY, raw, BondType.NULL, self.ignite_dir,
                EMPTY, self.state(self.inputs[raw], self.start), BondType.NULL, self.ignite_dir,
                comment=f"{self.name}: ignite on the first input cell",
            ))
        for ctrl, sym in pairs:
            t = self.resolve(ctrl, sym)
            if t is None:
                continue
            here = self.state(sym, ctrl)
            if t.halt:
                done = self.state(t.write)
                for nb in self.neighbours(t.write, self.halt_dir):
                    if nb == EMPTY:
                        rules.append(Rule(here, EMPTY, BondType.NULL, self.halt_dir,
                                          done, EMPTY, BondType.NULL, self.halt_dir,
                                          comment=f"{self.name}: halt"))
                        continue
                    for bond in self.bonds:
                        rules.append(Rule(here, self._nb_state(nb), bond, self.halt_dir,
                                          done, self._nb_state(nb), bond, self.halt_dir,
                                          comment=f"{self.name}: halt"))
                continue
            d = t.move
            for nb in self.neighbours(sym if t.erase else t.write, d):
                if nb == EMPTY:
                    if not t.erase:
                        rules.append(Rule(here, EMPTY, BondType.NULL, d,
                                          self.state(t.write), self.state(self.blank, t.target), BondType.RIGID, d,
                                          comment=f"{self.name}: extend {d.value}"))
                    continue
                arrived = self.state(self.working(nb), t.target)
                for bond in self.bonds:
                    if t.erase:
                        rules.append(Rule(here, self._nb_state(nb), bond, d,
                                          EMPTY, arrived, BondType.NULL, d,
                                          comment=f"{self.name}: erase and step {d.value}"))
                    else:
                        rules.append(Rule(here, self._nb_state(nb), bond, d,
                                          self.state(t.write), arrived, bond, d,
                                          comment=f"{self.name}: step {d.value}"))
        logger.debug(f"Compiled walker {self.name}: {len(controls)} controls, {len(rules)} rules")
        return rules

    # ----- direct interpretation -----

    def ignition_point(self, tape: Mapping[GridPoint, str]) -> GridPoint:
        starts = [p for p, s in tape.items() if s in self.inputs and (p - self.ignite_dir) not in tape]
        if len(starts) != 1:
            raise TapeError(f"{self.name}: expected one ignition cell, found {len(starts)}")
        return starts[0]

    def _check_neighbour(self, sym: str, d: Direction, tape: Mapping[GridPoint, str], p: GridPoint) -> None:
        found = tape.get(p, EMPTY)
        if found not in self.neighbours(sym, d):
            raise TapeError(f"{self.name}: '{found}' at {d.value} of '{sym}' violates the declared adjacency")

    def run(
        self,
        config: Configuration,
        max_steps: Optional[int] = None,
        one_dimensional: bool = True,
        strict: bool = False,
    ) -> WalkerResult:
        """Execute the program directly on the tape held by `config`.

        With `strict`, every step is checked against the compiled rule set:
        the (control, symbol) pair must have been explored and the neighbour
        must be one the adjacency declaration admits.
        """
        max_steps = max_steps or get_settings().WALKER_STEP_CAP
        tape = dict(config.monomers)
        head = self.ignition_point(tape)
        tape[head] = self.inputs[tape[head]]
        ctrl = self.start
        explored = set(self.explore()[0]) if strict else None
        steps = 0
        while True:
            sym = tape[head]
            if explored is not None and (ctrl, sym) not in explored:
                raise TapeError(f"{self.name}: control {ctrl[0]} on '{sym}' was not compiled")
            t = self.resolve(ctrl, sym)
            if t is None:
                raise TapeError(f"{self.name}: stuck on '{sym}' at {head}", details={"steps": steps})
            steps += 1
            if steps > max_steps:
                raise StepCapExceeded(f"{self.name}: exceeded {max_steps} walker steps")
            if t.halt:
                if strict:
                    self._check_neighbour(t.write, self.halt_dir, tape, head + self.halt_dir)
                tape[head] = t.write
                return WalkerResult(tape=tape, steps=steps, halted=True, head=head)
            nxt = head + t.move
            if strict:
                self._check_neighbour(sym if t.erase else t.write, t.move, tape, nxt)
            if t.erase:
                if nxt not in tape:
                    raise TapeError(f"{self.name}: erase at {head} has nowhere to step")
                if one_dimensional and (head - t.move) in tape:
                    raise TapeError(f"{self.name}: erase at {head} would split the tape")
                del tape[head]
            else:
                tape[head] = t.write
                if nxt not in tape:
                    tape[nxt] = self.blank
            if tape[nxt] in self.inputs:
                tape[nxt] = self.inputs[tape[nxt]]
            head, ctrl = nxt, t.target

    def tape_states(self, tape: Mapping[GridPoint, str]) -> dict[GridPoint, str]:
        return {p: (s if s in self.inputs else self.state(s)) for p, s in tape.items()}


def line_symbols(program: Program, config: Configuration) -> Optional[list[str]]:
    """Working symbols of a bare horizontal tape, left to right; None otherwise."""
    if not config.monomers:
        return []
    points = sorted(config.monomers)
    if len({p.y for p in points}) != 1 or points[-1].x - points[0].x + 1 != len(points):
        return None
    symbols = []
    for p in points:
        state = config.monomers[p]
        sym = program.symbol_of(state)
        if sym is None or "__" in state:
            return None
        symbols.append(sym)
    return symbols


def interpret(program: Program, config: Configuration, strict: bool = False) -> tuple[Configuration, WalkerResult]:
    """Run the program directly; the final tape as bare compiled states (bonds omitted)."""
    one_dimensional = set(program.moves) <= {R, L}
    result = program.run(config, one_dimensional=one_dimensional, strict=strict)
    final = Configuration.from_parts(program.tape_states(result.tape).items())
    return final, result
