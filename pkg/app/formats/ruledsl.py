"""Line-oriented text formats for rule sets (.nbr) and configurations (.nbc).

Rule sets:
    nubot-format 1
    name pds
    state a b c
    a, empty, null, +x -> a, b, rigid, +x    # appearance

Configurations:
    nubot-format 1
    monomer (0,0) a
    bond (0,0) (1,0) rigid
"""
from dataclasses import dataclass, field
from typing import Iterable, Optional

from lark import Lark, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from app.core.errors import ConfigurationError, ParseError, RuleError
from app.engine.kinetics import validate_rule
from app.models.enums import BondType, Direction
from app.models.grid import GridPoint
from app.models.models import EMPTY, Configuration, Rule

FORMAT_HEADER = "nubot-format"
FORMAT_VERSION = 1

# the lexer sees bond kinds in a configuration as plain identifiers; see parse_config
CONFIG_BONDS = (BondType.RIGID.value, BondType.FLEXIBLE.value)

GRAMMAR = r"""
rule_line: header | name_decl | state_decl | rule
config_line: header | monomer | bond

header: HEADER INT
name_decl: "name" IDENT
state_decl: "state" IDENT+
rule: side "->" side
side: IDENT "," IDENT "," BOND_TYPE "," DIRECTION

monomer: "monomer" point IDENT
bond: "bond" point point IDENT
point: "(" SIGNED_INT "," SIGNED_INT ")"

HEADER.2: "nubot-format"
BOND_TYPE: "rigid" | "flexible" | "null"
DIRECTION: /[+-][xyw]/
IDENT: /[A-Za-z0-9_]+/

%import common.INT
%import common.SIGNED_INT
%import common.WS_INLINE
%ignore WS_INLINE
"""

_parser = Lark(GRAMMAR, start=["rule_line", "config_line"], parser="lalr")


class _LineTransformer(Transformer):
    def rule_line(self, items):
        return items[0]

    config_line = rule_line

    def header(self, items):
        return ("header", int(items[1]))

    def name_decl(self, items):
        return ("name", str(items[0]))

    def state_decl(self, items):
        return ("state", [str(t) for t in items])

    def side(self, items):
        s1, s2, bond, direction = items
        return (str(s1), str(s2), BondType(str(bond)), Direction(str(direction)))

    def rule(self, items):
        lhs, rhs = items
        return ("rule", lhs, rhs)

    def point(self, items):
        return GridPoint(int(items[0]), int(items[1]))

    def monomer(self, items):
        point, state = items
        return ("monomer", point, str(state))

    def bond(self, items):
        p, q, kind = items
        return ("bond", p, q, str(kind))


_transformer = _LineTransformer()


@dataclass
class RuleSetDoc:
    name: Optional[str] = None
    states: list[str] = field(default_factory=list)
    rules: list[Rule] = field(default_factory=list)


def _split_comment(line: str) -> tuple[str, str]:
    body, _, comment = line.partition("#")
    return body.rstrip(), comment.strip()


def _parse_line(body: str, start: str, line_no: int, parser: Lark = _parser, transformer: Transformer = _transformer):
    try:
        return transformer.transform(parser.parse(body, start=start))
    except UnexpectedInput as exc:
        column = getattr(exc, "column", 0) or 0
        if isinstance(exc, UnexpectedToken):
            token = exc.token
            found = "end of line" if token.type == "$END" else f"'{token}'"
            message = f"unexpected {found}"
        elif isinstance(exc, UnexpectedCharacters):
            message = f"unexpected character '{body[exc.pos_in_stream]}'"
        elif isinstance(exc, UnexpectedEOF):
            message = "unexpected end of line"
        else:
            message = "syntax error"
        raise ParseError(message, line=line_no, column=column) from None


def _check_header(version: int, line_no: int) -> None:
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {version}", line=line_no, column=1)


def _content_lines(text: str) -> Iterable[tuple[int, str, str]]:
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body, comment = _split_comment(raw)
        if body.strip():
            yield line_no, body, comment


def parse_ruleset_doc(text: str) -> RuleSetDoc:
    doc = RuleSetDoc()
    for line_no, body, comment in _content_lines(text):
        parsed = _parse_line(body, "rule_line", line_no)
        kind = parsed[0]
        if kind == "header":
            _check_header(parsed[1], line_no)
        elif kind == "name":
            doc.name = parsed[1]
        elif kind == "state":
            if EMPTY in parsed[1]:
                raise ParseError(f"'{EMPTY}' is reserved and cannot be declared", line=line_no, column=1)
            doc.states.extend(parsed[1])
        else:
            _, lhs, rhs = parsed
            rule = Rule(*lhs, *rhs, comment=comment)
            try:
                validate_rule(rule)
            except RuleError as exc:
                raise type(exc)(f"line {line_no}: {exc.message}", details={"line": line_no}) from None
            doc.rules.append(rule)
    return doc


def parse_ruleset(text: str) -> list[Rule]:
    return parse_ruleset_doc(text).rules


def parse_config(text: str) -> Configuration:
    monomers = []
    bonds = []
    for line_no, body, _ in _content_lines(text):
        parsed = _parse_line(body, "config_line", line_no)
        if parsed[0] == "header":
            _check_header(parsed[1], line_no)
        elif parsed[0] == "monomer":
            monomers.append((line_no, parsed[1], parsed[2]))
        else:
            kind = parsed[3]
            if kind not in CONFIG_BONDS:
                raise ParseError(f"configuration bonds must be rigid or flexible, got '{kind}'", line=line_no, column=1)
            bonds.append((line_no, parsed[1], parsed[2], BondType(kind)))

    config = Configuration()
    try:
        for line_no, point, state in monomers:
            if state == EMPTY:
                raise ParseError(f"'{EMPTY}' cannot be placed in a configuration", line=line_no, column=1)
            config.add_monomer(point, state)
        for line_no, p, q, bond in bonds:
            config.set_bond(p, q, bond)
    except ConfigurationError as exc:
        raise type(exc)(f"line {line_no}: {exc.message}", details={"line": line_no}) from None
    return config


def serialize_ruleset(rules: Iterable[Rule], name: Optional[str] = None, declare_states: bool = True) -> str:
    rules = list(rules)
    lines = [f"{FORMAT_HEADER} {FORMAT_VERSION}"]
    if name:
        lines.append(f"name {name}")
    if declare_states:
        states = sorted(set().union(*(r.states() for r in rules))) if rules else []
        if states:
            lines.append("state " + " ".join(states))
    for rule in rules:
        comment = " ".join(rule.comment.split())
        lines.append(f"{rule}    # {comment}" if comment else str(rule))
    return "\n".join(lines) + "\n"


def serialize_config(config: Configuration) -> str:
    lines = [f"{FORMAT_HEADER} {FORMAT_VERSION}"]
    for p, state in sorted(config.monomers.items()):
        lines.append(f"monomer ({p.x},{p.y}) {state}")
    for (p, q), bond in sorted(config.bonds.items()):
        lines.append(f"bond ({p.x},{p.y}) ({q.x},{q.y}) {bond.value}")
    return "\n".join(lines) + "\n"


def config_from_word(word: str, zero: str = "0", one: str = "1") -> Configuration:
    """A rigid horizontal line spelling a binary word, leftmost symbol at the origin."""
    if any(c not in "01" for c in word):
        raise ValueError(f"'{word}' is not a binary word")
    return Configuration.line(one if c == "1" else zero for c in word)
