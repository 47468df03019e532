"""Tag predicate language: parser and evaluator.

Grammar (lowest to highest precedence):

    expr  := or
    or    := and ('or' and)*
    and   := unary ('and' unary)*
    unary := 'not' unary | '(' expr ')' | name cmp literal
    cmp   := '==' | '!=' | '<' | '<=' | '>' | '>='

Literals are `true`/`false`, decimal ints and decimal floats (optionally
signed). The left side of a comparison is normally an attribute name but
may also be a literal, so constant filters like `true == true` work.
Comparisons coerce numerically (booleans count as 1/0), so evaluation is
total: an attribute absent from a tag's descriptor evaluates as 0 unless
the caller opts into strict mode.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import PredicateSyntaxError

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>==|!=|<=|>=|<|>|\(|\))
  | (?P<number>-?\d+(?:\.\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)

_KEYWORDS = {"and", "or", "not", "true", "false"}
_CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")


def _literal_text(value) -> str:
    if value is True:
        return "true"
    if value is False:
        return "false"
    return repr(value)


@dataclass(frozen=True, slots=True)
class Comparison:
    name: object  # attribute name, or None when the left side is a literal
    op: str
    literal: object  # bool, int or float
    lhs_literal: object = None

    def text(self) -> str:
        lhs = self.name if self.name is not None else _literal_text(self.lhs_literal)
        return f"{lhs} {self.op} {_literal_text(self.literal)}"


@dataclass(frozen=True, slots=True)
class Not:
    child: object

    def text(self) -> str:
        return f"not ({self.child.text()})"


@dataclass(frozen=True, slots=True)
class And:
    parts: tuple

    def text(self) -> str:
        return " and ".join(f"({p.text()})" for p in self.parts)


@dataclass(frozen=True, slots=True)
class Or:
    parts: tuple

    def text(self) -> str:
        return " or ".join(f"({p.text()})" for p in self.parts)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PredicateSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append((m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message):
        kind, value, pos = self.peek()
        shown = "end of input" if kind == "end" else repr(value)
        raise PredicateSyntaxError(f"{message}, found {shown}", pos)

    def parse_expr(self):
        node = self.parse_and()
        parts = [node]
        while self.peek()[:2] == ("ident", "or"):
            self.advance()
            parts.append(self.parse_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def parse_and(self):
        parts = [self.parse_unary()]
        while self.peek()[:2] == ("ident", "and"):
            self.advance()
            parts.append(self.parse_unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def parse_unary(self):
        kind, value, pos = self.peek()
        if (kind, value) == ("ident", "not"):
            self.advance()
            return Not(self.parse_unary())
        if (kind, value) == ("op", "("):
            self.advance()
            node = self.parse_expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail("expected ')'")
            self.advance()
            return node
        if kind == "ident" and value not in _KEYWORDS:
            self.advance()
            return self.parse_comparison(name=value)
        if kind == "number" or (kind, value) in (("ident", "true"), ("ident", "false")):
            lhs = self.parse_literal()
            return self.parse_comparison(lhs_literal=lhs)
        self.fail("expected 'not', '(' or an attribute name")

    def parse_literal(self):
        kind, value, pos = self.peek()
        if kind == "number":
            self.advance()
            return float(value) if "." in value else int(value)
        if (kind, value) == ("ident", "true"):
            self.advance()
            return True
        if (kind, value) == ("ident", "false"):
            self.advance()
            return False
        self.fail("expected a literal (true/false or a number)")

    def parse_comparison(self, name=None, lhs_literal=None):
        kind, op, pos = self.peek()
        if kind != "op" or op not in _CMP_OPS:
            self.fail("expected a comparison operator")
        self.advance()
        literal = self.parse_literal()
        return Comparison(name=name, op=op, literal=literal, lhs_literal=lhs_literal)


def parse_predicate(text: str):
    """Parse predicate text into an AST; raises PredicateSyntaxError with position."""
    parser = _Parser(_tokenize(text))
    node = parser.parse_expr()
    if parser.peek()[0] != "end":
        parser.fail("unexpected trailing input")
    return node


def predicate_names(node) -> set:
    """All attribute names referenced by a predicate."""
    if isinstance(node, Comparison):
        return set() if node.name is None else {node.name}
    if isinstance(node, Not):
        return predicate_names(node.child)
    names: set = set()
    for part in node.parts:
        names |= predicate_names(part)
    return names


def evaluate(node, getter) -> bool:
    """Evaluate against `getter(name) -> value`. Numeric coercion makes this
    total as long as the getter returns a value for every name."""
    if isinstance(node, Comparison):
        v = getter(node.name) if node.name is not None else node.lhs_literal
        lit = node.literal
        op = node.op
        if op == "==":
            return v == lit
        if op == "!=":
            return v != lit
        if op == "<":
            return v < lit
        if op == "<=":
            return v <= lit
        if op == ">":
            return v > lit
        return v >= lit
    if isinstance(node, Not):
        return not evaluate(node.child, getter)
    if isinstance(node, And):
        return all(evaluate(p, getter) for p in node.parts)
    if isinstance(node, Or):
        return any(evaluate(p, getter) for p in node.parts)
    raise TypeError(f"not a predicate node: {node!r}")
