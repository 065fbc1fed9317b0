"""Density expressions: parsing, rendering and the syntax tree.

Grammar::

    constraint := expr '=' expr
    expr       := term ('+' term)*
    term       := factor ('*' factor)*
    factor     := number | graph | name | '(' expr ')'
    graph      := 'G{' n ';' (i '-' j)* '}' | 'D{' ... '}' | alias

Numbers are integers, decimals or ``p/q`` fractions and are kept exact.
Aliases are ``K<n>``, ``E<n>``, ``C<n>`` and ``P<n>``; other names are looked
up in an environment of previously defined graphs.  Error positions are
1-based character offsets, with the end of input at ``len(text) + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Union

from ..errors import ExpressionSyntaxError, OutOfRange
from ..graphs import ALIASES, SimpleGraph, named_graph
from .decorated import DecoratedGraph, Vertex


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class GraphTerm:
    graph: Union[SimpleGraph, DecoratedGraph]
    name: Optional[str] = None


@dataclass(frozen=True)
class Sum:
    items: tuple


@dataclass(frozen=True)
class Prod:
    items: tuple


Expr = Union[Const, GraphTerm, Sum, Prod]


@dataclass(frozen=True)
class Constraint:
    lhs: Expr
    rhs: Expr

    @property
    def decorated(self) -> bool:
        return any(isinstance(g, DecoratedGraph) for g in graphs_in(self.lhs) + graphs_in(self.rhs))


def graphs_in(e: Expr) -> list:
    if isinstance(e, GraphTerm):
        return [e.graph]
    if isinstance(e, (Sum, Prod)):
        return [g for it in e.items for g in graphs_in(it)]
    return []


# -- tokenizer -------------------------------------------------------------

_NUMBER = re.compile(r"\d+(?:\.\d*)?(?:/\d+)?|\.\d+")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class _Tok:
    kind: str  # num, name, glit, dlit, op, end
    text: str
    pos: int  # 1-based


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "+*()=":
            toks.append(_Tok("op", c, i + 1))
            i += 1
            continue
        if c in "GD" and i + 1 < n and text[i + 1] == "{":
            close = text.find("}", i)
            if close < 0:
                raise ExpressionSyntaxError("unterminated graph literal", n + 1, text)
            toks.append(_Tok("glit" if c == "G" else "dlit", text[i:close + 1], i + 1))
            i = close + 1
            continue
        m = _NUMBER.match(text, i)
        if m:
            toks.append(_Tok("num", m.group(), i + 1))
            i = m.end()
            continue
        m = _NAME.match(text, i)
        if m:
            toks.append(_Tok("name", m.group(), i + 1))
            i = m.end()
            continue
        raise ExpressionSyntaxError(f"unexpected character {c!r}", i + 1, text)
    toks.append(_Tok("end", "", n + 1))
    return toks


# -- graph literals ----------------------------------------------------------

_PAIR = re.compile(r"(\d+)([-~])(\d+)")
_VERT = re.compile(r"([\[(])([A-Za-z0-9_]+)([\])])(\d+)")


def parse_simple_literal(lit: str, pos: int = 1, text: str = "") -> SimpleGraph:
    body = lit[2:-1]
    head, sep, tail = body.partition(";")
    try:
        n = int(head.strip())
    except ValueError:
        raise ExpressionSyntaxError("graph literal needs a vertex count", pos + 2, text or lit) from None
    edges = []
    for tok in tail.split() if sep else []:
        m = _PAIR.fullmatch(tok)
        if m is None or m.group(2) != "-":
            raise ExpressionSyntaxError(f"bad edge {tok!r}", pos, text or lit)
        edges.append((int(m.group(1)), int(m.group(3))))
    try:
        return SimpleGraph(n, edges)
    except OutOfRange as exc:
        raise ExpressionSyntaxError(str(exc), pos, text or lit) from None


def parse_decorated_literal(lit: str, pos: int = 1, text: str = "") -> DecoratedGraph:
    body = lit[2:-1]
    head, _, tail = body.partition(";")
    verts = []
    order = 0
    for tok in head.split():
        m = _VERT.fullmatch(tok)
        if m is None or (m.group(1) == "[") != (m.group(3) == "]"):
            raise ExpressionSyntaxError(f"bad vertex {tok!r}", pos, text or lit)
        root = None
        if m.group(1) == "[":
            order += 1
            root = order
        verts.append(Vertex(int(m.group(4)), m.group(2), root))
    edges, nonedges = [], []
    for tok in tail.split():
        m = _PAIR.fullmatch(tok)
        if m is None:
            raise ExpressionSyntaxError(f"bad pair {tok!r}", pos, text or lit)
        (edges if m.group(2) == "-" else nonedges).append((int(m.group(1)), int(m.group(3))))
    try:
        return DecoratedGraph(tuple(verts), frozenset(edges), frozenset(nonedges))
    except OutOfRange as exc:
        raise ExpressionSyntaxError(str(exc), pos, text or lit) from None


# -- parser ------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, env: Optional[Mapping] = None):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.env = dict(env or {})

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg: str):
        raise ExpressionSyntaxError(msg, self.cur.pos, self.text)

    def eat(self, op: str) -> bool:
        if self.cur.kind == "op" and self.cur.text == op:
            self.i += 1
            return True
        return False

    def expr(self) -> Expr:
        items = [self.term()]
        while self.eat("+"):
            items.append(self.term())
        return items[0] if len(items) == 1 else Sum(tuple(items))

    def term(self) -> Expr:
        items = [self.factor()]
        while self.eat("*"):
            items.append(self.factor())
        return items[0] if len(items) == 1 else Prod(tuple(items))

    def factor(self) -> Expr:
        t = self.cur
        if t.kind == "num":
            self.i += 1
            try:
                return Const(Fraction(t.text))
            except ZeroDivisionError:
                raise ExpressionSyntaxError("zero denominator", t.pos, self.text) from None
        if t.kind == "glit":
            self.i += 1
            return GraphTerm(parse_simple_literal(t.text, t.pos, self.text))
        if t.kind == "dlit":
            self.i += 1
            return GraphTerm(parse_decorated_literal(t.text, t.pos, self.text))
        if t.kind == "name":
            self.i += 1
            if t.text in self.env:
                return GraphTerm(self.env[t.text], t.text)
            if t.text in ALIASES:
                return GraphTerm(named_graph(t.text), t.text)
            raise ExpressionSyntaxError(f"unknown graph name {t.text!r}", t.pos, self.text)
        if self.eat("("):
            e = self.expr()
            if not self.eat(")"):
                self.fail("expected ')'")
            return e
        if t.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {t.text!r}")

    def finish(self):
        if self.cur.kind != "end":
            self.fail(f"unexpected {self.cur.text!r}")


def parse_expression(text: str, env: Optional[Mapping] = None) -> Expr:
    p = _Parser(text, env)
    e = p.expr()
    p.finish()
    return e


def parse_constraint(text: str, env: Optional[Mapping] = None) -> Constraint:
    p = _Parser(text, env)
    lhs = p.expr()
    if not p.eat("="):
        p.fail("expected '='")
    rhs = p.expr()
    p.finish()
    return Constraint(lhs, rhs)


# -- rendering ---------------------------------------------------------------


def _render_graph(g) -> str:
    if isinstance(g, DecoratedGraph):
        return g.render()
    return str(g)


def render_expression(e: Expr) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, GraphTerm):
        return _render_graph(e.graph)
    if isinstance(e, Sum):
        return " + ".join(render_expression(it) for it in e.items)
    inner = []
    for it in e.items:
        s = render_expression(it)
        inner.append(f"({s})" if isinstance(it, Sum) else s)
    return " * ".join(inner)


def render_constraint(c: Constraint) -> str:
    """Canonical text; parsing it gives back an equal constraint."""
    return f"{render_expression(c.lhs)} = {render_expression(c.rhs)}"
