"""Constraint files.

One constraint per line in the expression grammar, ``#`` starts a comment.
Named graphs may be defined inline (``graph H = D{...}``) or with a block::

    decorated H
      parts A B
      roots [A]1 [A]2
      nonroots (B)3 (B)4
      edges 1-2 1-3 1-4 2-4
      nonedges 2-3 3-4
    end

after which ``H`` can appear in constraints, e.g. ``H = 1/16``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import ExpressionSyntaxError
from .decorated import DecoratedGraph
from .expr import Constraint, GraphTerm, parse_constraint, parse_decorated_literal, parse_expression

_DEF = re.compile(r"graph\s+([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(.+)")
_BLOCK = re.compile(r"decorated\s+([A-Za-z_][A-Za-z0-9_]*)")


@dataclass(frozen=True)
class ConstraintLine:
    line: int
    text: str
    constraint: Constraint


def _line_error(exc: ExpressionSyntaxError, line: int) -> ExpressionSyntaxError:
    msg = str(exc).rsplit(" at position", 1)[0]
    return ExpressionSyntaxError(f"line {line}: {msg}", exc.position, exc.text)


def _block_graph(fields: dict, line: int) -> DecoratedGraph:
    verts = " ".join(fields.get("roots", []) + fields.get("nonroots", []))
    pairs = list(fields.get("edges", []))
    pairs += [p.replace("-", "~") for p in fields.get("nonedges", [])]
    lit = "D{" + verts + "; " + " ".join(pairs) + "}"
    try:
        g = parse_decorated_literal(lit)
    except ExpressionSyntaxError as exc:
        raise _line_error(exc, line) from None
    declared = fields.get("parts")
    if declared is not None and not g.labels <= set(declared):
        raise ExpressionSyntaxError(f"line {line}: labels {sorted(g.labels - set(declared))} not declared", 1)
    return g


def parse_constraint_text(text: str) -> list[ConstraintLine]:
    env: dict = {}
    out: list[ConstraintLine] = []
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        no = i + 1
        raw = lines[i].split("#", 1)[0].strip()
        i += 1
        if not raw:
            continue
        m = _BLOCK.fullmatch(raw)
        if m:
            fields: dict = {}
            while True:
                if i >= len(lines):
                    raise ExpressionSyntaxError(f"line {no}: block is missing 'end'", 1)
                body = lines[i].split("#", 1)[0].strip()
                i += 1
                if body == "end":
                    break
                if body:
                    key, _, rest = body.partition(" ")
                    if key not in ("parts", "roots", "nonroots", "edges", "nonedges"):
                        raise ExpressionSyntaxError(f"line {i}: unknown field {key!r}", 1)
                    fields[key] = rest.split()
            env[m.group(1)] = _block_graph(fields, no)
            continue
        m = _DEF.fullmatch(raw)
        if m:
            try:
                e = parse_expression(m.group(2), env)
            except ExpressionSyntaxError as exc:
                raise _line_error(exc, no) from None
            if not isinstance(e, GraphTerm):
                raise ExpressionSyntaxError(f"line {no}: a definition must name a single graph", 1)
            env[m.group(1)] = e.graph
            continue
        try:
            out.append(ConstraintLine(no, raw, parse_constraint(raw, env)))
        except ExpressionSyntaxError as exc:
            raise _line_error(exc, no) from None
    return out


def load_constraints(path) -> list[ConstraintLine]:
    return parse_constraint_text(Path(path).read_text())
