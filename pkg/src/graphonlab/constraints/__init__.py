"""Density expressions, decorated constraints and their evaluation."""

from __future__ import annotations

from .decorated import DecoratedGraph, Vertex, check_compatible
from .evaluate import (
    SatisfactionVerdict,
    Value,
    decorated_probability,
    evaluate_decorated,
    evaluate_expression,
    evaluate_ordinary,
    exact_acceptance,
)
from .expr import (
    Const,
    Constraint,
    GraphTerm,
    Prod,
    Sum,
    parse_constraint,
    parse_expression,
    render_constraint,
    render_expression,
)
from .parts import PartEntry, PartTable, partition_by_degree, svejk_part_table

OrdinaryConstraint = Constraint
DecoratedConstraint = Constraint

__all__ = [
    "Const", "Constraint", "DecoratedConstraint", "DecoratedGraph", "GraphTerm",
    "OrdinaryConstraint", "PartEntry", "PartTable", "Prod", "SatisfactionVerdict",
    "Sum", "Value", "Vertex", "check_compatible", "decorated_probability",
    "evaluate_decorated", "evaluate_expression", "evaluate_ordinary",
    "exact_acceptance", "parse_constraint", "parse_expression",
    "partition_by_degree", "render_constraint", "render_expression",
    "svejk_part_table",
]
