"""Concrete graphons and the operations defined on them."""

from __future__ import annotations

from .base import BlockGraphon, Graphon, fmt_value
from .cf import CFGraphon, cf_value, interior_measure_cf, make_cf
from .half import HalfGraphon, Restriction, make_half
from .ops import (
    SquareIdentityVerdict,
    cf_for_copy,
    degree,
    density_sets,
    extract_cf_copy,
    from_descriptor,
    square_identity_check,
)
from .step import ConstantGraphon, StepGraphon, make_constant, make_step
from .svejk import SvejkGraphon, make_svejk

__all__ = [
    "BlockGraphon", "CFGraphon", "ConstantGraphon", "Graphon", "HalfGraphon",
    "Restriction", "SquareIdentityVerdict", "StepGraphon", "SvejkGraphon",
    "cf_for_copy", "cf_value", "degree", "density_sets", "extract_cf_copy",
    "fmt_value", "from_descriptor", "interior_measure_cf", "make_cf",
    "make_constant", "make_half", "make_step", "make_svejk",
    "square_identity_check",
]
