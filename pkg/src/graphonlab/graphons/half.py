"""The half graphon ``W(x, y) = 1`` iff ``x + y >= 1``, and square restrictions."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..coords import as_fraction
from ..errors import OutOfDomain
from ..sets import IntervalSet
from .base import Graphon


def _check(v):
    V = as_fraction(v)
    if not 0 <= V <= 1:
        raise OutOfDomain(f"point {v!r} outside [0, 1]")
    return V


class HalfGraphon(Graphon):
    kind = "half"
    exact = True

    def evaluate(self, x, y) -> int:
        return int(_check(x) + _check(y) >= 1)

    def evaluate_array(self, xs, ys) -> np.ndarray:
        return (np.asarray(xs, dtype=float) + np.asarray(ys, dtype=float) >= 1.0).astype(float)

    def descriptor(self) -> dict:
        return {"kind": self.kind}

    def density_intervals(self, A: IntervalSet, B: IntervalSet) -> Fraction:
        """Exact area of ``{x + y >= 1}`` inside ``A x B``."""
        total = Fraction(0)
        for a0, a1 in A.intervals:
            for b0, b1 in B.intervals:
                total += _area_above(a0, a1, b0, b1)
        return total


def _area_above(a0, a1, b0, b1) -> Fraction:
    # integral over x in [a0, a1) of |[max(b0, 1 - x), b1)|
    total = Fraction(0)
    # breakpoints where 1 - x crosses b0 and b1
    cuts = sorted({a0, a1, min(max(1 - b1, a0), a1), min(max(1 - b0, a0), a1)})
    for lo, hi in zip(cuts, cuts[1:]):
        if hi <= lo:
            continue
        mid = (lo + hi) / 2
        low = max(b0, 1 - mid)
        if low >= b1:
            continue
        if 1 - mid > b0:
            # length b1 - (1 - x) is linear in x: integrate exactly
            total += (b1 - 1) * (hi - lo) + (hi * hi - lo * lo) / 2
        else:
            total += (b1 - b0) * (hi - lo)
    return total


def make_half() -> HalfGraphon:
    return HalfGraphon()


class Restriction(Graphon):
    """``W'(x, y) = W(lo + width * x, lo + width * y)``, evaluated exactly."""

    kind = "restriction"

    def __init__(self, parent: Graphon, lo, width):
        self.parent = parent
        self.lo = as_fraction(lo)
        self.width = as_fraction(width)
        self.exact = parent.exact

    def evaluate(self, x, y):
        X, Y = _check(x), _check(y)
        return self.parent.evaluate(self.lo + self.width * X, self.lo + self.width * Y)

    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "parent": self.parent.descriptor(),
            "lo": str(self.lo),
            "width": str(self.width),
        }
