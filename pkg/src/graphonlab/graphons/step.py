"""Step graphons: finitely many blocks with a constant value per block pair."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from ..coords import as_fraction
from ..errors import OutOfDomain, OutOfRange
from ..sets import BlockGrid
from .base import BlockGraphon


class StepGraphon(BlockGraphon):
    kind = "step"
    exact = True

    def __init__(self, breakpoints: Sequence, values: Sequence[Sequence]):
        self.grid = BlockGrid(tuple(as_fraction(b) for b in breakpoints))
        n = self.grid.size
        vals = tuple(tuple(as_fraction(v) for v in row) for row in values)
        if len(vals) != n or any(len(row) != n for row in vals):
            raise OutOfRange(f"value matrix must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                if not 0 <= vals[i][j] <= 1:
                    raise OutOfRange(f"cell ({i}, {j}) = {vals[i][j]} outside [0, 1]")
                if vals[i][j] != vals[j][i]:
                    raise OutOfRange("value matrix must be symmetric")
        self.values = vals
        self._float = np.array([[float(v) for v in row] for row in vals])
        self._bps = np.array([float(b) for b in self.grid.breakpoints])

    @classmethod
    def uniform(cls, values: Sequence[Sequence]) -> "StepGraphon":
        n = len(values)
        return cls([Fraction(i, n) for i in range(n + 1)], values)

    @property
    def widths(self) -> list[Fraction]:
        return self.grid.widths()

    def cell(self, i: int, j: int) -> Fraction:
        return self.values[i][j]

    def matrix(self) -> np.ndarray:
        return self._float

    def _block(self, x) -> int:
        X = as_fraction(x)
        if not 0 <= X <= 1:
            raise OutOfDomain(f"point {x!r} outside [0, 1]")
        bps = self.grid.breakpoints
        lo, hi = 0, len(bps) - 2
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if bps[mid] <= X:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def block_of(self, x) -> int:
        return self._block(x)

    def evaluate(self, x, y) -> Fraction:
        return self.values[self._block(x)][self._block(y)]

    def evaluate_array(self, xs, ys) -> np.ndarray:
        n = self.grid.size
        bx = np.clip(np.searchsorted(self._bps, xs, side="right") - 1, 0, n - 1)
        by = np.clip(np.searchsorted(self._bps, ys, side="right") - 1, 0, n - 1)
        return self._float[bx, by]

    def descriptor(self) -> dict:
        return {
            "kind": self.kind,
            "breakpoints": [str(b) for b in self.grid.breakpoints],
            "values": [[str(v) for v in row] for row in self.values],
        }


class ConstantGraphon(StepGraphon):
    """The one-block step graphon with value ``p``."""

    kind = "constant"

    def __init__(self, p):
        P = as_fraction(p)
        if not 0 <= P <= 1:
            raise OutOfRange(f"constant {p} outside [0, 1]")
        super().__init__([0, 1], [[P]])
        self.p = P

    def evaluate(self, x, y) -> Fraction:
        for v in (x, y):
            if not 0 <= v <= 1:
                raise OutOfDomain(f"point {v!r} outside [0, 1]")
        return self.p

    def evaluate_array(self, xs, ys) -> np.ndarray:
        return np.full(np.broadcast(np.asarray(xs), np.asarray(ys)).shape, float(self.p))

    def descriptor(self) -> dict:
        return {"kind": self.kind, "p": str(self.p)}


def make_constant(p) -> ConstantGraphon:
    return ConstantGraphon(p)


def make_step(breakpoints, values) -> StepGraphon:
    return StepGraphon(breakpoints, values)
