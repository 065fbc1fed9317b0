"""The graphon handle abstraction shared by every concrete kernel."""

from __future__ import annotations

from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any

import numpy as np

from ..sets import BlockGrid


class Graphon(ABC):
    """A symmetric kernel on ``[0, 1]^2`` with values in ``[0, 1]``.

    ``evaluate`` is the reference point evaluator and accepts floats or
    fractions.  ``evaluate_array`` is a float64 vectorised counterpart used by
    the Monte Carlo code; subclasses override it when a fast path exists.
    """

    kind: str = "opaque"
    #: True when every value produced by ``evaluate`` is an exact rational.
    exact: bool = False

    @abstractmethod
    def evaluate(self, x, y):
        ...

    def __call__(self, x, y):
        return self.evaluate(x, y)

    def evaluate_array(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        out = np.empty(np.broadcast(xs, ys).shape)
        bx, by = np.broadcast_arrays(xs, ys)
        for idx in np.ndindex(out.shape):
            out[idx] = float(self.evaluate(float(bx[idx]), float(by[idx])))
        return out

    def sample_points(self, rng: np.random.Generator, size) -> np.ndarray:
        """Uniform points on which ``evaluate_array`` is defined."""
        return rng.random(size)

    @abstractmethod
    def descriptor(self) -> dict[str, Any]:
        ...

    def __repr__(self) -> str:
        params = {k: v for k, v in self.descriptor().items() if k != "kind"}
        return f"{type(self).__name__}({params})"


class BlockGraphon(Graphon):
    """A graphon constant on the blocks of a finite grid."""

    grid: BlockGrid

    @abstractmethod
    def cell(self, i: int, j: int):
        """Value on block pair ``(i, j)``."""

    def block_of(self, x) -> int:
        return self.grid.block_of(x)


def fmt_value(v) -> str:
    """Exact values print as ``p/q``; floats with 15 significant digits."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, Fraction):
        return str(v)
    return f"{float(v):.15g}"
