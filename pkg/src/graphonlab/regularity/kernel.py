"""Integer views of block graphons used by the regularity code.

A block graphon is described by integer cell values ``cells[a, b] / L`` and
integer block widths ``wint[a] / wden``.  Sets are block-weight numerators
over their own denominators, so every density below is a ratio of Python
integers.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..errors import GridMismatch, PreconditionViolated
from ..graphons.base import Graphon
from ..graphons.cf import CFGraphon
from ..graphons.step import StepGraphon
from ..sets import BlockGrid, BlockSet, PartitionSpec, same_grid
from ..walsh import popcounts, xor_convolve

#: largest Conlon-Fox grid kept as a dense matrix
DENSE_CF_M = 12
_F64_EXACT = 2**53


def _as_int_array(a) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype == object:
        return a
    return a.astype(np.int64)


def _int_matmul(a: np.ndarray, b: np.ndarray, bound: int) -> np.ndarray:
    """``a @ b`` exactly; uses float64 BLAS when every partial sum stays below 2**53."""
    if bound < _F64_EXACT and a.dtype != object and b.dtype != object:
        return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)
    return a.astype(object) @ b.astype(object)


class BlockKernel:
    """Cell values of a step or Conlon-Fox graphon in integer form."""

    def __init__(self, g: Graphon):
        self.g = g
        if isinstance(g, CFGraphon):
            n = g.n_blocks
            self.grid: BlockGrid = g.grid
            self.n = n
            self.exact = g.exact
            self.wint = np.ones(n, dtype=np.int64)
            self.wden = n
            self._cf = g
            if g.exact:
                ints, self.L = g.int_values()
                self._vec = ints[popcounts(n)]
            else:
                self.L = 1
                self._vec = g._ftable[popcounts(n)]
            self.cells = None
            if g.m <= DENSE_CF_M:
                idx = np.arange(n, dtype=np.uint64)
                self.cells = self._vec[(idx[:, None] ^ idx[None, :]).astype(np.int64)]
        elif isinstance(g, StepGraphon):
            self._cf = None
            self.grid = g.grid
            self.n = g.grid.size
            self.exact = True
            vals = [v for row in g.values for v in row]
            self.L = math.lcm(*(v.denominator for v in vals))
            self.cells = np.array([[int(v * self.L) for v in row] for row in g.values], dtype=np.int64)
            ws = g.widths
            self.wden = math.lcm(*(w.denominator for w in ws))
            self.wint = np.array([int(w * self.wden) for w in ws], dtype=np.int64)
        else:
            raise PreconditionViolated("regularity computations need a step or Conlon-Fox graphon")
        self.cmax = int(np.max(self.cells)) if self.cells is not None and self.exact else self.L

    # -- float operators ---------------------------------------------------
    @property
    def weights(self) -> np.ndarray:
        return self.wint / self.wden

    def cell_float(self) -> np.ndarray:
        return np.asarray(self.cells, dtype=float) / self.L

    def apply(self, y: np.ndarray) -> np.ndarray:
        """``r[a] = sum_b W(a, b) * w_b * y_b`` in floating point."""
        y = np.asarray(y, dtype=float) * self.weights
        if self.cells is not None:
            if not hasattr(self, "_cf_float"):
                self._cf_float = self.cell_float()
            return self._cf_float @ y
        return self._cf.row_sums(y)

    # -- exact quantities -------------------------------------------------
    def bilinear(self, x: np.ndarray, y: np.ndarray) -> int:
        """``sum_ab x_a y_b cells[a, b] wint_a wint_b`` for integer vectors."""
        x = _as_int_array(x) * self.wint
        y = _as_int_array(y) * self.wint
        if self.cells is not None:
            r = _int_matmul(self.cells, y.reshape(-1, 1), self.cmax * _abs_total(y))
            return int(np.dot(x.astype(object), r.reshape(-1).astype(object)))
        conv = xor_convolve(x, y)
        return int(np.dot(conv.astype(object), self._vec.astype(object)))

    def gram(self, F: np.ndarray) -> np.ndarray:
        """``C[i, j] = bilinear(F[i], F[j])`` for a stack of integer vectors."""
        F = _as_int_array(F)
        Fw = F * self.wint
        k = F.shape[0]
        tot = _abs_total(Fw)
        if self.cells is not None:
            R = _int_matmul(self.cells, Fw.T, self.cmax * tot)
            return _int_matmul(Fw, R, self.cmax * tot * tot)
        rows = [xor_convolve(Fw[j], self._vec) for j in range(k)]
        R = np.stack([np.asarray(r, dtype=object) for r in rows], axis=1)
        return Fw.astype(object) @ R

    def density(self, x: np.ndarray, dx: int, y: np.ndarray, dy: int) -> Fraction:
        """``d(A, B)`` for block-weight numerators ``x / dx`` and ``y / dy``."""
        if not self.exact:
            raise PreconditionViolated("exact densities need exact cell values")
        return Fraction(self.bilinear(x, y), self.L * self.wden**2 * dx * dy)


def _abs_total(a: np.ndarray) -> int:
    if a.dtype == object:
        return sum(abs(int(v)) for v in a.ravel())
    return int(np.abs(a).sum(dtype=np.float64)) + 1


def partition_labels(P: PartitionSpec, grid: BlockGrid) -> np.ndarray:
    """Part index of every block; the parts must be unions of whole blocks."""
    if P.grid is None:
        P = P.on_grid(grid)
    elif not same_grid(P.grid, grid):
        raise GridMismatch("partition is defined on a different block grid")
    labels = np.full(grid.size, -1, dtype=np.int64)
    for t, part in enumerate(P.parts):
        part = part if isinstance(part, BlockSet) else BlockSet.from_intervals(grid, part)
        if not part.is_whole_blocks():
            raise GridMismatch(f"part {t} splits a block")
        labels[part.num == part.den] = t
    return labels


def one_hot(labels: np.ndarray, k: int | None = None) -> np.ndarray:
    k = int(labels.max()) + 1 if k is None else k
    F = np.zeros((k, labels.size), dtype=np.int64)
    F[labels, np.arange(labels.size)] = 1
    return F


def relabel(labels: np.ndarray) -> np.ndarray:
    """Renumber parts ``0, 1, ...`` in order of first appearance."""
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inv].reshape(labels.shape)
