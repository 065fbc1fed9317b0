"""The Conlon-Fox step graphon with ``2**m`` blocks indexed by sign vectors.

Block ``b`` carries the vector whose ``(i+1)``-th entry is ``2*bit_i(b) - 1``.
Two vectors at Hamming distance ``h`` have inner product ``m - 2h``, so every
cell value is a function of ``popcount(a ^ b)`` alone.  Nothing of size
``2**m`` is ever materialised except on the block-weight paths, which are
limited to grids that fit in memory.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, isqrt, sqrt

import numpy as np

from ..coords import as_fraction, trunc
from ..errors import GridMismatch, MTooLarge, OutOfDomain, OutOfRange
from ..sets import BlockGrid, BlockSet, IntervalSet, SetSpec, same_grid
from ..walsh import popcounts, xor_convolve
from .base import BlockGraphon

MAX_M = 62
#: largest grid handled by the block-weight (transform) path
MAX_DENSE_M = 24


def is_square(m: int) -> bool:
    return m >= 0 and isqrt(m) ** 2 == m


def cf_value(m: int, h: int):
    """Cell value for two blocks at Hamming distance ``h``.

    Exact rational when ``m`` is a perfect square, float otherwise.
    """
    s = isqrt(m)
    if s * s == m:
        return trunc(Fraction(1, 2) + Fraction(m - 2 * h, 4 * s))
    return trunc(0.5 + (m - 2 * h) / (4 * sqrt(m)))


@lru_cache(maxsize=None)
def value_table(m: int) -> tuple:
    return tuple(cf_value(m, h) for h in range(m + 1))


@lru_cache(maxsize=None)
def binomial_pmf(r: int) -> tuple[Fraction, ...]:
    """Exact law of ``Bin(r, 1/2)``."""
    den = 1 << r
    return tuple(Fraction(comb(r, h), den) for h in range(r + 1))


def block_index(pos, m: int) -> int:
    """``floor(pos * 2**m)`` computed exactly; ``pos = 1`` maps to the last block."""
    P = as_fraction(pos)
    if not 0 <= P <= 1:
        raise OutOfDomain(f"point {pos!r} outside [0, 1]")
    b = (P.numerator << m) // P.denominator
    return min(b, (1 << m) - 1)


def cf_point_value(x, y, m: int):
    """Point evaluator without the machine-word limit (used inside W_S)."""
    a, b = block_index(x, m), block_index(y, m)
    return cf_value(m, (a ^ b).bit_count())


@lru_cache(maxsize=None)
def _shifted_mean(m: int, r: int, d0: int):
    """``E[v(d0 + H)]`` with ``H ~ Bin(r, 1/2)``."""
    vals = value_table(m)
    pmf = binomial_pmf(r)
    return sum((pmf[h] * vals[d0 + h] for h in range(r + 1)), 0 * vals[0])


def dyadic_pieces(s: IntervalSet, m: int) -> list[tuple[int, int, Fraction]]:
    """Split a set into ``(start, r, weight)``: the ``2**r`` aligned blocks from
    ``start`` each covered to fraction ``weight``."""
    pieces = []
    scale = 1 << m
    for a, b in s.intervals:
        A, B = a * scale, b * scale
        lo = A.__ceil__()
        hi = B.__floor__()
        if hi < lo:  # both ends in one block
            pieces.append((A.__floor__(), 0, B - A))
            continue
        if A < lo:
            pieces.append((lo - 1, 0, lo - A))
        if B > hi:
            pieces.append((hi, 0, B - hi))
        cur = lo
        while cur < hi:
            r = (cur & -cur).bit_length() - 1 if cur else m
            while cur + (1 << r) > hi:
                r -= 1
            pieces.append((cur, r, Fraction(1)))
            cur += 1 << r
    return pieces


class CFGraphon(BlockGraphon):
    kind = "conlon-fox"

    def __init__(self, m: int):
        if not 1 <= m <= MAX_M:
            raise MTooLarge(f"m must lie in 1..{MAX_M}, got {m}")
        self.m = m
        self.exact = is_square(m)
        self.grid = BlockGrid.uniform(1 << m)
        self._ftable = np.array([float(v) for v in value_table(m)])

    @property
    def n_blocks(self) -> int:
        return 1 << self.m

    def cell(self, i: int, j: int):
        return value_table(self.m)[(i ^ j).bit_count()]

    def vector(self, block: int) -> tuple[int, ...]:
        return tuple(2 * ((block >> i) & 1) - 1 for i in range(self.m))

    def evaluate(self, x, y):
        return cf_point_value(x, y, self.m)

    def evaluate_array(self, xs, ys) -> np.ndarray:
        top = (1 << self.m) - 1
        scale = float(1 << self.m)
        bx = np.minimum((np.asarray(xs, dtype=float) * scale).astype(np.uint64), top)
        by = np.minimum((np.asarray(ys, dtype=float) * scale).astype(np.uint64), top)
        return self._ftable[np.bitwise_count(bx ^ by)]

    def descriptor(self) -> dict:
        return {"kind": self.kind, "m": self.m}

    def int_values(self) -> tuple[np.ndarray, int]:
        """Cell values as integers over a common denominator (exact ``m`` only)."""
        if not self.exact:
            raise OutOfRange("integer cell values need a perfect-square m")
        den = 4 * isqrt(self.m)
        return np.array([int(v * den) for v in value_table(self.m)], dtype=np.int64), den

    def row_sums(self, weights: np.ndarray) -> np.ndarray:
        """``r[a] = sum_b weights[b] * cell(a, b)`` as floats."""
        from ..walsh import fwht

        f = self._ftable[popcounts(self.n_blocks)]
        return fwht(fwht(np.asarray(weights, dtype=float)) * fwht(f)) / self.n_blocks

    # -- densities ---------------------------------------------------------
    def density_intervals(self, A: IntervalSet, B: IntervalSet):
        """Exact ``int_{A x B} W`` through aligned dyadic sub-cubes."""
        m = self.m
        zero = 0 * value_table(m)[0]
        total = zero
        pa, pb = dyadic_pieces(A, m), dyadic_pieces(B, m)
        for s1, r1, w1 in pa:
            for s2, r2, w2 in pb:
                r = max(r1, r2)
                d0 = ((s1 >> r) ^ (s2 >> r)).bit_count()
                mass = w1 * w2 * Fraction(1 << (r1 + r2), 1 << (2 * m))
                mean = _shifted_mean(m, r, d0)
                total += mass * mean if self.exact else float(mass) * mean
        return total

    def density_blocks(self, A: BlockSet, B: BlockSet):
        if self.m > MAX_DENSE_M:
            raise GridMismatch(f"block-weight densities need m <= {MAX_DENSE_M}")
        for s in (A, B):
            if not same_grid(s.grid, self.grid):
                raise GridMismatch("block-weight set is not on the 2**m grid")
        conv = xor_convolve(A.num, B.num)
        pc = popcounts(self.n_blocks)
        if self.exact:
            ints, den = self.int_values()
            weights = ints[pc]
            if conv.dtype == object:
                tot = sum(int(c) * int(w) for c, w in zip(conv, weights))
            else:
                tot = int((conv.astype(object) * weights.astype(object)).sum())
            return Fraction(tot, den * A.den * B.den * (1 << (2 * self.m)))
        vals = self._ftable[pc]
        return float(np.dot(conv.astype(float), vals)) / (A.den * B.den * 4.0**self.m)

    def density(self, A: SetSpec, B: SetSpec):
        if isinstance(A, IntervalSet) and isinstance(B, IntervalSet):
            return self.density_intervals(A, B)
        if isinstance(A, IntervalSet):
            A = BlockSet.from_intervals(self.grid, A)
        if isinstance(B, IntervalSet):
            B = BlockSet.from_intervals(self.grid, B)
        return self.density_blocks(A, B)


def make_cf(m: int) -> CFGraphon:
    return CFGraphon(m)


def interior_measure_cf(m: int) -> Fraction:
    """Exact fraction of block pairs with ``|<u, u'>| < 2 sqrt(m)``."""
    if not 1 <= m <= MAX_M:
        raise MTooLarge(f"m must lie in 1..{MAX_M}, got {m}")
    good = sum(comb(m, h) for h in range(m + 1) if (m - 2 * h) ** 2 < 4 * m)
    return Fraction(good, 1 << m)
