"""The ten-part graphon ``W_S(x, y) = W_13(13 x, 13 y)``.

Parts ``A .. G`` and ``P`` occupy ``[i, i + 1)`` of ``[0, 13)`` for
``i = 0 .. 7``, part ``Q`` occupies ``[8, 12)`` and part ``R`` occupies
``[12, 13)``.  Every rule below is stated for the local coordinate of a point
inside its part (in ``[0, 1)``, or ``[0, 4)`` for ``Q``).  Because ``13 * x``
is computed in exact rational arithmetic, local coordinates and all bracket
coordinates derived from them are exact.

Row integrals over ``A .. G, P`` are assembled in closed form segment by
segment.  Sums over the segment index of the *other* point are cut at
``tail_k`` and the neglected mass is reported as a tail bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, isqrt
from typing import Callable, Optional

import numpy as np

from ..coords import (
    DEFAULT_TOWER_CAP,
    Coordinate,
    as_fraction,
    frac_bit,
    locate,
    segment_of,
    signed_inner,
    tower,
    tower_leq,
    trunc,
)
from ..errors import LevelTooLarge, OutOfDomain, TailNotConvergent
from .base import Graphon
from .cf import cf_point_value, cf_value

PARTS = ("A", "B", "C", "D", "E", "F", "G", "P", "Q", "R")
MAIN = ("A", "B", "C", "D", "E", "F", "G", "P")
SEGMENTED = frozenset("ABCDEFG")
OFFSET = {"A": 0, "B": 1, "C": 2, "D": 3, "E": 4, "F": 5, "G": 6, "P": 7, "Q": 8, "R": 12}
LENGTH = {p: (4 if p == "Q" else 1) for p in PARTS}
R_COLUMN = {p: Fraction(i + 1, 8) for i, p in enumerate("BCDEFGP")}
R_COLUMN.update({"A": Fraction(0), "Q": Fraction(0), "R": Fraction(0)})
#: expected degrees; ``Q`` only has the lower bound 40/104
TABLE_DEGREES = {p: Fraction(32 + i, 104) for i, p in enumerate(MAIN)}
TABLE_DEGREES["R"] = Fraction(28, 104)
Q_DEGREE_BOUND = Fraction(40, 104)
DEFAULT_TAIL_K = 40

HALF = Fraction(1, 2)


def part_of_index(i: int) -> str:
    if i <= 7:
        return MAIN[i]
    return "Q" if i < 12 else "R"


def split_point(x) -> tuple[str, Fraction]:
    """Part name and local coordinate of ``x`` in ``[0, 1]``."""
    U = as_fraction(x) * 13
    if not 0 <= U <= 13:
        raise OutOfDomain(f"point {x!r} outside [0, 1]")
    i = min(U.__floor__(), 12)
    part = part_of_index(i)
    return part, U - OFFSET[part]


def part_interval(part: str) -> tuple[Fraction, Fraction]:
    lo = Fraction(OFFSET[part], 13)
    return lo, lo + Fraction(LENGTH[part], 13)


# -- exact helpers ----------------------------------------------------------


def le_root(a: Fraction, c: Fraction, n: int) -> bool:
    """Decide ``a <= c * sqrt(n)`` exactly."""
    if n == 0 or c == 0:
        return a <= 0
    if c > 0:
        return a <= 0 or a * a <= c * c * n
    return a < 0 and a * a >= c * c * n


def pow2neg(e: int) -> float:
    return 0.0 if e > 1100 else math.ldexp(1.0, -e)


def inv(n: int) -> float:
    return 0.0 if n.bit_length() > 1100 else 1.0 / n


def tower_eq(n: int, v: int) -> bool:
    return tower_leq(n, v) and not tower_leq(n, v - 1)


def _binom_cdf(n: int, h: int):
    """``P(H <= h)`` for ``H ~ Bin(n, 1/2)``."""
    if h < 0:
        return 0
    if h >= n:
        return 1
    if n <= 64:
        return Fraction(sum(comb(n, i) for i in range(h + 1)), 1 << n)
    from scipy.stats import binom

    return float(binom.cdf(h, n, 0.5))


def _binom_mean(n: int, f: Callable[[int], object]):
    """``E[f(H)]`` for ``H ~ Bin(n, 1/2)``, exact when ``n`` is small."""
    if n <= 64:
        return sum((Fraction(comb(n, h), 1 << n) * f(h) for h in range(n + 1)), Fraction(0))
    from scipy.stats import binom

    hs = np.arange(n + 1)
    pmf = binom.pmf(hs, n, 0.5)
    keep = pmf > 1e-300
    return float(sum(p * float(f(int(h))) for p, h in zip(pmf[keep], hs[keep])))


def _ip(c: Coordinate) -> int:
    """``<[x]_2^{+-1}, [x]_3^{+-1}>`` over ``t([x]_1 - 1)`` coordinates."""
    return signed_inner(c.subseg, c.part, c.t_prev)


@lru_cache(maxsize=None)
def cf_row_mean(m: int):
    """Average of a ``W_CF^m`` row; equal to 1/2 by the pairing identity."""
    return _binom_mean(m, lambda h: cf_value(m, h))


# -- zero-one rules of the main square ---------------------------------------


@dataclass(frozen=True)
class _Pt:
    part: str
    local: Fraction
    c: Optional[Coordinate]


def _seg(p: _Pt, q: _Pt) -> bool:
    return p.c.seg == q.c.seg


def _rule_dg(x: _Pt, y: _Pt):
    T1 = x.c.t_prev
    return _seg(x, y) and le_root(y.c.pos - HALF, Fraction(_ip(x.c), 4 * T1), T1)


def _rule_fc(x: _Pt, y: _Pt):
    k = y.c.seg
    return (
        k <= x.c.t_prev
        and frac_bit(x.c.pos, k) == 1
        and y.c.pos * x.c.t <= (1 << k)
    )


def _rule_fe(x: _Pt, y: _Pt):
    T1 = x.c.t_prev
    return _seg(x, y) and y.c.pos <= HALF - Fraction(_ip(x.c), 4 * T1)


def _rule_gc(x: _Pt, y: _Pt):
    k = y.c.seg
    return k <= x.c.t_prev and y.c.pos * x.c.t <= (1 << k)


def _rule_ge(x: _Pt, y: _Pt):
    return _seg(x, y) and le_root(HALF - x.c.pos, y.c.pos - HALF, x.c.t_prev)


def _same_combined(x: _Pt, y: _Pt):
    return _seg(x, y) and x.c.combined == y.c.combined


def _closed_cc(x: _Pt, y: _Pt):
    if not _seg(x, y):
        return 0
    return Fraction(1, 1 << (1 << (x.c.seg - 1)))


def _closed_ee(x: _Pt, y: _Pt):
    if not _seg(x, y):
        return 0
    return cf_point_value(x.c.pos, y.c.pos, x.c.t_prev)


def _closed_bd(x: _Pt, y: _Pt):
    if not _seg(x, y):
        return 0
    return Fraction(1, x.c.t)


RULES: dict[tuple[str, str], Callable[[_Pt, _Pt], object]] = {}
for _y in "ABCDEFG":
    RULES[("A", _y)] = _seg
for _y in "BEFG":
    RULES[("B", _y)] = lambda x, y: _seg(x, y) and x.c.subseg == y.c.subseg
RULES[("B", "C")] = lambda x, y: x.c.t_prev == y.c.seg
RULES[("D", "C")] = lambda x, y: x.c.seg == y.c.seg + 1
RULES[("D", "D")] = lambda x, y: x.c.seg == 1 and y.c.seg == 1
RULES[("D", "G")] = _rule_dg
RULES[("E", "C")] = lambda x, y: frac_bit(x.c.pos, y.c.seg) == 1
RULES[("E", "D")] = lambda x, y: y.local <= 1 - x.c.pos
RULES[("F", "C")] = _rule_fc
RULES[("F", "E")] = _rule_fe
RULES[("F", "D")] = _same_combined
RULES[("F", "F")] = _same_combined
RULES[("G", "G")] = _same_combined
RULES[("F", "G")] = lambda x, y: _seg(x, y) and x.c.part == y.c.subseg
RULES[("G", "C")] = _rule_gc
RULES[("G", "E")] = _rule_ge
for _y in "ABCD":
    RULES[("P", _y)] = lambda x, y: x.local <= y.local
for _y in "EFGP":
    RULES[("P", _y)] = lambda x, y: x.local >= 1 - y.local
RULES[("C", "C")] = _closed_cc
RULES[("E", "E")] = _closed_ee
RULES[("B", "D")] = _closed_bd


def main_value(x: _Pt, y: _Pt):
    """``W_13`` on ``(A u ... u G u P)^2``."""
    rule = RULES.get((x.part, y.part))
    if rule is None:
        rule = RULES[(y.part, x.part)]
        x, y = y, x
    v = rule(x, y)
    return int(v) if isinstance(v, bool) else v


# -- row integrals -----------------------------------------------------------


def _row_A(c: Coordinate, local: Fraction, K: int) -> dict[str, float]:
    w = pow2neg(c.seg)
    row = {y: w for y in "ABCDEFG"}
    row["P"] = float(local)
    return row


def _row_B(c, local, K):
    w, T, T1 = pow2neg(c.seg), c.t, c.t_prev
    wt = w * inv(T)
    return {
        "A": w, "B": wt, "E": wt, "F": wt, "G": wt,
        "C": pow2neg(T1), "D": wt, "P": float(local),
    }


def _row_C(c, local, K):
    k, p = c.seg, c.pos
    row = {"A": pow2neg(k), "C": pow2neg((1 << (k - 1)) + k), "D": pow2neg(k + 1), "E": 0.5}
    b = f = g = 0.0
    for j in range(1, K + 1):
        if tower_eq(j - 1, k):
            b += pow2neg(j)
        if not tower_leq(j - 1, k - 1) and (p == 0 or tower_leq(j, Fraction(1 << k) / p)):
            f += pow2neg(j) / 2
            g += pow2neg(j)
    row.update({"B": b, "F": f, "G": g, "P": float(local)})
    return row


def _row_D(c, local, K):
    k, T, T1 = c.seg, c.t, c.t_prev
    w = pow2neg(k)
    g = trunc(0.5 + _ip(c) / (4 * math.sqrt(T1)))
    return {
        "A": w, "B": w * inv(T), "C": pow2neg(k - 1) if k >= 2 else 0.0,
        "D": 0.5 if k == 1 else 0.0, "E": float(1 - local),
        "F": w * inv(T) ** 2, "G": w * g, "P": float(local),
    }


def _row_E(c, local, K):
    k, p, T, T1 = c.seg, c.pos, c.t, c.t_prev
    w = pow2neg(k)
    h0 = ((4 * T1 * p - T1) / 2).__ceil__()
    f = 1 - _binom_cdf(T1, h0 - 1)
    g = 1 - trunc(0.5 - math.sqrt(T1) * (float(p) - 0.5))
    return {
        "A": w, "B": w * inv(T), "C": float(p), "D": float(1 - p),
        "E": w * float(cf_row_mean(T1)), "F": w * float(f), "G": w * g, "P": float(local),
    }


def _row_F(c, local, K):
    k, p, T, T1 = c.seg, c.pos, c.t, c.t_prev
    w = pow2neg(k)
    ones = ((p.numerator << T1) // p.denominator).bit_count()
    e = trunc(HALF - Fraction(_ip(c), 4 * T1))
    return {
        "A": w, "B": w * inv(T), "C": ones * inv(T), "D": w * inv(T) ** 2,
        "E": w * float(e), "F": w * inv(T) ** 2, "G": w * inv(T), "P": float(local),
    }


def _row_G(c, local, K):
    k, p, T, T1 = c.seg, c.pos, c.t, c.t_prev
    w = pow2neg(k)
    s = isqrt(T1)
    if s * s == T1:
        # p <= 1/2 + (T1 - 2h) / (4 s)  <=>  h <= (T1 - 4 s (p - 1/2)) / 2
        d = _binom_cdf(T1, ((T1 - 4 * s * (p - HALF)) / 2).__floor__())
    else:
        d = _binom_mean(T1, lambda h: int(le_root(p - HALF, Fraction(T1 - 2 * h, 4 * T1), T1)))
    e = 1 - trunc(0.5 + (0.5 - float(p)) / math.sqrt(T1))
    return {
        "A": w, "B": w * inv(T), "C": T1 * inv(T), "D": w * float(d),
        "E": w * e, "F": w * inv(T), "G": w * inv(T) ** 2, "P": float(local),
    }


def _row_P(local: Fraction) -> dict[str, float]:
    u = float(local)
    row = {y: 1 - u for y in "ABCD"}
    row.update({y: u for y in "EFGP"})
    return row


_ROWS = {"A": _row_A, "B": _row_B, "C": _row_C, "D": _row_D,
         "E": _row_E, "F": _row_F, "G": _row_G}


# -- segment-averaged pair integrals -------------------------------------------


def _t_or_none(n: int, cap: int) -> Optional[int]:
    return tower(n, cap) if n <= cap else None


def pair_integrals(tail_k: int = DEFAULT_TAIL_K, cap: int = DEFAULT_TOWER_CAP) -> dict[tuple[str, str], float]:
    """``D[X, Y] = integral over X x Y of W_13`` for ``X, Y`` in ``A .. G, P``.

    Each row part is integrated from its own closed-form row, so the table is
    symmetric only if the row formulas are mutually consistent.  Expectations
    that the pairing identity fixes at 1/2 are evaluated explicitly for
    segments whose tower values are representable and set to 1/2 beyond.
    """
    K = tail_k
    segs = range(1, K + 1)
    q = [pow2neg(2 * k) for k in segs]  # 4^-k
    quarter = sum(q)

    def inv_t(k):
        t = _t_or_none(k, cap)
        return 0.0 if t is None else inv(t)

    def ratio(k):  # t(k-1) / t(k)
        t1 = _t_or_none(k - 1, cap)
        return 0.0 if t1 is None or t1 > 1100 else t1 * pow2neg(t1)

    a = sum(qk * inv_t(k) for qk, k in zip(q, segs))
    b = sum(qk * inv_t(k) ** 2 for qk, k in zip(q, segs))

    def half_unless_small(k, fn):
        t1 = _t_or_none(k - 1, cap)
        return 0.5 if t1 is None or t1 > 1 << 17 else float(fn(t1))

    def dg_mean(T1):
        return _binom_mean(T1, lambda h: trunc(0.5 + (T1 - 2 * h) / (4 * math.sqrt(T1))))

    def fe_mean(T1):
        return _binom_mean(T1, lambda h: trunc(HALF - Fraction(T1 - 2 * h, 4 * T1)))

    def ge_mean(T1):
        # integral over p of 1 - trunc(1/2 + (1/2 - p) / sqrt(T1))
        return 1 - _clipped_linear_integral(0.5 + 0.5 / math.sqrt(T1), -1 / math.sqrt(T1))

    def eg_mean(T1):
        # integral over p of 1 - trunc(1/2 - sqrt(T1) (p - 1/2))
        return 1 - _clipped_linear_integral(0.5 + 0.5 * math.sqrt(T1), -math.sqrt(T1))

    D: dict[tuple[str, str], float] = {}
    for y in "ABCDEFG":
        D[("A", y)] = quarter
    D[("A", "P")] = 0.5

    D[("B", "A")] = quarter
    for y in "BDEFG":
        D[("B", y)] = a
    D[("B", "C")] = sum(pow2neg(k) * (pow2neg(_t_or_none(k - 1, cap)) if k - 1 <= cap else 0.0) for k in segs)
    D[("B", "P")] = 0.5

    D[("C", "A")] = quarter
    D[("C", "B")] = sum(pow2neg(k) * sum(pow2neg(j) for j in segs if tower_eq(j - 1, k)) for k in segs)
    D[("C", "C")] = sum(qk * pow2neg(1 << (k - 1)) for qk, k in zip(q, segs))
    D[("C", "D")] = sum(pow2neg(k) * pow2neg(k + 1) for k in segs)
    D[("C", "E")] = 0.5
    cf_sum = 0.0
    for j in segs:
        t1 = _t_or_none(j - 1, cap)
        inner = 0.0
        for k in segs:
            if t1 is not None and k > t1:
                break
            # P(p <= 2^k / t(j)) = 2^(k - t(j-1)) whenever k <= t(j-1)
            inner += pow2neg(k) * (pow2neg(t1 - k) if t1 is not None else 0.0)
        cf_sum += pow2neg(j) / 2 * inner
    D[("C", "F")] = cf_sum
    D[("C", "G")] = 2 * cf_sum
    D[("C", "P")] = 0.5

    D[("D", "A")] = quarter
    D[("D", "B")] = a
    D[("D", "C")] = sum(pow2neg(k) * pow2neg(k - 1) for k in segs if k >= 2)
    D[("D", "D")] = 0.25
    D[("D", "E")] = 0.5
    D[("D", "F")] = b
    D[("D", "G")] = sum(qk * half_unless_small(k, dg_mean) for qk, k in zip(q, segs))
    D[("D", "P")] = 0.5

    D[("E", "A")] = quarter
    D[("E", "B")] = a
    D[("E", "C")] = 0.5
    D[("E", "D")] = 0.5
    D[("E", "E")] = sum(qk * half_unless_small(k, cf_row_mean) for qk, k in zip(q, segs))
    D[("E", "F")] = sum(qk * half_unless_small(k, fe_mean) for qk, k in zip(q, segs))
    D[("E", "G")] = sum(qk * half_unless_small(k, eg_mean) for qk, k in zip(q, segs))
    D[("E", "P")] = 0.5

    D[("F", "A")] = quarter
    D[("F", "B")] = a
    D[("F", "C")] = sum(pow2neg(k) * ratio(k) / 2 for k in segs)
    D[("F", "D")] = b
    D[("F", "E")] = sum(qk * half_unless_small(k, fe_mean) for qk, k in zip(q, segs))
    D[("F", "F")] = b
    D[("F", "G")] = a
    D[("F", "P")] = 0.5

    D[("G", "A")] = quarter
    D[("G", "B")] = a
    D[("G", "C")] = sum(pow2neg(k) * ratio(k) for k in segs)
    D[("G", "D")] = sum(qk * half_unless_small(k, dg_mean) for qk, k in zip(q, segs))
    D[("G", "E")] = sum(qk * half_unless_small(k, ge_mean) for qk, k in zip(q, segs))
    D[("G", "F")] = a
    D[("G", "G")] = b
    D[("G", "P")] = 0.5

    for y in MAIN:
        D[("P", y)] = 0.5
    return D


def _clipped_linear_integral(c0: float, slope: float) -> float:
    """``integral_0^1 clip(c0 + slope * p, 0, 1) dp``."""
    if slope == 0:
        return min(max(c0, 0.0), 1.0)
    # breakpoints where the line crosses 0 and 1
    pts = sorted({0.0, 1.0, *(min(max(v, 0.0), 1.0) for v in (-c0 / slope, (1 - c0) / slope))})
    total = 0.0
    for lo, hi in zip(pts, pts[1:]):
        mid = c0 + slope * (lo + hi) / 2
        if mid <= 0:
            continue
        if mid >= 1:
            total += hi - lo
        else:
            total += (hi - lo) * mid
    return total


# -- the graphon ---------------------------------------------------------------


class SvejkGraphon(Graphon):
    kind = "svejk"
    exact = False

    def __init__(self, tail_k: int = DEFAULT_TAIL_K, tower_cap: int = DEFAULT_TOWER_CAP):
        self.tail_k = tail_k
        self.tower_cap = tower_cap
        self._row_cache = lru_cache(maxsize=1 << 16)(self._row_uncached)
        self._pairs: Optional[dict] = None

    # points
    def point(self, x) -> _Pt:
        part, local = split_point(x)
        c = locate(local, self.tower_cap) if part in SEGMENTED else None
        return _Pt(part, local, c)

    def is_deep(self, x) -> bool:
        part, local = split_point(x)
        return part in SEGMENTED and segment_of(local)[0] > self.tower_cap

    # values
    def evaluate(self, x, y):
        return self.w13(self.point(x), self.point(y))

    def w13(self, px: _Pt, py: _Pt):
        if px.part == "R" or py.part == "R":
            other = py if px.part == "R" else px
            return R_COLUMN[other.part]
        if px.part == "Q" and py.part == "Q":
            return 1
        if px.part == "Q" or py.part == "Q":
            other = py if px.part == "Q" else px
            return self.q_value(other)
        return main_value(px, py)

    def q_value(self, p: _Pt) -> float:
        """Value on ``{p} x Q``: ``(4 - I(p)) / 4``."""
        return (4.0 - self.row_integral(p)[0]) / 4.0

    def evaluate_array(self, xs, ys) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        out = np.empty(np.broadcast(xs, ys).shape)
        bx, by = np.broadcast_arrays(xs, ys)
        pts: dict[float, _Pt] = {}

        def pt(v: float) -> _Pt:
            got = pts.get(v)
            if got is None:
                got = pts[v] = self.point(v)
            return got

        for idx in np.ndindex(out.shape):
            out[idx] = float(self.w13(pt(float(bx[idx])), pt(float(by[idx]))))
        return out

    def sample_points(self, rng: np.random.Generator, size) -> np.ndarray:
        """Uniform points, redrawing those whose segment exceeds the tower cap."""
        pts = np.asarray(rng.random(size), dtype=float)
        flat = pts.reshape(-1)
        for i in range(flat.size):
            while self.is_deep(flat[i]):
                flat[i] = rng.random()
        return flat.reshape(np.shape(pts))

    # integrals
    def _row_uncached(self, part: str, local: Fraction) -> tuple[dict[str, float], float]:
        if part == "P":
            return _row_P(local), 0.0
        c = locate(local, self.tower_cap)
        row = _ROWS[part](c, local, self.tail_k)
        tail = 1.5 * pow2neg(self.tail_k) if part == "C" else 0.0
        return row, tail

    def row_by_part(self, p: _Pt) -> tuple[dict[str, float], float]:
        """Per-part integrals of the row of ``p`` over ``A .. G, P``."""
        if p.part not in MAIN:
            raise OutOfDomain("row integrals are defined for parts A..G and P")
        return self._row_cache(p.part, p.local)

    def row_integral(self, p: _Pt) -> tuple[float, float]:
        row, tail = self.row_by_part(p)
        return math.fsum(row.values()), tail

    def pair_table(self) -> dict[tuple[str, str], float]:
        if self._pairs is None:
            self._pairs = pair_integrals(self.tail_k, self.tower_cap)
        return self._pairs

    def q_degree(self) -> float:
        total = math.fsum(self.pair_table().values())
        return (12.0 - total / 4.0) / 13.0

    def degree(self, x, tol: float = 1e-9, strict: bool = False) -> float:
        part, local = split_point(x)
        if part == "R":
            return float(sum(R_COLUMN.values()) / 13)
        if part == "Q":
            return self.q_degree()
        if part in SEGMENTED and segment_of(local)[0] > self.tower_cap:
            if strict:
                raise LevelTooLarge("point lies beyond the tower cap")
            # the Q column makes I(x) cancel: degree = (4 + R-constant) / 13
            return float((4 + R_COLUMN[part]) / 13)
        p = self.point(x)
        I, tail = self.row_integral(p)
        if tail > tol:
            raise TailNotConvergent(f"tail bound {tail:.3g} exceeds tolerance {tol:.3g}")
        q = (4.0 - I) / 4.0
        return (I + 4.0 * q + float(R_COLUMN[part])) / 13.0

    def descriptor(self) -> dict:
        return {"kind": self.kind, "tail_k": self.tail_k, "tower_cap": self.tower_cap}


def make_svejk(tail_k: int = DEFAULT_TAIL_K, tower_cap: int = DEFAULT_TOWER_CAP) -> SvejkGraphon:
    return SvejkGraphon(tail_k, tower_cap)
