"""Constructive witness that a coarse partition of ``W_CF^m`` is not regular.

Coordinate ``i`` (1-based) of a block corresponds to bit ``i - 1`` of the
block index; ``V_i^-`` collects the blocks whose bit is 0 (vector entry -1)
and ``V_i^+`` those whose bit is 1.

For each part the code measures how the part splits across every
``V_i^+-``, keeps the coordinates where both sides carry at least 1/64 of
the part, and picks the coordinate ``i0`` whose useful parts have the
largest total measure.  Sets ``A^-`` and ``A^+`` take ``|U_t|/64`` from each
useful part on the two sides of ``i0``.  With ``B = V_i0^-`` the structured
terms of ``(A^-, B)`` and ``(A^+, B)`` coincide, while the densities differ
by a computable amount; half of that gap bounds the regularity parameter of
the partition from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Union

import numpy as np

from ..errors import GraphonLabError, GridMismatch, PreconditionViolated
from ..graphons.cf import MAX_DENSE_M, cf_value, is_square, make_cf
from ..sets import BlockGrid, BlockSet, IntervalSet, PartitionSpec, same_grid, set_from_dict
from ..walsh import xor_convolve

Number = Union[Fraction, float]
GUARANTEE_M = 25


def _bits(m: int) -> np.ndarray:
    """``(2^m, m)`` matrix of block bits."""
    idx = np.arange(1 << m, dtype=np.int64)
    return ((idx[:, None] >> np.arange(m)) & 1).astype(np.int64)


def _blockset_parts(P: PartitionSpec, grid: BlockGrid) -> list[BlockSet]:
    out = []
    for p in P.parts:
        if isinstance(p, IntervalSet):
            p = BlockSet.from_intervals(grid, p)
        elif not same_grid(p.grid, grid):
            raise GridMismatch("partition is not on the 2**m block grid")
        out.append(p)
    return out


@dataclass
class WitnessReport:
    m: int
    k: int
    i0: int
    S: list
    small: list
    useful: list  # per part: sorted coordinates i with a useful pair (t, i)
    M: list
    eq2_total: Fraction
    eq2_holds: bool
    i0_measure: Fraction
    A_minus: BlockSet
    A_plus: BlockSet
    B: BlockSet
    A_minus_parts: list  # per part: the piece of A^- inside U_t
    A_plus_parts: list
    d_minus: Number
    d_plus: Number
    discrepancy: Number
    implied_epsilon: Number
    exact: bool
    warnings: list = field(default_factory=list)

    @property
    def guaranteed(self) -> bool:
        return self.m >= GUARANTEE_M

    def to_dict(self) -> dict:
        s = str
        return {
            "m": self.m,
            "k": self.k,
            "i0": self.i0,
            "S": [s(v) for v in self.S],
            "small": list(self.small),
            "useful": [list(u) for u in self.useful],
            "M": list(self.M),
            "eq2_total": s(self.eq2_total),
            "eq2_holds": self.eq2_holds,
            "i0_measure": s(self.i0_measure),
            "A_minus": self.A_minus.to_dict(),
            "A_plus": self.A_plus.to_dict(),
            "B": self.B.to_dict(),
            "A_minus_parts": [p.to_dict() for p in self.A_minus_parts],
            "A_plus_parts": [p.to_dict() for p in self.A_plus_parts],
            "d_minus": s(self.d_minus),
            "d_plus": s(self.d_plus),
            "discrepancy": s(self.discrepancy),
            "implied_epsilon": s(self.implied_epsilon),
            "exact": self.exact,
            "guaranteed": self.guaranteed,
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "WitnessReport":
        grid = BlockGrid.uniform(1 << int(d["m"]))
        num = Fraction if d["exact"] else float
        sets = lambda key: set_from_dict(d[key], grid)  # noqa: E731
        return cls(
            m=int(d["m"]), k=int(d["k"]), i0=int(d["i0"]),
            S=[Fraction(v) for v in d["S"]], small=list(d["small"]),
            useful=[tuple(u) for u in d["useful"]], M=list(d["M"]),
            eq2_total=Fraction(d["eq2_total"]), eq2_holds=bool(d["eq2_holds"]),
            i0_measure=Fraction(d["i0_measure"]),
            A_minus=sets("A_minus"), A_plus=sets("A_plus"), B=sets("B"),
            A_minus_parts=[set_from_dict(p, grid) for p in d["A_minus_parts"]],
            A_plus_parts=[set_from_dict(p, grid) for p in d["A_plus_parts"]],
            d_minus=num(d["d_minus"]), d_plus=num(d["d_plus"]),
            discrepancy=num(d["discrepancy"]), implied_epsilon=num(d["implied_epsilon"]),
            exact=bool(d["exact"]), warnings=list(d.get("warnings", [])),
        )


def _fill(part: BlockSet, side_mask: np.ndarray, target: Fraction, N: int) -> BlockSet:
    """Take mass ``target`` from ``part`` restricted to ``side_mask``, lowest block first."""
    num = np.zeros(N, dtype=object)
    if target == 0:
        return BlockSet(part.grid, num, 1)
    units = target * N * part.den  # in units of 1 / (N * den)
    cand = np.flatnonzero(side_mask & (np.asarray(part.num) != 0))
    w = np.asarray(part.num, dtype=object)[cand]
    csum = np.cumsum(w.astype(object))
    j = int(np.searchsorted(csum.astype(float), float(units)))
    # float search for speed, exact correction afterwards
    while j > 0 and csum[j - 1] >= units:
        j -= 1
    while csum[j] < units:
        j += 1
    before = csum[j - 1] if j > 0 else 0
    num[cand[:j]] = w[:j] * (units.denominator)
    num[cand[j]] = int((units - before) * units.denominator)
    den = part.den * units.denominator
    return _reduce(BlockSet(part.grid, num, den))


def _reduce(s: BlockSet) -> BlockSet:
    """Cancel the common factor of the numerators and the denominator."""
    num = s.num
    if num.dtype != object or max((abs(int(v)) for v in num), default=0) < 2**62:
        num = num.astype(np.int64)
        g = math.gcd(int(np.gcd.reduce(num)), s.den)
    else:
        g = s.den
        for v in num:
            g = math.gcd(g, int(v))
    if g > 1:
        num = num // g
    if s.den // g < 2**62 and num.dtype == object:
        num = num.astype(np.int64)
    return BlockSet(s.grid, num, s.den // g)


def _sum_sets(grid: BlockGrid, pieces: list) -> BlockSet:
    den = math.lcm(*(p.den for p in pieces))
    tot = sum(p.with_den(den).astype(object) for p in pieces)
    return _reduce(BlockSet(grid, np.asarray(tot, dtype=object), den))


def side_rows(m: int) -> tuple[Number, Number]:
    """Row sums over ``V_i^-`` of a block on the ``-`` and ``+`` side of ``i``.

    The other ``m - 1`` coordinates of the pair agree or disagree
    independently, so the Hamming distance is binomial.
    """
    if is_square(m):
        rm = sum((Fraction(comb(m - 1, h), 1 << m) * cf_value(m, h) for h in range(m)), Fraction(0))
        rp = sum((Fraction(comb(m - 1, h), 1 << m) * cf_value(m, h + 1) for h in range(m)), Fraction(0))
        return rm, rp
    rm = math.fsum(comb(m - 1, h) / 2.0**m * cf_value(m, h) for h in range(m))
    rp = math.fsum(comb(m - 1, h) / 2.0**m * cf_value(m, h + 1) for h in range(m))
    return rm, rp


def refute_cf(m: int, P: PartitionSpec) -> WitnessReport:
    """Build the witness of the coarse-partition argument for ``W_CF^m``."""
    if m > MAX_DENSE_M:
        raise PreconditionViolated(f"block-weight witnesses need m <= {MAX_DENSE_M}")
    N = 1 << m
    grid = BlockGrid.uniform(N)
    parts = _blockset_parts(P, grid)
    k = len(parts)
    if k**4 >= 1 << m:
        raise PreconditionViolated(f"{k} parts is not below 2^(m/4) = {2 ** (m / 4):g}")
    warnings = []
    if m < GUARANTEE_M:
        warnings.append(f"m = {m} is below {GUARANTEE_M}; the counting argument does not guarantee a witness")
    bits = _bits(m)
    sizes = [p.measure() for p in parts]

    # |U_t n V_i^+| for every part and coordinate
    plus, minus = [], []
    for p, size in zip(parts, sizes):
        num = np.asarray(p.num)
        cnt = (num.astype(object) @ bits.astype(object)) if num.dtype == object or p.den > 2**40 else num @ bits
        pl = [Fraction(int(c), p.den * N) for c in cnt]
        plus.append(pl)
        minus.append([size - v for v in pl])

    S = [sum((minus[t][i] * plus[t][i] for i in range(m)), Fraction(0)) for t in range(k)]
    # |U_t| <= 2^(-m/3)  <=>  |U_t|^3 <= 2^-m
    small = [s**3 <= Fraction(1, N) for s in sizes]
    useful = [
        tuple(i + 1 for i in range(m) if min(minus[t][i], plus[t][i]) >= sizes[t] / 64)
        for t in range(k)
    ]
    M = [len(u) for u in useful]
    eq2_total = sum((Mt * s for Mt, s in zip(M, sizes)), Fraction(0))
    eq2_holds = eq2_total >= Fraction(m, 32)
    if m >= GUARANTEE_M and not eq2_holds:
        raise GraphonLabError("the useful-pair aggregate fell below m/32 although the hypotheses hold")

    measure_by_i = [sum((sizes[t] for t in range(k) if i in useful[t]), Fraction(0)) for i in range(1, m + 1)]
    best = max(measure_by_i)
    i0 = measure_by_i.index(best) + 1
    if best == 0:
        raise PreconditionViolated("no coordinate has a useful part; no witness can be built")

    side = bits[:, i0 - 1].astype(bool)
    am_parts, ap_parts = [], []
    for t, p in enumerate(parts):
        target = sizes[t] / 64 if i0 in useful[t] else Fraction(0)
        am_parts.append(_fill(p, ~side, target, N))
        ap_parts.append(_fill(p, side, target, N))
    A_minus = _sum_sets(grid, am_parts)
    A_plus = _sum_sets(grid, ap_parts)
    B = BlockSet.from_mask(grid, ~side)

    rm, rp = side_rows(m)
    d_minus = A_minus.measure() * rm if isinstance(rm, Fraction) else float(A_minus.measure()) * rm
    d_plus = A_plus.measure() * rp if isinstance(rp, Fraction) else float(A_plus.measure()) * rp
    disc = abs(d_minus - d_plus)
    return WitnessReport(
        m=m, k=k, i0=i0, S=S, small=small, useful=useful, M=M,
        eq2_total=eq2_total, eq2_holds=eq2_holds, i0_measure=best,
        A_minus=A_minus, A_plus=A_plus, B=B,
        A_minus_parts=am_parts, A_plus_parts=ap_parts,
        d_minus=d_minus, d_plus=d_plus, discrepancy=disc, implied_epsilon=disc / 2,
        exact=isinstance(rm, Fraction), warnings=warnings,
    )


@dataclass(frozen=True)
class RefuteVerdict:
    ok: bool
    checks: dict

    @property
    def failures(self) -> list:
        return [name for name, good in self.checks.items() if not good]


def _structured(g, parts: list, a: list, b: list) -> Fraction:
    """``sum_ij d(U_i, U_j) / (|U_i| |U_j|) * a_i * b_j`` exactly.

    One XOR convolution per part gives its row sums; ``d(U_i, U_j)`` is then
    a dot product.
    """
    ints, den = g.int_values()
    vec = ints[np.bitwise_count(np.arange(g.n_blocks, dtype=np.uint64)).astype(np.int64)]
    k = len(parts)
    sizes = [p.measure() for p in parts]
    N = g.n_blocks
    total = Fraction(0)
    for j in range(k):
        if not b[j]:
            continue
        row = xor_convolve(parts[j].num, vec)
        rmax = int(np.abs(row).max()) if row.dtype != object else None
        for i in range(k):
            if not a[i]:
                continue
            ui = parts[i].num
            if rmax is not None and ui.dtype != object and parts[i].den * N * rmax < 2**62:
                dot = int(np.dot(ui, row))
            else:
                dot = int(np.dot(ui.astype(object), row.astype(object)))
            dij = Fraction(dot,
                           den * parts[i].den * parts[j].den * N * N)
            total += dij / (sizes[i] * sizes[j]) * a[i] * b[j]
    return total


def refute_verify(report: WitnessReport, m: int, P: PartitionSpec) -> RefuteVerdict:
    """Recompute the witness quantities independently of ``refute_cf``."""
    checks: dict[str, bool] = {}
    N = 1 << m
    grid = BlockGrid.uniform(N)
    parts = _blockset_parts(P, grid)
    k = len(parts)
    checks["shape"] = report.m == m and report.k == k and len(report.A_minus_parts) == k == len(report.A_plus_parts)
    if not checks["shape"]:
        return RefuteVerdict(False, checks)
    i0 = report.i0
    side = np.array([(b >> (i0 - 1)) & 1 for b in range(N)], dtype=bool)
    checks["B_is_minus_side"] = report.B == BlockSet.from_mask(grid, ~side)

    def within(piece: BlockSet, part: BlockSet) -> bool:
        den = math.lcm(piece.den, part.den)
        return bool((piece.with_den(den) <= part.with_den(den)).all())

    def on_side(s: BlockSet, mask: np.ndarray) -> bool:
        return not bool((np.asarray(s.num)[~mask] != 0).any())

    checks["pieces_inside_parts"] = all(
        within(am, p) and within(ap, p) for am, ap, p in zip(report.A_minus_parts, report.A_plus_parts, parts)
    )
    checks["pieces_sum_to_sets"] = (
        _sum_sets(grid, list(report.A_minus_parts)) == report.A_minus
        and _sum_sets(grid, list(report.A_plus_parts)) == report.A_plus
    )
    checks["A_minus_on_minus_side"] = on_side(report.A_minus, ~side)
    checks["A_plus_on_plus_side"] = on_side(report.A_plus, side)
    a_minus = [p.measure() for p in report.A_minus_parts]
    a_plus = [p.measure() for p in report.A_plus_parts]
    checks["equal_intersections"] = a_minus == a_plus

    g = make_cf(m)
    d_minus = g.density_blocks(report.A_minus, report.B)
    d_plus = g.density_blocks(report.A_plus, report.B)
    if g.exact:
        checks["d_minus"] = d_minus == report.d_minus
        checks["d_plus"] = d_plus == report.d_plus
        disc = abs(d_minus - d_plus)
        checks["discrepancy"] = disc == report.discrepancy and report.implied_epsilon == disc / 2
    else:
        checks["d_minus"] = abs(d_minus - float(report.d_minus)) <= 1e-12
        checks["d_plus"] = abs(d_plus - float(report.d_plus)) <= 1e-12
        disc = abs(d_minus - d_plus)
        checks["discrepancy"] = abs(disc - float(report.discrepancy)) <= 1e-12
    checks["positive_discrepancy"] = disc > 0

    if g.exact and checks["equal_intersections"]:
        # with equal intersections the structured terms agree, so one of the
        # two pairs deviates by at least half the density gap
        b = [p.measure() - _mass_on(p, side) for p in parts]
        s_minus = _structured(g, parts, a_minus, b)
        s_plus = _structured(g, parts, a_plus, b)
        checks["structured_terms_cancel"] = s_minus == s_plus
        worst = max(abs(d_minus - s_minus), abs(d_plus - s_plus))
        checks["deviation_at_least_half_gap"] = worst >= disc / 2
    return RefuteVerdict(all(checks.values()), checks)


def _mass_on(p: BlockSet, mask: np.ndarray) -> Fraction:
    num = np.asarray(p.num)[mask]
    return Fraction(int(num.astype(object).sum()), p.den * p.grid.size)
