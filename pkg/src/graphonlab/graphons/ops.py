"""Operations on graphon handles: degrees, set densities, embedded copies."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ..coords import DEFAULT_TOWER_CAP, as_fraction, tower
from ..errors import GridMismatch, LevelTooLarge, OutOfDomain, OutOfRange
from ..sets import BlockSet, IntervalSet, SetSpec, to_blockset
from .base import Graphon
from .cf import CFGraphon, binomial_pmf, make_cf, value_table
from .half import HalfGraphon, Restriction, make_half
from .step import ConstantGraphon, StepGraphon, make_constant
from .svejk import OFFSET, SvejkGraphon, make_svejk


def degree(g: Graphon, x, tol: float = 1e-9, **kw):
    """``deg(x) = integral of W(x, y) dy`` to within ``tol``."""
    X = as_fraction(x)
    if not 0 <= X <= 1:
        raise OutOfDomain(f"point {x!r} outside [0, 1]")
    if isinstance(g, SvejkGraphon):
        return g.degree(x, tol, **kw)
    if isinstance(g, ConstantGraphon):
        return g.p
    if isinstance(g, StepGraphon):
        i = g.block_of(X)
        return sum((g.cell(i, j) * w for j, w in enumerate(g.widths)), Fraction(0))
    if isinstance(g, CFGraphon):
        pmf = binomial_pmf(g.m)
        vals = value_table(g.m)
        # every block sees the Hamming distance distribution Bin(m, 1/2)
        return sum((p * v for p, v in zip(pmf, vals)), 0 * vals[0])
    if isinstance(g, HalfGraphon):
        return X
    return _quad_degree(g, float(x), tol)


def _quad_degree(g: Graphon, x: float, tol: float) -> float:
    from scipy.integrate import quad

    val, err = quad(lambda y: float(g.evaluate(x, y)), 0.0, 1.0, epsabs=tol, limit=500)
    return val


def density_sets(g: Graphon, A: SetSpec, B: SetSpec, tol: float = 1e-9,
                 samples: int = 200_000, seed: int = 0):
    """``d(A, B) = integral over A x B of W`` (unnormalised)."""
    if A.measure() == 0 or B.measure() == 0:
        return Fraction(0)
    if isinstance(g, ConstantGraphon):
        return g.p * A.measure() * B.measure()
    if isinstance(g, StepGraphon):
        a = to_blockset(A, g.grid)
        b = to_blockset(B, g.grid)
        ma, mb = a.masses(), b.masses()
        return sum(
            (ma[i] * mb[j] * g.cell(i, j) for i in range(g.grid.size) if ma[i]
             for j in range(g.grid.size) if mb[j]),
            Fraction(0),
        )
    if isinstance(g, CFGraphon):
        return g.density(A, B)
    if isinstance(g, HalfGraphon):
        if isinstance(A, BlockSet) or isinstance(B, BlockSet):
            raise GridMismatch("the half graphon has no block grid")
        return g.density_intervals(A, B)
    return _mc_density(g, A, B, samples, seed)


def _mc_density(g: Graphon, A: SetSpec, B: SetSpec, samples: int, seed: int) -> float:
    if not (isinstance(A, IntervalSet) and isinstance(B, IntervalSet)):
        raise GridMismatch("Monte Carlo set densities need interval sets")
    rng = np.random.default_rng(seed)
    xs = A.sample(rng, samples)
    ys = B.sample(rng, samples)
    vals = g.evaluate_array(xs, ys)
    return float(A.measure() * B.measure()) * float(vals.mean())


def extract_cf_copy(n: int, svejk: Optional[SvejkGraphon] = None) -> Restriction:
    """The square of W_S over segment ``n + 1`` of part ``E``, rescaled to [0, 1]^2."""
    cap = svejk.tower_cap if svejk is not None else DEFAULT_TOWER_CAP
    if n < 0:
        raise OutOfRange("n must be non-negative")
    if n + 1 > cap:
        raise LevelTooLarge(f"segment {n + 1} exceeds the tower cap {cap}")
    g = svejk if svejk is not None else make_svejk(tower_cap=cap)
    seg_lo = 1 - Fraction(1, 1 << n)
    lo = (OFFSET["E"] + seg_lo) / 13
    width = Fraction(1, 1 << (n + 1)) / 13
    return Restriction(g, lo, width)


def cf_for_copy(n: int, cap: int = DEFAULT_TOWER_CAP) -> CFGraphon:
    return make_cf(tower(n, cap))


@dataclass(frozen=True)
class SquareIdentityVerdict:
    hypothesis_holds: bool
    conclusion_holds: bool
    row_products: tuple
    diagonal: tuple


def square_identity_check(F: StepGraphon, xi, tol: float = 0.0) -> SquareIdentityVerdict:
    """Test the implication: constant off-diagonal row products ``xi`` force
    ``integral of F(x, z)^2 dz = xi`` on every block.

    Row products are exact; ``tol`` only loosens the comparisons.
    """
    n = F.grid.size
    w = F.widths
    xi = as_fraction(xi)

    def prod(i, j):
        return sum((F.cell(i, k) * F.cell(j, k) * w[k] for k in range(n)), Fraction(0))

    off = tuple(prod(i, j) for i in range(n) for j in range(n) if i != j)
    diag = tuple(prod(i, i) for i in range(n))
    hyp = all(abs(v - xi) <= tol for v in off)
    if n == 1:
        # a single block: pairs of distinct points still lie in block 0
        hyp = abs(diag[0] - xi) <= tol
    concl = all(abs(v - xi) <= tol for v in diag)
    return SquareIdentityVerdict(hyp, concl, off, diag)


def from_descriptor(d: dict) -> Graphon:
    kind = d.get("kind")
    if kind == "constant":
        return make_constant(Fraction(d["p"]))
    if kind == "step":
        return StepGraphon([Fraction(b) for b in d["breakpoints"]],
                           [[Fraction(v) for v in row] for row in d["values"]])
    if kind in ("conlon-fox", "cf"):
        return make_cf(int(d["m"]))
    if kind == "svejk":
        return make_svejk(int(d.get("tail_k", 40)), int(d.get("tower_cap", DEFAULT_TOWER_CAP)))
    if kind == "half":
        return make_half()
    if kind == "restriction":
        return Restriction(from_descriptor(d["parent"]), Fraction(d["lo"]), Fraction(d["width"]))
    raise OutOfRange(f"unknown graphon kind {kind!r}")
