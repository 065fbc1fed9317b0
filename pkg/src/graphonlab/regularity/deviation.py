"""Regularity defect of a partition, its energy, and Frieze-Kannan refinement.

For a partition ``U_1 .. U_k`` the structured density of ``(A, B)`` is
``sum_ij rho_ij |U_i n A| |U_j n B|`` with ``rho_ij = d(U_i, U_j) / (|U_i| |U_j|)``.
The deviation of ``(A, B)`` is the absolute gap between ``d(A, B)`` and this
sum.  Only partitions made of whole blocks are handled here, so every
intersection ``|U_i n A|`` is determined by the block weights of ``A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from ..errors import BudgetExceeded, GraphonLabError, NullPart, TooManyBlocks
from ..graphons.base import Graphon
from ..sets import BlockSet, PartitionSpec
from .kernel import BlockKernel, _F64_EXACT, one_hot, partition_labels, relabel

MAX_EXACT_BLOCKS = 22
DEFAULT_RESTARTS = 20
_ENUM_CHUNK = 1 << 15

Number = Union[Fraction, float]


@dataclass(frozen=True)
class DeviationWitness:
    A: BlockSet
    B: BlockSet
    deviation: Number
    exact: bool
    method: str

    def to_dict(self) -> dict:
        return {
            "A": self.A.to_dict(),
            "B": self.B.to_dict(),
            "deviation": str(self.deviation),
            "exact": self.exact,
            "method": self.method,
        }


@dataclass
class EnergyTrace:
    records: list = field(default_factory=list)  # (step, parts, energy)

    def add(self, step: int, parts: int, energy: Number) -> None:
        self.records.append((step, parts, energy))

    @property
    def energies(self) -> list:
        return [e for _, _, e in self.records]

    def increments(self) -> list:
        e = self.energies
        return [b - a for a, b in zip(e, e[1:])]

    def is_monotone(self) -> bool:
        return all(d >= 0 for d in self.increments())

    def to_csv(self) -> str:
        lines = ["step,parts,energy"]
        lines += [f"{s},{k},{float(e)!r}" for s, k, e in self.records]
        return "\n".join(lines) + "\n"


class _Structure:
    """Exact part statistics of a whole-block partition."""

    def __init__(self, K: BlockKernel, labels: np.ndarray):
        self.K = K
        self.labels = labels
        self.k = int(labels.max()) + 1
        F = one_hot(labels, self.k)
        self.sizes = [int(v) for v in F @ K.wint]  # |U_i| * wden
        if min(self.sizes) == 0:
            raise NullPart("partition has an empty part")
        if K.exact:
            self.C = np.asarray(K.gram(F), dtype=object)  # d(U_i, U_j) * L * wden^2
        else:
            w = K.weights
            self.C = np.array([[float(np.dot(F[i] * w, K.apply(F[j]))) for j in range(self.k)]
                               for i in range(self.k)])

    def rho_float(self) -> np.ndarray:
        s = np.array(self.sizes, dtype=float)
        if self.K.exact:
            C = np.array([[float(Fraction(int(c), self.K.L * self.K.wden**2)) for c in row] for row in self.C])
        else:
            C = self.C
        size = s / self.K.wden
        return C / np.outer(size, size)

    def energy(self) -> Number:
        K = self.K
        if not K.exact:
            s = np.array(self.sizes, dtype=float) / K.wden
            return float((self.C**2 / np.outer(s, s)).sum())
        lam = math.lcm(*self.sizes)
        f = [lam // s for s in self.sizes]
        total = 0
        for i in range(self.k):
            for j in range(self.k):
                c = int(self.C[i, j])
                if c:
                    total += c * c * f[i] * f[j]
        return Fraction(total, lam * lam * K.L**2 * K.wden**2)

    def structured(self, x: np.ndarray, y: np.ndarray) -> Number:
        """Structured density of block-indicator numerators ``x``, ``y`` (denominator 1)."""
        K = self.K
        a = [0] * self.k
        b = [0] * self.k
        xw = np.asarray(x, dtype=object) * K.wint
        yw = np.asarray(y, dtype=object) * K.wint
        for i, v in zip(self.labels, xw):
            a[i] += int(v)
        for i, v in zip(self.labels, yw):
            b[i] += int(v)
        if not K.exact:
            rho = self.rho_float()
            return float(np.array(a, float) @ rho @ np.array(b, float)) / K.wden**2
        lam = math.lcm(*self.sizes)
        alpha = np.array([a[i] * (lam // self.sizes[i]) for i in range(self.k)], dtype=object)
        beta = np.array([b[i] * (lam // self.sizes[i]) for i in range(self.k)], dtype=object)
        num = int(alpha @ (self.C @ beta))
        return Fraction(num, lam * lam * K.L * K.wden**2)

    def deviation(self, x: np.ndarray, y: np.ndarray) -> Number:
        K = self.K
        if K.exact:
            d = K.density(x, 1, y, 1)
        else:
            d = float(np.dot(np.asarray(x, float) * K.weights, K.apply(y)))
        return abs(d - self.structured(x, y))

    def integer_defect(self) -> tuple[np.ndarray, int]:
        """Matrix ``D`` and scale ``s`` with ``x^T D y / s`` the signed defect."""
        K = self.K
        lam = math.lcm(*self.sizes)
        wint = [int(v) for v in K.wint]
        n = K.n
        D = np.empty((n, n), dtype=object)
        lab = [int(v) for v in self.labels]
        for a in range(n):
            ia = lab[a]
            for b in range(n):
                ib = lab[b]
                pi = int(self.C[ia, ib]) * wint[a] * wint[b] * (lam // self.sizes[ia]) * (lam // self.sizes[ib])
                D[a, b] = int(K.cells[a, b]) * wint[a] * wint[b] * lam * lam - pi
        return D, lam * lam * K.L * K.wden**2

    def float_defect(self) -> np.ndarray:
        K = self.K
        w = K.weights
        rho = self.rho_float()
        return (K.cell_float() - rho[np.ix_(self.labels, self.labels)]) * np.outer(w, w)


def _kernel_and_labels(g: Graphon, P: PartitionSpec):
    K = BlockKernel(g)
    return K, partition_labels(P, K.grid)


def energy(g: Graphon, P: PartitionSpec) -> Number:
    """``sum_ij d(U_i, U_j)^2 / (|U_i| |U_j|)``; exact when ``g`` is."""
    K = BlockKernel(g)
    if P.grid is None:
        P = P.on_grid(K.grid)
    if all(isinstance(p, BlockSet) and p.is_whole_blocks() for p in P.parts):
        return _Structure(K, partition_labels(P, K.grid)).energy()
    # parts that split blocks: work with their weight numerators directly
    den = math.lcm(*(p.den for p in P.parts))
    F = np.stack([p.with_den(den) for p in P.parts])
    sizes = [int(v) for v in (F.astype(object) @ K.wint.astype(object))]
    if not K.exact:
        raise GraphonLabError("split-block energies are only supported on exact graphons")
    C = K.gram(F)
    total = Fraction(0)
    for i in range(len(sizes)):
        for j in range(len(sizes)):
            total += Fraction(int(C[i, j]) ** 2, sizes[i] * sizes[j])
    return total / (K.L**2 * K.wden**2 * den**2)


def deviation_value(g: Graphon, P: PartitionSpec, A: BlockSet, B: BlockSet) -> Number:
    """Recompute the deviation of whole-block sets ``A``, ``B`` from scratch."""
    K, labels = _kernel_and_labels(g, P)
    for s in (A, B):
        if not s.is_whole_blocks():
            raise GraphonLabError("witness sets must consist of whole blocks")
    x = (A.num == A.den).astype(np.int64)
    y = (B.num == B.den).astype(np.int64)
    return _Structure(K, labels).deviation(x, y)


def _best_over_subsets(D: np.ndarray) -> tuple[int, np.ndarray, float]:
    """Maximise ``|x^T D y|`` over 0/1 vectors; returns (x index, y, value)."""
    n = D.shape[0]
    bits = np.arange(n, dtype=np.int64)
    best_val, best_idx, best_r = -1.0, 0, None
    for start in range(0, 1 << n, _ENUM_CHUNK):
        idx = np.arange(start, min(start + _ENUM_CHUNK, 1 << n), dtype=np.int64)
        X = ((idx[:, None] >> bits) & 1).astype(np.float64)
        R = X @ D
        pos = np.where(R > 0, R, 0).sum(axis=1)
        neg = -np.where(R < 0, R, 0).sum(axis=1)
        val = np.maximum(pos, neg)
        j = int(np.argmax(val))
        if val[j] > best_val:
            best_val, best_idx, best_r = float(val[j]), int(idx[j]), R[j]
    pos = best_r[best_r > 0].sum()
    neg = -best_r[best_r < 0].sum()
    y = (best_r > 0) if pos >= neg else (best_r < 0)
    return best_idx, y.astype(np.int64), best_val


def deviation_exact(g: Graphon, P: PartitionSpec) -> DeviationWitness:
    """Exhaustive maximisation over block subsets.

    The defect is bilinear in the block indicators, so for each candidate
    ``A`` the best ``B`` takes exactly the blocks whose marginal has the
    better sign.  Ties resolve to the smallest ``A`` in binary order.
    """
    K, labels = _kernel_and_labels(g, P)
    if K.n > MAX_EXACT_BLOCKS:
        raise TooManyBlocks(f"{K.n} blocks exceed the exhaustive limit {MAX_EXACT_BLOCKS}")
    st = _Structure(K, labels)
    if K.exact:
        D, scale = st.integer_defect()
        mx = max(abs(int(v)) for v in D.ravel())
        Df = np.array(D, dtype=np.float64)
        exact_floats = mx * K.n < _F64_EXACT
        if not exact_floats:
            Df = Df / float(scale)
    else:
        Df = st.float_defect()
        exact_floats = False
    xi, y, _ = _best_over_subsets(Df)
    x = np.array([(xi >> a) & 1 for a in range(K.n)], dtype=np.int64)
    dev = st.deviation(x, y)
    return DeviationWitness(BlockSet.from_mask(K.grid, x), BlockSet.from_mask(K.grid, y), dev, K.exact, "exhaustive")


def _defect_operator(K: BlockKernel, st: _Structure):
    """Float map ``y -> D y`` with ``D[a, b] = w_a w_b (W_ab - rho_ab)``."""
    w = K.weights
    rho = st.rho_float()
    lab = st.labels
    k = st.k

    def op(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        z = np.bincount(lab, weights=y * w, minlength=k)
        return w * (K.apply(y) - (rho @ z)[lab])

    return op


def _alternate(op, y: np.ndarray, sign: float, max_iter: int = 200) -> tuple[np.ndarray, np.ndarray, float]:
    best = -np.inf
    x = y
    for _ in range(max_iter):
        r = sign * op(y)
        x = (r > 0).astype(np.int64)
        val = float(r[x == 1].sum())
        r2 = sign * op(x)
        y_new = (r2 > 0).astype(np.int64)
        val2 = float(r2[y_new == 1].sum())
        if val2 <= best + 1e-15:
            break
        best = max(val, val2)
        y = y_new
    return x, y, best


def deviation_heuristic(g: Graphon, P: PartitionSpec, restarts: int = DEFAULT_RESTARTS,
                        seed: int = 0) -> DeviationWitness:
    """Alternating sign maximisation from random starts.

    The returned witness is rescored exactly (for exact graphons), so its
    deviation is a certified lower bound on the supremum.
    """
    if restarts < 1:
        raise GraphonLabError("restarts must be positive")
    K, labels = _kernel_and_labels(g, P)
    st = _Structure(K, labels)
    op = _defect_operator(K, st)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    best = (-1.0, None, None)
    for _ in range(restarts):
        y0 = (rng.random(K.n) < 0.5).astype(np.int64)
        for sign in (1.0, -1.0):
            x, y, val = _alternate(op, y0, sign)
            if val > best[0]:
                best = (val, x, y)
    _, x, y = best
    dev = st.deviation(x, y)
    return DeviationWitness(BlockSet.from_mask(K.grid, x), BlockSet.from_mask(K.grid, y), dev, K.exact, "heuristic")


def _find_witness(g, K, labels, restarts, seed) -> DeviationWitness:
    P = PartitionSpec.from_labels(K.grid, labels)
    if K.n <= MAX_EXACT_BLOCKS:
        return deviation_exact(g, P)
    return deviation_heuristic(g, P, restarts, seed)


def fk_partition(g: Graphon, epsilon, deviation_budget: Optional[int] = None,
                 seed: int = 0) -> tuple[PartitionSpec, EnergyTrace]:
    """Refine by witness sets until no witness above ``epsilon`` is found.

    Every executed step must raise the energy by at least ``epsilon**2``;
    the energy lies in ``[0, 1]``, so more than ``ceil(epsilon**-2) + 1``
    steps would contradict that law.
    """
    eps = Fraction(epsilon) if not isinstance(epsilon, float) else Fraction(epsilon).limit_denominator(10**12)
    if eps <= 0:
        raise GraphonLabError("epsilon must be positive")
    K = BlockKernel(g)
    restarts = deviation_budget or DEFAULT_RESTARTS
    labels = np.zeros(K.n, dtype=np.int64)
    trace = EnergyTrace()
    e = _Structure(K, labels).energy()
    trace.add(0, 1, e)
    limit = math.ceil(1 / eps**2) + 1
    step = 0
    while eps < 1:
        wit = _find_witness(g, K, labels, restarts, seed + step)
        if not wit.deviation > eps:
            break
        step += 1
        if step > limit:
            raise BudgetExceeded(f"more than {limit} refinement steps")
        xa = (wit.A.num == wit.A.den).astype(np.int64)
        xb = (wit.B.num == wit.B.den).astype(np.int64)
        labels = relabel(labels * 4 + xa * 2 + xb)
        e_new = _Structure(K, labels).energy()
        if e_new - e < eps**2:
            raise GraphonLabError(f"energy rose by {float(e_new - e):.3g} < epsilon^2 at step {step}")
        e = e_new
        trace.add(step, int(labels.max()) + 1, e)
    return PartitionSpec.from_labels(K.grid, labels), trace
