"""Evaluating ordinary and decorated constraints against a graphon."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

import numpy as np

from ..errors import IncompatibleGraphs, OutOfRange
from ..graphons.base import BlockGraphon, Graphon
from ..graphons.cf import CFGraphon
from ..graphons.step import StepGraphon
from ..graphs import SimpleGraph
from ..sampling import induced_density_exact, induced_density_mc
from .decorated import DecoratedGraph, check_compatible
from .expr import Const, Constraint, Expr, GraphTerm, Prod, Sum, graphs_in
from .parts import PartTable

Z_ORDINARY = 4.0
NULL_BOUND = 1e-6
NULL_CONFIDENCE = 0.99
EXACT_BUDGET = 10**6


@dataclass(frozen=True)
class Value:
    """An estimate with a standard error (zero for exact values)."""

    value: object
    stderr: float = 0.0

    @property
    def exact(self) -> bool:
        return self.stderr == 0.0 and isinstance(self.value, (int, Fraction))

    def __add__(self, other: "Value") -> "Value":
        return Value(_add(self.value, other.value), math.hypot(self.stderr, other.stderr))

    def __mul__(self, other: "Value") -> "Value":
        se = math.hypot(abs(float(other.value)) * self.stderr, abs(float(self.value)) * other.stderr)
        return Value(_mul(self.value, other.value), se)


def _add(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return float(a) + float(b)
    return a + b


def _mul(a, b):
    if isinstance(a, float) or isinstance(b, float):
        return float(a) * float(b)
    return a * b


@dataclass(frozen=True)
class SatisfactionVerdict:
    status: str  # satisfied, violated, null-satisfied, inconclusive
    lhs: object
    rhs: object
    lhs_stderr: float
    rhs_stderr: float
    acceptance: Optional[float] = None
    tuples: int = 0
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status in ("satisfied", "null-satisfied")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lhs"], d["rhs"] = str(self.lhs), str(self.rhs)
        return d


def combine(e: Expr, leaf) -> Value:
    """Evaluate ``e`` with ``leaf(graph)`` supplying each graph's value."""
    if isinstance(e, Const):
        return Value(e.value)
    if isinstance(e, GraphTerm):
        return leaf(e.graph)
    vals = [combine(it, leaf) for it in e.items]
    out = vals[0]
    for v in vals[1:]:
        out = out + v if isinstance(e, Sum) else out * v
    return out


# -- ordinary constraints ------------------------------------------------------


def _exact_capable(g: Graphon, H: SimpleGraph) -> bool:
    if isinstance(g, CFGraphon) and not g.exact:
        return False
    if isinstance(g, (StepGraphon, CFGraphon)):
        n = g.grid.size
        return n**H.n <= EXACT_BUDGET
    return False


def graph_value(g: Graphon, H: SimpleGraph, samples: int, seed: int) -> Value:
    """Induced density of ``H``; exact on small block graphons."""
    if H.n > 10:
        raise OutOfRange("graphs in expressions are limited to ten vertices")
    if _exact_capable(g, H):
        return Value(induced_density_exact(H, g))
    est = induced_density_mc(H, g, samples, seed)
    return Value(est.value, est.stderr)


def evaluate_expression(e: Expr, g: Graphon, samples: int = 100_000, seed: int = 0) -> Value:
    """Every graph is estimated from the same seeded stream, so sums add exactly."""
    cache: dict = {}

    def leaf(H):
        if isinstance(H, DecoratedGraph):
            raise IncompatibleGraphs("decorated graphs need a part table")
        if H not in cache:
            cache[H] = graph_value(g, H, samples, seed)
        return cache[H]

    return combine(e, leaf)


def evaluate_ordinary(c: Constraint, g: Graphon, samples: int = 100_000, seed: int = 0,
                      z: float = Z_ORDINARY) -> SatisfactionVerdict:
    lhs = evaluate_expression(c.lhs, g, samples, seed)
    rhs = evaluate_expression(c.rhs, g, samples, seed)
    se = math.hypot(lhs.stderr, rhs.stderr)
    if lhs.exact and rhs.exact:
        status = "satisfied" if lhs.value == rhs.value else "violated"
    else:
        gap = abs(float(lhs.value) - float(rhs.value))
        status = "satisfied" if gap <= z * se else "violated"
    return SatisfactionVerdict(status, lhs.value, rhs.value, lhs.stderr, rhs.stderr)


# -- decorated constraints -------------------------------------------------------


def _null_upper_bound(hits: int, draws: int, confidence: float = NULL_CONFIDENCE) -> float:
    """One-sided Clopper-Pearson upper bound on a binomial proportion."""
    if hits >= draws:
        return 1.0
    from scipy.stats import beta

    return float(beta.ppf(confidence, hits + 1, draws - hits))


def _root_pairs(sig) -> list[tuple[int, int, bool]]:
    _, pairs = sig
    n = len(sig[0])
    return [(a, b, s) for (a, b), s in zip(combinations(range(n), 2), pairs)]


def exact_acceptance(g: BlockGraphon, parts: PartTable, sig) -> Optional[Fraction]:
    """Measure of valid root tuples for a step graphon, or ``None`` if too large."""
    if not isinstance(g, StepGraphon):
        return None
    labels = sig[0]
    grid = g.grid
    bps = grid.breakpoints
    per_root = []
    for lab in labels:
        mem = parts.members(lab)
        per_root.append([(i, mem.overlap(bps[i], bps[i + 1])) for i in range(grid.size)
                         if mem.overlap(bps[i], bps[i + 1]) > 0])
    if math.prod(len(r) for r in per_root) > EXACT_BUDGET:
        return None
    pairs = _root_pairs(sig)
    total = Fraction(0)

    def rec(idx: int, chosen: list, mass: Fraction):
        nonlocal total
        if idx == len(per_root):
            total += mass
            return
        for blk, w in per_root[idx]:
            ok = True
            for a, b, s in pairs:
                if b == idx:
                    v = g.cell(chosen[a], blk)
                    if (s and not v > 0) or (not s and not v < 1):
                        ok = False
                        break
            if ok:
                rec(idx + 1, chosen + [blk], mass * w)

    rec(0, [], Fraction(1))
    norm = math.prod(parts[lab].members.measure() for lab in labels) if labels else Fraction(1)
    return total / norm


def _sample_roots(g: Graphon, parts: PartTable, sig, count: int, rng: np.random.Generator):
    labels = sig[0]
    xs = np.column_stack([parts.members(lab).sample(rng, count) for lab in labels]) if labels \
        else np.zeros((count, 0))
    ok = np.ones(count, dtype=bool)
    for a, b, s in _root_pairs(sig):
        w = np.asarray(g.evaluate_array(xs[:, a], xs[:, b]), dtype=float)
        ok &= (w > 0) if s else (w < 1)
    return xs, ok


def _graph_samples(H: DecoratedGraph, g: Graphon, parts: PartTable, roots: np.ndarray,
                   n: int, rng: np.random.Generator, estimator: str) -> np.ndarray:
    """Per-tuple samples (shape ``(tuples, n)``) whose mean is the conditional probability."""
    T = roots.shape[0]
    pos = {v.id: ("r", v.root - 1) for v in H.roots}
    pts = {}
    for v in H.nonroots:
        pts[v.id] = parts.members(v.label).sample(rng, T * n).reshape(T, n)
        pos[v.id] = ("n", v.id)

    def coords(vid):
        kind, key = pos[vid]
        if kind == "r":
            return np.broadcast_to(roots[:, key][:, None], (T, n))
        return pts[key]

    out = np.ones((T, n))
    for (i, j) in sorted(H.edges | H.nonedges):
        if pos[i][0] == "r" and pos[j][0] == "r":
            continue  # root pairs are conditioned on, not weighted
        w = np.asarray(g.evaluate_array(coords(i), coords(j)), dtype=float)
        p = w if (i, j) in H.edges else 1.0 - w
        if estimator == "bernoulli":
            out *= rng.random((T, n)) < p
        else:
            out *= p
    return out


def evaluate_decorated(c: Constraint, g: Graphon, parts: PartTable, root_samples: int = 200,
                       nonroot_samples: int = 2000, seed: int = 0, estimator: str = "product",
                       level: float = 0.01) -> SatisfactionVerdict:
    """Check ``lhs = rhs`` conditionally on sampled root tuples.

    Root tuples come from the labelled parts and are kept only when ``W > 0``
    on every root edge and ``W < 1`` on every root non-edge.  For each kept
    tuple every decorated graph is estimated from fresh non-root points; the
    ``product`` estimator averages the product of ``W`` or ``1 - W`` over the
    specified pairs, the ``bernoulli`` estimator draws those pairs instead.
    Unspecified pairs contribute a factor ``W + (1 - W) = 1``, which is the
    sum over their two completions.  The per-tuple comparison uses a
    Bonferroni-corrected normal threshold at overall level ``level``.
    """
    from scipy.stats import norm

    if estimator not in ("product", "bernoulli"):
        raise OutOfRange("estimator must be 'product' or 'bernoulli'")
    graphs = [h for h in graphs_in(c.lhs) + graphs_in(c.rhs)]
    if any(not isinstance(h, DecoratedGraph) for h in graphs):
        raise IncompatibleGraphs("a decorated constraint may only contain decorated graphs")
    sig = check_compatible(graphs) if graphs else ((), ())
    for h in graphs:
        for lab in h.labels:
            parts.members(lab)
    ss = np.random.SeedSequence(seed)
    root_ss, graph_ss = ss.spawn(2)
    rng = np.random.default_rng(root_ss)

    exact_acc = exact_acceptance(g, parts, sig) if sig[0] else Fraction(1)
    if exact_acc == 0:
        return SatisfactionVerdict("null-satisfied", 0, 0, 0.0, 0.0, 0.0, 0, {"acceptance_exact": "0"})

    xs, ok = _sample_roots(g, parts, sig, root_samples, rng)
    hits = int(ok.sum())
    acc = hits / root_samples
    details: dict = {}
    if exact_acc is not None:
        details["acceptance_exact"] = str(exact_acc)
    if hits == 0:
        upper = _null_upper_bound(0, root_samples)
        details["acceptance_upper"] = upper
        status = "null-satisfied" if upper < NULL_BOUND else "inconclusive"
        return SatisfactionVerdict(status, 0, 0, 0.0, 0.0, acc, 0, details)

    roots = xs[ok]
    T = roots.shape[0]
    grng = np.random.default_rng(graph_ss)
    samples = {}
    for h in dict.fromkeys(graphs):
        samples[h] = _graph_samples(h, g, parts, roots, nonroot_samples, grng, estimator)

    def per_tuple(e: Expr):
        """Per-tuple values and standard errors of an expression."""
        def leaf(h):
            s = samples[h]
            return (s.mean(axis=1), s.std(axis=1, ddof=1) / math.sqrt(nonroot_samples) if nonroot_samples > 1
                    else np.zeros(T))

        def rec(e):
            if isinstance(e, Const):
                return np.full(T, float(e.value)), np.zeros(T)
            if isinstance(e, GraphTerm):
                return leaf(e.graph)
            vals = [rec(it) for it in e.items]
            v, s = vals[0]
            for v2, s2 in vals[1:]:
                if isinstance(e, Sum):
                    v, s = v + v2, np.hypot(s, s2)
                else:
                    v, s = v * v2, np.hypot(np.abs(v2) * s, np.abs(v) * s2)
            return v, s

        return rec(e)

    lv, ls = per_tuple(c.lhs)
    rv, rs = per_tuple(c.rhs)
    z = float(norm.ppf(1 - level / (2 * T)))
    se = np.hypot(ls, rs)
    gap = np.abs(lv - rv)
    bad = gap > np.maximum(z * se, 1e-12)
    status = "violated" if bad.any() else "satisfied"
    details.update({"z": z, "worst_gap": float(gap.max()), "bad_tuples": int(bad.sum())})
    lhs_mean, rhs_mean = float(lv.mean()), float(rv.mean())
    lhs_se = _overall_se(c.lhs, samples, lv, T, nonroot_samples)
    rhs_se = _overall_se(c.rhs, samples, rv, T, nonroot_samples)
    return SatisfactionVerdict(status, lhs_mean, rhs_mean, lhs_se, rhs_se, acc, T, details)


def _overall_se(e: Expr, samples: dict, per_tuple: np.ndarray, T: int, n: int) -> float:
    """Standard error of the mean over tuples and non-root samples."""
    if isinstance(e, GraphTerm):
        s = samples[e.graph]
        return float(s.std(ddof=1) / math.sqrt(s.size)) if s.size > 1 else 0.0
    if isinstance(e, Const):
        return 0.0
    return float(per_tuple.std(ddof=1) / math.sqrt(T)) if T > 1 else 0.0


def decorated_probability(H: DecoratedGraph, g: Graphon, parts: PartTable, samples: int = 10**6,
                          seed: int = 0, estimator: str = "product") -> Value:
    """Unconditional average of ``H``'s substituted probability over valid root tuples."""
    c = Constraint(GraphTerm(H), Const(Fraction(0)))
    v = evaluate_decorated(c, g, parts, root_samples=max(1, samples // 1000) if H.roots else 1,
                           nonroot_samples=1000 if H.roots else samples, seed=seed, estimator=estimator)
    return Value(v.lhs, v.lhs_stderr)
