"""W-random graphs and induced subgraph densities.

Randomness convention: a sample of order ``k`` consumes ``k`` uniforms for
the vertices followed by one uniform per pair ``(i, j)``, ``i < j``, in
lexicographic order; the pair is an edge iff its uniform is below
``W(x_i, x_j)``.  Estimators split their budget into chunks of
``CHUNK`` samples, chunk ``c`` drawing from the ``c``-th child of
``SeedSequence(seed)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, OutOfRange
from .graphons.base import BlockGraphon, Graphon
from .graphons.cf import CFGraphon
from .graphons.step import StepGraphon, make_constant
from .graphs import SimpleGraph, canonical_mask, isomorphism_classes, labeled_copies

CHUNK = 1 << 16
DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class DensityEstimate:
    value: float
    stderr: float
    samples: int
    seed: int
    hits: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _chunks(samples: int, seed: int):
    children = np.random.SeedSequence(seed).spawn(max(1, -(-samples // CHUNK)))
    left = samples
    for child in children:
        size = min(CHUNK, left)
        left -= size
        yield size, np.random.default_rng(child)


def _draw(g: Graphon, rng: np.random.Generator, size: int, k: int):
    """Vertex points and pair uniforms for ``size`` samples of order ``k``."""
    npairs = k * (k - 1) // 2
    u = rng.random((size, k + npairs))
    xs, us = u[:, :k], u[:, k:]
    if getattr(g, "is_deep", None) is not None:
        # points outside the evaluable region are redrawn from a side stream
        side = np.random.default_rng(int(rng.integers(2**63)))
        xs = _redraw(g, side, xs)
    return xs, us


def _redraw(g: Graphon, rng: np.random.Generator, pts: np.ndarray) -> np.ndarray:
    out = pts.copy()
    flat = out.reshape(-1)
    for i in range(flat.size):
        while g.is_deep(float(flat[i])):
            flat[i] = rng.random()
    return out


def _edge_masks(g: Graphon, xs: np.ndarray, us: np.ndarray) -> np.ndarray:
    k = xs.shape[1]
    masks = np.zeros(xs.shape[0], dtype=np.int64)
    for p, (i, j) in enumerate(combinations(range(k), 2)):
        w = g.evaluate_array(xs[:, i], xs[:, j])
        masks |= (us[:, p] < w).astype(np.int64) << p
    return masks


def w_random_graph(g: Graphon, k: int, seed: int) -> SimpleGraph:
    if k < 1:
        raise OutOfRange("k must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    xs, us = _draw(g, rng, 1, k)
    return SimpleGraph.from_mask(k, int(_edge_masks(g, xs, us)[0]))


def sample_masks(g: Graphon, k: int, samples: int, seed: int) -> Iterable[np.ndarray]:
    for size, rng in _chunks(samples, seed):
        xs, us = _draw(g, rng, size, k)
        yield _edge_masks(g, xs, us)


def _bernoulli(hits: int, samples: int, seed: int) -> DensityEstimate:
    v = hits / samples
    return DensityEstimate(v, math.sqrt(v * (1 - v) / samples), samples, seed, hits)


def _class_of(k: int, masks: np.ndarray) -> dict[int, int]:
    uniq = np.unique(masks)
    return {int(m): canonical_mask(k, int(m)) for m in uniq}


def induced_density_mc(H: SimpleGraph, g: Graphon, samples: int, seed: int) -> DensityEstimate:
    """Unbiased estimate of the probability that a W-random graph of order
    ``|H|`` is isomorphic to ``H``."""
    if H.n > 10:
        raise OutOfRange("|H| is limited to 10")
    if samples < 1:
        raise OutOfRange("samples must be positive")
    if H.n <= 1:
        return DensityEstimate(1.0, 0.0, samples, seed, samples)
    target = canonical_mask(H.n, H.mask())
    hits = 0
    for masks in sample_masks(g, H.n, samples, seed):
        cls = _class_of(H.n, masks)
        good = np.array([m for m, c in cls.items() if c == target], dtype=np.int64)
        hits += int(np.isin(masks, good).sum())
    return _bernoulli(hits, samples, seed)


# -- exact densities on block graphons ------------------------------------------


def _block_data(g: BlockGraphon):
    """Integer cell matrix, its denominator, integer widths and their denominator."""
    if isinstance(g, CFGraphon):
        if not g.exact:
            raise OutOfRange("exact densities need a perfect-square m")
        ints, den = g.int_values()
        n = g.n_blocks
        idx = np.arange(n)
        cells = ints[np.bitwise_count((idx[:, None] ^ idx[None, :]).astype(np.uint64))]
        return cells.astype(object), den, np.ones(n, dtype=object), n
    if isinstance(g, StepGraphon):
        vals = [v for row in g.values for v in row]
        den = math.lcm(*(v.denominator for v in vals))
        n = g.grid.size
        cells = np.array([[int(v * den) for v in row] for row in g.values], dtype=object)
        ws = g.widths
        wden = math.lcm(*(w.denominator for w in ws))
        return cells, den, np.array([int(w * wden) for w in ws], dtype=object), wden
    raise OutOfRange("exact densities need a step or Conlon-Fox graphon")


def labeled_probability(mask: int, k: int, cells, den, wts, wden) -> Fraction:
    """``P(G(k, W) == the labelled graph with pair mask)`` as an exact rational."""
    n = len(wts)
    pairs = list(combinations(range(k), 2))
    co = den - cells
    mats = {p: (cells if mask >> i & 1 else co) for i, p in enumerate(pairs)}
    # contract vertex by vertex: state[b_0..b_{v-1}] holds partial products
    state = np.array([1], dtype=object).reshape(())
    for v in range(k):
        shape = (1,) * v + (n,)
        term = state[..., None] * wts.reshape(shape)
        for u in range(v):
            m = mats[(u, v)]
            sh = [1] * (v + 1)
            sh[u] = n
            sh[v] = n
            term = term * m.reshape(sh)
        state = term
    total = int(state.sum()) if k else 1
    return Fraction(total, den ** len(pairs) * wden**k)


def induced_density_exact(H: SimpleGraph, g: BlockGraphon, budget: int = DEFAULT_BUDGET) -> Fraction:
    """Exact ``d(H, W)``: the sum over labelled copies of ``H`` of their probabilities."""
    cells, den, wts, wden = _block_data(g)
    n = len(wts)
    if n**H.n > budget:
        raise BudgetExceeded(f"{n}^{H.n} block assignments exceed the budget {budget}")
    return sum(
        (labeled_probability(m, H.n, cells, den, wts, wden) for m in labeled_copies(H)),
        Fraction(0),
    )


# -- harnesses -------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileCheck:
    k: int
    estimates: dict
    total: Fraction
    ok: bool


def density_profile_sum_check(k: int, g: Graphon, samples: int, seed: int) -> ProfileCheck:
    """Estimate every isomorphism class on ``k`` vertices from one sample
    stream; the estimates must sum to exactly one."""
    if k not in (3, 4):
        raise OutOfRange("k must be 3 or 4")
    classes = isomorphism_classes(k)
    counts = {c: 0 for c in classes}
    for masks in sample_masks(g, k, samples, seed):
        cls = _class_of(k, masks)
        vals, cnt = np.unique(masks, return_counts=True)
        for m, c in zip(vals, cnt):
            counts[cls[int(m)]] += int(c)
    ests = {SimpleGraph.from_mask(k, c): Fraction(v, samples) for c, v in counts.items()}
    total = sum(ests.values(), Fraction(0))
    return ProfileCheck(k, ests, total, total == 1)


@dataclass(frozen=True)
class ProbeRow:
    m: int
    estimate: DensityEstimate
    reference: Fraction

    @property
    def distance(self) -> float:
        return abs(self.estimate.value - float(self.reference))


def cf_convergence_probe(H: SimpleGraph, ms: Sequence[int], samples: int, seed: int) -> list[ProbeRow]:
    """``d(H, W_CF^m)`` for each ``m`` beside ``d(H, 1/2)``, with a shared seed."""
    from .graphons.cf import make_cf

    ref = induced_density_exact(H, make_constant(Fraction(1, 2)))
    return [ProbeRow(m, induced_density_mc(H, make_cf(m), samples, seed), ref) for m in ms]
