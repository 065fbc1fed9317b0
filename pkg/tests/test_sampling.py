from __future__ import annotations

from fractions import Fraction
from itertools import combinations, product
from math import prod

import numpy as np
import pytest

from graphonlab.errors import BudgetExceeded, OutOfRange
from graphonlab.graphons import make_cf, make_constant, make_half, make_step
from graphonlab.graphs import SimpleGraph, is_isomorphic, named_graph
from graphonlab.sampling import (
    density_profile_sum_check,
    induced_density_exact,
    induced_density_mc,
    w_random_graph,
)

F = Fraction


def _exact_oracle(H: SimpleGraph, g) -> Fraction:
    """Sum over block assignments and all graphs on |H| labelled vertices."""
    n, k = g.grid.size, H.n
    w = g.grid.widths()
    pairs = list(combinations(range(k), 2))
    total = F(0)
    for blocks in product(range(n), repeat=k):
        weight = prod(w[b] for b in blocks)
        for bits in product((0, 1), repeat=len(pairs)):
            G = SimpleGraph(k, [p for p, e in zip(pairs, bits) if e])
            if not is_isomorphic(G, H):
                continue
            p = F(1)
            for (i, j), e in zip(pairs, bits):
                c = g.cell(blocks[i], blocks[j])
                p *= c if e else 1 - c
            total += weight * p
    return total


def test_exact_on_constant_half():
    g = make_constant(F(1, 2))
    assert induced_density_exact(named_graph("K3"), g) == F(1, 8)
    assert induced_density_exact(named_graph("P3"), g) == F(3, 8)
    assert induced_density_exact(named_graph("K2"), g) == F(1, 2)
    assert induced_density_exact(SimpleGraph(1), g) == 1


@pytest.mark.parametrize("name", ["K3", "P3", "E3", "C4", "P4"])
def test_exact_matches_enumeration_on_step_graphon(name):
    g = make_step([0, F(1, 3), 1], [[1, F(1, 3)], [F(1, 3), F(1, 2)]])
    H = named_graph(name)
    assert induced_density_exact(H, g) == _exact_oracle(H, g)


def test_exact_on_cf():
    g = make_cf(1)
    assert induced_density_exact(named_graph("K2"), g) == F(1, 2)
    assert induced_density_exact(named_graph("K3"), g) == _exact_oracle(named_graph("K3"), g)


def test_exact_budget():
    with pytest.raises(BudgetExceeded):
        induced_density_exact(named_graph("K4"), make_cf(4), budget=1000)
    with pytest.raises(OutOfRange):
        induced_density_exact(named_graph("K3"), make_cf(2))


def test_mc_agrees_with_exact():
    g = make_step([0, F(1, 2), 1], [[F(3, 4), F(1, 4)], [F(1, 4), F(1, 2)]])
    H = named_graph("P3")
    est = induced_density_mc(H, g, 200_000, seed=5)
    assert abs(est.value - float(induced_density_exact(H, g))) <= 4 * est.stderr
    assert est.stderr == pytest.approx((est.value * (1 - est.value) / 200_000) ** 0.5)


def test_mc_is_reproducible():
    g = make_half()
    a = induced_density_mc(named_graph("K3"), g, 50_000, seed=11)
    b = induced_density_mc(named_graph("K3"), g, 50_000, seed=11)
    c = induced_density_mc(named_graph("K3"), g, 50_000, seed=12)
    assert a == b and a.hits != c.hits


def test_w_random_graph_extremes():
    assert w_random_graph(make_constant(1), 6, seed=0) == SimpleGraph.complete(6)
    assert w_random_graph(make_constant(0), 6, seed=0) == SimpleGraph.empty(6)
    assert w_random_graph(make_half(), 7, seed=3) == w_random_graph(make_half(), 7, seed=3)
    with pytest.raises(OutOfRange):
        w_random_graph(make_half(), 0, seed=0)


def test_half_graph_samples_are_threshold_graphs():
    # in the half graphon a vertex set is nested by position: no induced C4 or P4
    for seed in range(20):
        G = w_random_graph(make_half(), 6, seed)
        for quad in combinations(range(6), 4):
            sub = SimpleGraph(4, [(quad.index(i), quad.index(j)) for i, j in G.edges
                                  if i in quad and j in quad])
            assert not is_isomorphic(sub, named_graph("C4"))
            assert not is_isomorphic(sub, named_graph("P4"))


@pytest.mark.parametrize("k", [3, 4])
def test_profile_sums_to_one(k):
    chk = density_profile_sum_check(k, make_cf(4), 20_000, seed=2)
    assert chk.total == 1 and chk.ok
    assert len(chk.estimates) == (4 if k == 3 else 11)


def test_profile_rejects_other_orders():
    with pytest.raises(OutOfRange):
        density_profile_sum_check(5, make_half(), 10, 0)
