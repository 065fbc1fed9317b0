from __future__ import annotations

from itertools import permutations
from math import factorial

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import hadamard

from graphonlab.errors import OutOfRange
from graphonlab.graphs import (
    SimpleGraph,
    canonical_form,
    is_isomorphic,
    isomorphism_classes,
    labeled_copies,
    named_graph,
)
from graphonlab.walsh import fwht, popcounts, xor_convolve


@pytest.mark.parametrize("n", [1, 2, 8, 64])
def test_fwht_is_hadamard_product(n):
    a = np.random.default_rng(n).integers(-50, 50, size=n)
    assert (fwht(a) == hadamard(n) @ a).all()


def test_fwht_rejects_bad_length():
    with pytest.raises(ValueError):
        fwht(np.zeros(6))


def _xor_oracle(u, v):
    n = len(u)
    out = [0] * n
    for a in range(n):
        for b in range(n):
            out[a ^ b] += int(u[a]) * int(v[b])
    return out


@given(st.integers(0, 5), st.integers(0, 2**31))
def test_xor_convolve_small(logn, seed):
    rng = np.random.default_rng(seed)
    n = 1 << logn
    u, v = rng.integers(0, 1000, n), rng.integers(-1000, 1000, n)
    assert [int(x) for x in xor_convolve(u, v)] == _xor_oracle(u, v)


def test_xor_convolve_big_integers():
    u = np.array([2**70, 3, 0, 2**65], dtype=object)
    v = np.array([5, 2**66, 7, 1], dtype=object)
    assert [int(x) for x in xor_convolve(u, v)] == _xor_oracle(u, v)


def test_popcounts():
    assert list(popcounts(16)) == [bin(i).count("1") for i in range(16)]


@pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 4), (4, 11), (5, 34)])
def test_isomorphism_class_counts(n, count):
    assert len(isomorphism_classes(n)) == count


def _automorphisms(h: SimpleGraph) -> int:
    return sum(h.relabel(p).edges == h.edges for p in permutations(range(h.n)))


@pytest.mark.parametrize("name", ["K3", "P3", "C4", "P4", "K4", "E3"])
def test_labeled_copies_orbit_stabiliser(name):
    h = named_graph(name)
    assert len(labeled_copies(h)) == factorial(h.n) // _automorphisms(h)


@given(st.integers(0, 2**10 - 1), st.permutations(range(5)))
def test_canonical_form_invariant(mask, perm):
    g = SimpleGraph.from_mask(5, mask)
    assert canonical_form(g) == canonical_form(g.relabel(perm))
    assert is_isomorphic(g, g.relabel(perm))


def test_non_isomorphic_same_degrees():
    two_triangles = SimpleGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    hexagon = SimpleGraph.cycle(6)
    assert two_triangles.degrees() == hexagon.degrees()
    assert not is_isomorphic(two_triangles, hexagon)


def test_text_round_trip():
    g = SimpleGraph(4, [(0, 1), (2, 3), (1, 3)])
    assert SimpleGraph.from_text(g.to_text()) == g
    assert SimpleGraph.from_text("n=3\n") == SimpleGraph.empty(3)


def test_graph_validation():
    with pytest.raises(OutOfRange):
        SimpleGraph(3, [(0, 0)])
    with pytest.raises(OutOfRange):
        SimpleGraph(3, [(0, 3)])
    with pytest.raises(OutOfRange):
        named_graph("Q7")
