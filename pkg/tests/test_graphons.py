from __future__ import annotations

import math
from fractions import Fraction
from itertools import product
from math import isqrt, sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphonlab.coords import sign_vector_int, trunc
from graphonlab.errors import LevelTooLarge, MTooLarge, OutOfDomain, OutOfRange
from graphonlab.graphons import (
    CFGraphon,
    degree,
    density_sets,
    extract_cf_copy,
    fmt_value,
    from_descriptor,
    interior_measure_cf,
    make_cf,
    make_constant,
    make_half,
    make_step,
    make_svejk,
    square_identity_check,
)
from graphonlab.graphons.svejk import OFFSET, PARTS, R_COLUMN, TABLE_DEGREES, part_interval, split_point
from graphonlab.sets import BlockGrid, BlockSet, IntervalSet

F = Fraction


# -- Conlon-Fox ------------------------------------------------------------------


def _cf_oracle(m, a, b):
    """Cell value straight from the sign vectors."""
    u, v = sign_vector_int(a, m), sign_vector_int(b, m)
    ip = sum(p * q for p, q in zip(u, v))
    s = isqrt(m)
    if s * s == m:
        return trunc(F(1, 2) + F(ip, 4 * s))
    return trunc(0.5 + ip / (4 * sqrt(m)))


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_cf_cells_match_vector_formula(m):
    g = make_cf(m)
    for a, b in product(range(1 << m), repeat=2):
        assert g.cell(a, b) == _cf_oracle(m, a, b)


def test_cf_value_examples():
    g = make_cf(4)
    assert g.evaluate(F(1, 32), F(1, 33)) == 1  # same block: 1/2 + 4/8
    assert g.evaluate(0, 1 - F(1, 32)) == 0  # opposite vectors
    assert make_cf(1).cell(0, 1) == F(1, 4)
    assert isinstance(make_cf(2).cell(0, 0), float)


def test_cf_parameter_range():
    for m in (0, 63):
        with pytest.raises(MTooLarge):
            make_cf(m)


def _brute_density(g: CFGraphon, A: IntervalSet, B: IntervalSet):
    n = g.n_blocks
    ma = [A.overlap(F(i, n), F(i + 1, n)) for i in range(n)]
    mb = [B.overlap(F(i, n), F(i + 1, n)) for i in range(n)]
    return sum((ma[i] * mb[j] * g.cell(i, j) for i in range(n) if ma[i] for j in range(n) if mb[j]), F(0))


intervals = st.lists(st.fractions(0, 1, max_denominator=50), min_size=2, max_size=6).map(
    lambda xs: IntervalSet(tuple(zip(sorted(xs)[::2], sorted(xs)[1::2]))))


@given(st.sampled_from([1, 4]), intervals, intervals)
def test_cf_interval_density_matches_cells(m, A, B):
    g = make_cf(m)
    assert g.density(A, B) == _brute_density(g, A, B)


def test_cf_block_density_matches_interval_density():
    g = make_cf(4)
    A = IntervalSet.of((F(1, 7), F(5, 9)))
    B = IntervalSet.of((0, F(1, 3)), (F(2, 3), 1))
    assert g.density_blocks(BlockSet.from_intervals(g.grid, A), BlockSet.from_intervals(g.grid, B)) \
        == g.density(A, B)


@pytest.mark.parametrize("m", [1, 4, 9])
def test_cf_full_density_is_half(m):
    unit = IntervalSet.unit()
    assert density_sets(make_cf(m), unit, unit) == F(1, 2)


def test_cf_non_square_density_is_close_to_half():
    unit = IntervalSet.unit()
    assert abs(density_sets(make_cf(5), unit, unit) - 0.5) < 1e-12


def test_cf_degree_is_half():
    assert degree(make_cf(9), F(1, 3)) == F(1, 2)


def test_interior_measure_small():
    # m = 4: |4 - 2h| < 4 leaves h = 1, 2, 3 with 4 + 6 + 4 of 16 pairs
    assert interior_measure_cf(4) == F(14, 16)
    # m = 1: |1 - 2h| = 1 < 2 always
    assert interior_measure_cf(1) == 1


# -- step, constant, half -----------------------------------------------------------


def test_step_graphon_basics():
    g = make_step([0, F(1, 3), 1], [[1, F(1, 2)], [F(1, 2), 0]])
    assert g.evaluate(F(1, 4), F(1, 2)) == F(1, 2)
    assert degree(g, F(1, 6)) == F(1, 3) + F(1, 3)
    assert degree(g, F(2, 3)) == F(1, 6)
    assert density_sets(g, IntervalSet.unit(), IntervalSet.unit()) == F(1, 9) + 2 * F(1, 9)


def test_step_graphon_validation():
    with pytest.raises(OutOfRange):
        make_step([0, F(1, 2), 1], [[1, 0], [1, 0]])
    with pytest.raises(OutOfRange):
        make_step([0, 1], [[F(3, 2)]])
    with pytest.raises(OutOfRange):
        make_step([0, F(1, 2), 1], [[1]])


def test_constant_graphon():
    g = make_constant(F(1, 3))
    assert g.evaluate(0.2, 0.9) == F(1, 3)
    assert degree(g, 0.5) == F(1, 3)
    A = IntervalSet.of((0, F(1, 2)))
    assert density_sets(g, A, A) == F(1, 12)


def test_half_graphon():
    g = make_half()
    assert g.evaluate(F(1, 2), F(1, 2)) == 1
    assert g.evaluate(F(1, 4), F(1, 2)) == 0
    assert degree(g, F(1, 4)) == F(1, 4)
    # the triangle above x + y = 1 has area 1/2
    assert density_sets(g, IntervalSet.unit(), IntervalSet.unit()) == F(1, 2)
    with pytest.raises(OutOfDomain):
        g.evaluate(F(3, 2), 0)


@given(intervals, intervals)
def test_half_density_matches_quadrature(A, B):
    from scipy.integrate import quad

    g = make_half()
    # integrate the measure of B above 1 - x over x in A
    kinks = [1 - float(v) for iv in B.intervals for v in iv]
    exact = 0.0
    for a, b in A.intervals:
        inside = [k for k in kinks if a < k < b]
        exact += quad(lambda x: float(B.overlap(F(1) - F(x), 1)), float(a), float(b),
                      points=inside or None, epsabs=1e-13, limit=200)[0]
    assert abs(float(g.density_intervals(A, B)) - exact) < 1e-9


def test_square_identity_check():
    ok = square_identity_check(make_step([0, F(1, 2), 1], [[F(1, 2)] * 2] * 2), F(1, 4))
    assert ok.hypothesis_holds and ok.conclusion_holds
    bad = square_identity_check(make_step([0, F(1, 2), 1], [[1, 0], [0, 1]]), 0)
    assert bad.hypothesis_holds and not bad.conclusion_holds


def test_descriptors_round_trip():
    for g in (make_constant(F(1, 5)), make_cf(4), make_half(),
              make_step([0, F(1, 3), 1], [[1, 0], [0, 1]]), make_svejk(30, 4)):
        h = from_descriptor(g.descriptor())
        assert h.descriptor() == g.descriptor()
    with pytest.raises(OutOfRange):
        from_descriptor({"kind": "nope"})


def test_fmt_value():
    assert fmt_value(F(3, 8)) == "3/8"
    assert fmt_value(1) == "1"
    assert fmt_value(1 / 3) == "0.333333333333333"


# -- Svejk ------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def svejk():
    return make_svejk()


def _in(part, local):
    return (OFFSET[part] + F(local)) / 13


def test_svejk_constant_regions(svejk):
    assert svejk.evaluate(_in("Q", F(1, 2)), _in("Q", F(7, 2))) == 1
    for p in "BCDEFGP":
        assert svejk.evaluate(_in(p, F(1, 3)), _in("R", F(1, 2))) == R_COLUMN[p]
    assert svejk.evaluate(_in("A", F(1, 3)), _in("R", F(1, 2))) == 0
    assert svejk.evaluate(_in("R", F(1, 3)), _in("R", F(1, 2))) == 0


def test_svejk_part_layout():
    assert [part_interval(p)[0] * 13 for p in PARTS] == [0, 1, 2, 3, 4, 5, 6, 7, 8, 12]
    assert split_point(1) == ("R", 1)
    assert split_point(F(8, 13)) == ("Q", 0)


def test_svejk_a_rows(svejk):
    # A meets each of A..G exactly on its own segment
    x = _in("A", F(1, 3))          # segment 1
    assert svejk.evaluate(x, _in("C", F(1, 4))) == 1
    assert svejk.evaluate(x, _in("C", F(5, 8))) == 0


def test_svejk_q_column_balances_rows(svejk):
    for p, loc in [("B", F(1, 5)), ("E", F(5, 8)), ("P", F(2, 3))]:
        x = _in(p, loc)
        I, _ = svejk.row_integral(svejk.point(x))
        assert svejk.evaluate(x, _in("Q", 1)) == pytest.approx((4 - I) / 4, abs=1e-15)


# segments 1..5 cover [0, 31/32); the right endpoint already lies in segment 6
main_points = st.tuples(
    st.sampled_from("ABCDEFGP"),
    st.fractions(0, F(31, 32), max_denominator=4096).filter(lambda t: t < F(31, 32)),
)


@given(main_points, main_points)
def test_svejk_symmetric_and_bounded(p, q):
    g = make_svejk()
    x, y = _in(*p), _in(*q)
    v = g.evaluate(x, y)
    assert v == g.evaluate(y, x)
    assert 0 <= v <= 1


@pytest.mark.parametrize("part,local", [
    ("A", F(1, 3)), ("B", F(5, 7)), ("C", F(5, 8)), ("D", F(2, 9)),
    ("E", F(13, 16)), ("F", F(7, 11)), ("G", F(2, 7)), ("P", F(1, 3)),
])
def test_svejk_row_integrals_against_monte_carlo(svejk, part, local):
    """Closed-form row integrals against sampling over evaluable points.

    Points beyond the tower cap (local mass 2^-5 per segmented part) cannot be
    evaluated, so the sampled integral may fall short by at most that mass.
    """
    x = _in(part, local)
    row, _ = svejk.row_by_part(svejk.point(x))
    rng = np.random.default_rng(7)
    n = 1500
    for q in "ABCDEFGP":
        ys = rng.random(n)
        vals = []
        deep = 0
        for u in ys:
            y = _in(q, F(float(u)))
            if svejk.is_deep(y):
                deep += 1
                vals.append(0.0)
            else:
                vals.append(float(svejk.evaluate(x, y)))
        est = float(np.mean(vals))
        se = float(np.std(vals)) / math.sqrt(n) + 1e-12
        missing = 2.0**-5 if q in "ABCDEFG" else 0.0
        assert row[q] - missing - 5 * se <= est <= row[q] + 5 * se, (q, row[q], est, se)


def test_svejk_degree_identity_and_tail(svejk):
    for p in "ABCDEFGP":
        x = _in(p, F(3, 7))
        assert svejk.degree(x) == pytest.approx(float(TABLE_DEGREES[p]), abs=1e-12)
    assert svejk.degree(_in("R", F(1, 2))) == pytest.approx(28 / 104, abs=1e-15)
    deep = _in("C", 1 - F(1, 200))
    assert svejk.is_deep(deep)
    with pytest.raises(LevelTooLarge):
        svejk.degree(deep, strict=True)


def test_svejk_sample_points_avoid_deep(svejk):
    pts = svejk.sample_points(np.random.default_rng(3), 500)
    assert not any(svejk.is_deep(float(x)) for x in pts)


def test_extract_cf_copy_small():
    copy = extract_cf_copy(1)
    ref = make_cf(2)
    for a, b in product(range(8), repeat=2):
        x, y = F(2 * a + 1, 16), F(2 * b + 1, 16)
        assert copy.evaluate(x, y) == ref.evaluate(x, y)
    with pytest.raises(LevelTooLarge):
        extract_cf_copy(5)
