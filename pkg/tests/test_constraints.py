from __future__ import annotations

from fractions import Fraction
from math import prod

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphonlab.constraints import (
    Const,
    GraphTerm,
    PartEntry,
    PartTable,
    Prod,
    Sum,
    decorated_probability,
    evaluate_decorated,
    evaluate_expression,
    evaluate_ordinary,
    exact_acceptance,
    parse_constraint,
    parse_expression,
    partition_by_degree,
    render_constraint,
    svejk_part_table,
)
from graphonlab.constraints.expr import parse_decorated_literal
from graphonlab.constraints.files import parse_constraint_text
from graphonlab.errors import (
    DegreeUnassignable,
    ExpressionSyntaxError,
    IncompatibleGraphs,
    MeasureMismatch,
    OutOfRange,
)
from graphonlab.graphons import make_constant, make_half, make_step
from graphonlab.graphs import SimpleGraph, named_graph
from graphonlab.sampling import induced_density_exact
from graphonlab.sets import IntervalSet

F = Fraction
ROOTED = "D{[A]1 [A]2 (B)3 (B)4; 1-2 1-3 1-4 2~3 2-4 3~4}"


@pytest.fixture(scope="module")
def two_part():
    g = make_step([0, F(1, 2), 1], [[1, F(1, 2)], [F(1, 2), 0]])
    parts = PartTable((
        PartEntry("A", F(1, 2), F(3, 4), IntervalSet.of((0, F(1, 2)))),
        PartEntry("B", F(1, 2), F(1, 4), IntervalSet.of((F(1, 2), 1))),
    ))
    return g, parts


# -- parsing ---------------------------------------------------------------------


def test_parse_product_plus_constant():
    K2 = GraphTerm(named_graph("K2"), "K2")
    assert parse_expression("K2 * K2 + 0.25") == Sum((Prod((K2, K2)), Const(F(1, 4))))


def test_parse_graph_literal():
    e = parse_expression("G{3;0-1 1-2 0-2}")
    assert e.graph == SimpleGraph.complete(3)


@pytest.mark.parametrize("text,pos", [("K2 +", 5), ("(K2", 4), ("K2 ) ", 4), ("K9x", 1), ("1/0", 1)])
def test_parse_errors_carry_positions(text, pos):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression(text)
    assert info.value.position == pos


def test_parse_numbers_are_exact():
    assert parse_expression("0.1").value == F(1, 10)
    assert parse_expression("3/8").value == F(3, 8)


def test_constraint_needs_equals():
    with pytest.raises(ExpressionSyntaxError):
        parse_constraint("K2 + K3")


graph_terms = st.sampled_from(["K2", "K3", "C4", "P3", "E2", "G{3; 0-2}", ROOTED])
numbers = st.sampled_from(["1", "1/2", "0.25", "3"])


@st.composite
def expressions(draw, depth=2):
    if depth == 0:
        return draw(st.one_of(graph_terms, numbers))
    items = draw(st.lists(expressions(depth=depth - 1), min_size=1, max_size=3))
    op = draw(st.sampled_from([" + ", " * "]))
    wrap = draw(st.booleans())
    s = op.join(items)
    return f"({s})" if wrap else s


@given(expressions(), expressions())
def test_render_round_trip(lhs, rhs):
    c = parse_constraint(f"{lhs} = {rhs}")
    text = render_constraint(c)
    again = parse_constraint(text)
    assert render_constraint(again) == text


def test_render_decorated_example():
    g = parse_decorated_literal(ROOTED)
    assert g.render() == ROOTED
    one_root = parse_decorated_literal("D{[X]1}")
    assert one_root.render() == "D{[X]1}"


def test_decorated_validation():
    with pytest.raises(IncompatibleGraphs):
        parse_decorated_literal("D{[A]1 [A]2}").root_signature()
    with pytest.raises(ExpressionSyntaxError):
        parse_decorated_literal("D{[A]1 (B)2; 1-2 1~2}")
    c = parse_constraint("D{[A]1 [A]2; 1-2} = D{[A]1 [A]2; 1~2}")
    from graphonlab.constraints import check_compatible
    from graphonlab.constraints.expr import graphs_in

    with pytest.raises(IncompatibleGraphs):
        check_compatible(graphs_in(c.lhs) + graphs_in(c.rhs))


# -- ordinary constraints -----------------------------------------------------------


@pytest.mark.parametrize("text,status", [
    ("K2 = 0.5", "satisfied"), ("K3 = 0.125", "satisfied"), ("K2 = 0.6", "violated"),
    ("K2 * K2 + 0.25 = 1/2", "satisfied"),
])
def test_ordinary_on_constant(text, status):
    v = evaluate_ordinary(parse_constraint(text), make_constant(F(1, 2)))
    assert v.status == status
    assert v.lhs_stderr == 0 and isinstance(v.lhs, Fraction)


def test_ordinary_monte_carlo_path():
    g = make_half()
    assert evaluate_ordinary(parse_constraint("K2 = 1/2"), g, samples=50_000).ok
    assert not evaluate_ordinary(parse_constraint("K2 = 0.6"), g, samples=50_000).ok


def test_sum_is_linear_on_shared_stream():
    g = make_half()
    total = evaluate_expression(parse_expression("K3 + P3"), g, 40_000, seed=4)
    a = evaluate_expression(parse_expression("K3"), g, 40_000, seed=4)
    b = evaluate_expression(parse_expression("P3"), g, 40_000, seed=4)
    assert total.value == a.value + b.value


def test_ordinary_rejects_large_graphs():
    with pytest.raises(OutOfRange):
        evaluate_ordinary(parse_constraint("G{11; 0-1} = 0"), make_half(), samples=10)


# -- part tables ---------------------------------------------------------------------


def test_part_table_validation_and_round_trip(tmp_path, two_part):
    _, parts = two_part
    parts.save(tmp_path / "p.json")
    again = PartTable.load(tmp_path / "p.json")
    assert again.names == ["A", "B"] and again.members("B") == parts.members("B")
    with pytest.raises(OutOfRange):
        PartTable((PartEntry("A", F(1, 2), 0),))
    with pytest.raises(OutOfRange):
        PartTable((PartEntry("A", F(1, 2), 0), PartEntry("A", F(1, 2), 0)))


def test_partition_by_degree_constant():
    g = make_constant(F(1, 3))
    got = partition_by_degree(g, PartTable((PartEntry("X", F(1), F(1, 3)),)), points=130)
    assert got["X"].members.measure() == 1


def test_partition_by_degree_constant_two_parts_fails():
    g = make_constant(F(1, 3))
    table = PartTable((PartEntry("X", F(1, 2), F(1, 3)), PartEntry("Y", F(1, 2), F(2, 3))))
    with pytest.raises((DegreeUnassignable, MeasureMismatch)):
        partition_by_degree(g, table, points=130)
    table = PartTable((PartEntry("X", F(1, 2), F(1, 10)), PartEntry("Y", F(1, 2), F(2, 3))))
    with pytest.raises(DegreeUnassignable):
        partition_by_degree(g, table, points=130)


def test_partition_by_degree_two_part(two_part):
    g, parts = two_part
    got = partition_by_degree(g, parts, points=200)
    assert got.members("A") == IntervalSet.of((0, F(1, 2)))
    assert got["B"].fitted_degree == pytest.approx(0.25)


def test_svejk_table_shape():
    t = svejk_part_table()
    assert t.names == list("ABCDEFGPQR")
    assert t["Q"].lower_bound and t["Q"].measure == F(4, 13)


# -- decorated constraints -------------------------------------------------------------


def test_rooted_example_product_estimator(two_part):
    g, parts = two_part
    v = evaluate_decorated(parse_constraint(f"{ROOTED} = 1/16"), g, parts, root_samples=50, nonroot_samples=200)
    assert v.status == "satisfied"
    assert v.lhs == pytest.approx(1 / 16, abs=1e-15)


def test_rooted_example_excludes_doubled_value(two_part):
    g, parts = two_part
    v = evaluate_decorated(parse_constraint(f"{ROOTED} = 2/16"), g, parts, root_samples=50, nonroot_samples=200)
    assert v.status == "violated"


def test_rooted_example_bernoulli_estimator(two_part):
    g, parts = two_part
    v = decorated_probability(parse_decorated_literal(ROOTED), g, parts, samples=200_000, seed=3,
                              estimator="bernoulli")
    assert abs(v.value - 1 / 16) <= 4 * v.stderr
    assert abs(v.value - 2 / 16) > 4 * v.stderr


def test_edge_inside_b_has_probability_zero(two_part):
    g, parts = two_part
    v = evaluate_decorated(parse_constraint("D{[A]1 [A]2 (B)3 (B)4; 1-2 3-4} = 0"), g, parts,
                           root_samples=20, nonroot_samples=100)
    assert v.status == "satisfied" and v.lhs == 0


def test_non_edge_inside_a_is_null_satisfied(two_part):
    g, parts = two_part
    c = parse_constraint("D{[A]1 [A]2 (B)3; 1~2 1-3} = 1/2")
    assert exact_acceptance(g, parts, (("A", "A"), (False,))) == 0
    v = evaluate_decorated(c, g, parts)
    assert v.status == "null-satisfied" and v.ok


def test_null_by_sampling_on_non_step_graphon():
    # half graphon: roots both in [0, 1/4) are never adjacent; 0 hits in 10^6 tries
    g = make_half()
    parts = PartTable((PartEntry("L", F(1, 4), 0, IntervalSet.of((0, F(1, 4)))),
                       PartEntry("H", F(3, 4), 0, IntervalSet.of((F(1, 4), 1)))))
    c = parse_constraint("D{[L]1 [L]2; 1-2} = 1")
    few = evaluate_decorated(c, g, parts, root_samples=1000)
    assert few.status == "inconclusive"
    many = evaluate_decorated(c, g, parts, root_samples=5_000_000, nonroot_samples=2)
    assert many.status == "null-satisfied"


def test_unspecified_pair_is_sum_of_completions(two_part):
    g, parts = two_part
    c = parse_constraint("D{[A]1 (B)2 (B)3; 1-2} = D{[A]1 (B)2 (B)3; 1-2 1-3} + D{[A]1 (B)2 (B)3; 1-2 1~3}")
    assert evaluate_decorated(c, g, parts, root_samples=30, nonroot_samples=500, seed=1).ok


def test_two_root_expansion_matches_completions(two_part):
    g, parts = two_part
    H = parse_decorated_literal("D{[A]1 (A)2 (B)3; 1-3}")
    values = [decorated_probability(h, g, parts, samples=40_000, seed=2).value for h in H.completions()]
    assert len(values) == 4
    whole = decorated_probability(H, g, parts, samples=40_000, seed=2).value
    assert whole == pytest.approx(sum(values), abs=1e-12)


def test_zero_roots_reduce_to_labelled_probability():
    g = make_step([0, F(1, 3), 1], [[1, F(1, 3)], [F(1, 3), F(1, 2)]])
    parts = PartTable((PartEntry("X", F(1), 0, IntervalSet.unit()),))
    H = parse_decorated_literal("D{(X)1 (X)2 (X)3; 1-2 2-3 1~3}")
    est = decorated_probability(H, g, parts, samples=400_000, seed=9)
    # the path has three labelled copies of equal probability
    exact = induced_density_exact(named_graph("P3"), g) / 3
    assert abs(est.value - float(exact)) <= 4 * est.stderr


def test_decorated_rejects_mixed_constraints(two_part):
    g, parts = two_part
    with pytest.raises(IncompatibleGraphs):
        evaluate_decorated(parse_constraint(f"{ROOTED} = K2"), g, parts)
    with pytest.raises(OutOfRange):
        evaluate_decorated(parse_constraint(f"{ROOTED} = 1"), g, parts, estimator="other")


# -- files ---------------------------------------------------------------------------------


def test_constraint_file_with_block():
    text = """
    # comment
    decorated H
      parts A B
      roots [A]1 [A]2
      nonroots (B)3 (B)4
      edges 1-2 1-3 1-4 2-4
      nonedges 2-3 3-4
    end
    H = 1/16
    graph T = K3
    T + K2 = 1
    """
    lines = parse_constraint_text(text)
    assert [ln.line for ln in lines] == [10, 12]
    assert render_constraint(lines[0].constraint) == f"{ROOTED} = 1/16"
    assert not lines[1].constraint.decorated


def test_constraint_file_errors_name_lines():
    with pytest.raises(ExpressionSyntaxError, match="line 2"):
        parse_constraint_text("K2 = 1/2\nK2 + = 1\n")
    with pytest.raises(ExpressionSyntaxError, match="line 1"):
        parse_constraint_text("decorated H\n roots [A]1\n")
    with pytest.raises(ExpressionSyntaxError, match="not declared"):
        parse_constraint_text("decorated H\n parts A\n roots [A]1\n nonroots (B)2\nend\n")
