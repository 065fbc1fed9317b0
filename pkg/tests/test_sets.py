from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphonlab.errors import GridMismatch, NullPart, OutOfRange
from graphonlab.sets import BlockGrid, BlockSet, IntervalSet, PartitionSpec, set_from_dict, to_blockset

F = Fraction


def test_interval_set_normalises():
    s = IntervalSet.of((F(1, 2), F(3, 4)), (0, F(1, 4)), (F(1, 4), F(1, 3)), (F(9, 10), F(9, 10)))
    assert s.intervals == ((0, F(1, 3)), (F(1, 2), F(3, 4)))
    assert s.measure() == F(1, 3) + F(1, 4)
    assert F(1, 2) in s and F(3, 4) not in s
    assert s.overlap(F(1, 4), F(5, 8)) == F(1, 12) + F(1, 8)


def test_interval_set_rejects_bad_input():
    with pytest.raises(OutOfRange):
        IntervalSet.of((0, F(1, 2)), (F(1, 4), 1))
    with pytest.raises(OutOfRange):
        IntervalSet.of((F(1, 2), F(3, 2)))


def test_interval_sample_stays_inside():
    s = IntervalSet.of((0, F(1, 10)), (F(1, 2), F(6, 10)))
    xs = s.sample(np.random.default_rng(1), 2000)
    assert all(F(float(x)) in s for x in xs)
    assert abs((xs < 0.5).mean() - 0.5) < 0.05


def test_block_set_from_intervals_uniform_grid():
    grid = BlockGrid.uniform(4)
    b = BlockSet.from_intervals(grid, IntervalSet.of((F(1, 8), F(5, 8))))
    assert b.fractions() == [F(1, 2), 1, F(1, 2), 0]
    assert b.measure() == F(1, 2)
    assert not b.is_whole_blocks()
    assert list(b.support()) == [0, 1, 2]


def test_block_set_nonuniform_grid():
    grid = BlockGrid((0, F(1, 3), 1))
    b = BlockSet.from_fractions(grid, [1, F(1, 2)])
    assert b.masses() == [F(1, 3), F(1, 3)]
    assert b.measure() == F(2, 3)


def test_block_set_equality_across_denominators():
    grid = BlockGrid.uniform(3)
    a = BlockSet(grid, np.array([1, 2, 0]), 2)
    b = BlockSet(grid, np.array([3, 6, 0]), 6)
    assert a == b
    assert a != BlockSet(grid, np.array([1, 1, 0]), 2)


def test_block_set_validation():
    grid = BlockGrid.uniform(2)
    with pytest.raises(OutOfRange):
        BlockSet(grid, np.array([3, 0]), 2)
    with pytest.raises(GridMismatch):
        BlockSet(grid, np.array([1, 0, 0]), 1)
    with pytest.raises(GridMismatch):
        to_blockset(BlockSet.full(BlockGrid.uniform(4)), grid)


def test_uniform_grid_matches_explicit_grid():
    assert BlockGrid.uniform(4).breakpoints == BlockGrid(tuple(F(i, 4) for i in range(5))).breakpoints
    assert BlockGrid.uniform(8).block_of(0.999) == 7


@given(st.lists(st.integers(0, 3), min_size=8, max_size=8))
def test_partition_from_labels_round_trip(labels):
    grid = BlockGrid.uniform(8)
    P = PartitionSpec.from_labels(grid, labels)
    assert len(P) == len(set(labels))
    assert sum(P.measures()) == 1
    Q = PartitionSpec.from_dict(P.to_dict())
    assert all(a == b for a, b in zip(P.parts, Q.parts))


def test_partition_validation():
    grid = BlockGrid.uniform(2)
    with pytest.raises(NullPart):
        PartitionSpec((BlockSet.full(grid), BlockSet.empty(grid)))
    with pytest.raises(OutOfRange):
        PartitionSpec((BlockSet.from_blocks(grid, [0]),))
    with pytest.raises(OutOfRange):
        PartitionSpec((IntervalSet.of((0, F(1, 2))), IntervalSet.of((F(1, 3), 1))))
    with pytest.raises(GridMismatch):
        PartitionSpec((BlockSet.from_blocks(grid, [0]), IntervalSet.of((F(1, 2), 1))))


def test_interval_partition_on_grid():
    P = PartitionSpec((IntervalSet.of((0, F(1, 4))), IntervalSet.of((F(1, 4), 1))))
    B = P.on_grid(BlockGrid.uniform(2))
    assert B.parts[0].fractions() == [F(1, 2), 0]
    assert set_from_dict(P.parts[0].to_dict()) == P.parts[0]
