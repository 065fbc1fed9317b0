"""Measurable subsets of [0, 1] in the two exact representations.

``IntervalSet`` is a finite union of half-open rational intervals.
``BlockSet`` fixes a reference grid of blocks and records, for every block,
which fraction of it belongs to the set.  For step graphons only these
per-block masses matter, so a ``BlockSet`` is an exact description of a set
up to measure-preserving rearrangement inside blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence, Union

import numpy as np

from .coords import as_fraction
from .errors import GridMismatch, NullPart, OutOfRange


@dataclass(frozen=True)
class IntervalSet:
    intervals: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        cleaned = []
        for a, b in sorted((as_fraction(a), as_fraction(b)) for a, b in self.intervals):
            if not 0 <= a <= b <= 1:
                raise OutOfRange(f"interval [{a}, {b}) not inside [0, 1]")
            if a == b:
                continue
            if cleaned and a < cleaned[-1][1]:
                raise OutOfRange("intervals overlap")
            if cleaned and a == cleaned[-1][1]:
                cleaned[-1] = (cleaned[-1][0], b)
            else:
                cleaned.append((a, b))
        object.__setattr__(self, "intervals", tuple(cleaned))

    @classmethod
    def of(cls, *pairs) -> "IntervalSet":
        return cls(tuple(pairs))

    @classmethod
    def unit(cls) -> "IntervalSet":
        return cls(((Fraction(0), Fraction(1)),))

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def __contains__(self, x) -> bool:
        X = as_fraction(x)
        return any(a <= X < b for a, b in self.intervals)

    def overlap(self, lo, hi) -> Fraction:
        """Measure of the intersection with ``[lo, hi)``."""
        lo, hi = as_fraction(lo), as_fraction(hi)
        total = Fraction(0)
        for a, b in self.intervals:
            left, right = max(a, lo), min(b, hi)
            if right > left:
                total += right - left
        return total

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Uniform points of the set (float64)."""
        if not self.intervals:
            raise NullPart("cannot sample from an empty set")
        lo = np.array([float(a) for a, _ in self.intervals])
        ln = np.array([float(b - a) for a, b in self.intervals])
        idx = rng.choice(len(ln), size=size, p=ln / ln.sum())
        return lo[idx] + rng.random(size) * ln[idx]

    def to_dict(self) -> dict:
        return {"intervals": [[str(a), str(b)] for a, b in self.intervals]}


@dataclass(frozen=True)
class BlockGrid:
    """Blocks ``[b_i, b_{i+1})`` given by strictly increasing breakpoints."""

    breakpoints: tuple[Fraction, ...]

    def __post_init__(self):
        bps = tuple(as_fraction(b) for b in self.breakpoints)
        if len(bps) < 2 or bps[0] != 0 or bps[-1] != 1:
            raise OutOfRange("grid must start at 0 and end at 1")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise OutOfRange("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)

    @classmethod
    def uniform(cls, n: int) -> "BlockGrid":
        return _UniformGrid(n)

    @property
    def size(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def is_uniform(self) -> bool:
        w = self.widths()
        return all(x == w[0] for x in w)

    def widths(self) -> list[Fraction]:
        b = self.breakpoints
        return [b[i + 1] - b[i] for i in range(self.size)]

    def block_of(self, x: float) -> int:
        idx = int(np.searchsorted(np.array([float(b) for b in self.breakpoints]), x, side="right")) - 1
        return min(max(idx, 0), self.size - 1)

    def key(self):
        return ("bp", self.breakpoints)


class _UniformGrid(BlockGrid):
    """Uniform grid; breakpoints are produced lazily (grids reach 2**20 blocks)."""

    def __init__(self, n: int):
        if n < 1:
            raise OutOfRange("grid needs at least one block")
        object.__setattr__(self, "_n", n)

    def __post_init__(self):  # pragma: no cover - dataclass hook unused
        pass

    @property
    def breakpoints(self):
        return tuple(Fraction(i, self._n) for i in range(self._n + 1))

    @property
    def size(self) -> int:
        return self._n

    @property
    def is_uniform(self) -> bool:
        return True

    def widths(self) -> list[Fraction]:
        return [Fraction(1, self._n)] * self._n

    def block_of(self, x: float) -> int:
        return min(max(int(x * self._n), 0), self._n - 1)

    def key(self):
        return ("uniform", self._n)

    def __eq__(self, other):
        return isinstance(other, BlockGrid) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"BlockGrid.uniform({self._n})"


def same_grid(a: BlockGrid, b: BlockGrid) -> bool:
    if a.key() == b.key():
        return True
    if a.size != b.size:
        return False
    return a.breakpoints == b.breakpoints


@dataclass(frozen=True, eq=False)
class BlockSet:
    """Per-block fractions ``num[i] / den`` (each in [0, 1]) on ``grid``."""

    grid: BlockGrid
    num: np.ndarray
    den: int = 1

    def __post_init__(self):
        num = np.asarray(self.num)
        if num.dtype != object:
            num = num.astype(np.int64)
        if num.shape != (self.grid.size,):
            raise GridMismatch(f"expected {self.grid.size} block weights, got {num.shape}")
        if self.den <= 0:
            raise OutOfRange("denominator must be positive")
        if (num < 0).any() or (num > self.den).any():
            raise OutOfRange("block fractions must lie in [0, 1]")
        num.setflags(write=False)
        object.__setattr__(self, "num", num)

    @classmethod
    def empty(cls, grid: BlockGrid) -> "BlockSet":
        return cls(grid, np.zeros(grid.size, dtype=np.int64), 1)

    @classmethod
    def full(cls, grid: BlockGrid) -> "BlockSet":
        return cls(grid, np.ones(grid.size, dtype=np.int64), 1)

    @classmethod
    def from_blocks(cls, grid: BlockGrid, blocks: Iterable[int]) -> "BlockSet":
        num = np.zeros(grid.size, dtype=np.int64)
        num[list(blocks)] = 1
        return cls(grid, num, 1)

    @classmethod
    def from_mask(cls, grid: BlockGrid, mask) -> "BlockSet":
        return cls(grid, np.asarray(mask, dtype=np.int64), 1)

    @classmethod
    def from_fractions(cls, grid: BlockGrid, fracs: Sequence) -> "BlockSet":
        fr = [as_fraction(f) for f in fracs]
        den = lcm(*(f.denominator for f in fr)) if fr else 1
        num = [f.numerator * (den // f.denominator) for f in fr]
        arr = np.array(num, dtype=np.int64 if den < 2**62 else object)
        return cls(grid, arr, den)

    @classmethod
    def from_intervals(cls, grid: BlockGrid, s: IntervalSet) -> "BlockSet":
        widths = grid.widths()
        bps = grid.breakpoints
        fracs = [s.overlap(bps[i], bps[i + 1]) / widths[i] for i in range(grid.size)]
        return cls.from_fractions(grid, fracs)

    def fractions(self) -> list[Fraction]:
        return [Fraction(int(v), self.den) for v in self.num]

    def masses(self) -> list[Fraction]:
        """Measure of the set inside each block."""
        return [f * w for f, w in zip(self.fractions(), self.grid.widths())]

    def measure(self) -> Fraction:
        if self.grid.is_uniform:
            return Fraction(int(self.num.sum()), self.den * self.grid.size)
        return sum(self.masses(), Fraction(0))

    def is_whole_blocks(self) -> bool:
        return bool(((self.num == 0) | (self.num == self.den)).all())

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.num)

    def with_den(self, den: int) -> np.ndarray:
        """Numerators rescaled to the common denominator ``den``."""
        if den % self.den:
            raise ValueError("target denominator must be a multiple")
        f = den // self.den
        num = self.num.astype(object) if den >= 2**62 else self.num
        return num * f

    def to_dict(self) -> dict:
        return {
            "blocks": [[int(i), str(Fraction(int(self.num[i]), self.den))] for i in self.support()],
        }

    def __eq__(self, other):
        if not isinstance(other, BlockSet) or not same_grid(self.grid, other.grid):
            return NotImplemented
        if self.den == other.den:
            return bool((self.num == other.num).all())
        big = self.den * other.den >= 2**62
        a = self.num.astype(object) if big else self.num
        b = other.num.astype(object) if big else other.num
        return bool((a * other.den == b * self.den).all())


SetSpec = Union[IntervalSet, BlockSet]


def to_blockset(s: SetSpec, grid: BlockGrid) -> BlockSet:
    if isinstance(s, BlockSet):
        if not same_grid(s.grid, grid):
            raise GridMismatch("block-weight set uses a different grid")
        return s
    return BlockSet.from_intervals(grid, s)


def set_from_dict(d: dict, grid: BlockGrid | None = None) -> SetSpec:
    if "intervals" in d:
        return IntervalSet(tuple((Fraction(a), Fraction(b)) for a, b in d["intervals"]))
    if grid is None:
        raise GridMismatch("block-weight set needs a grid")
    fr = [Fraction(0)] * grid.size
    for b, w in d["blocks"]:
        fr[int(b)] = Fraction(w)
    return BlockSet.from_fractions(grid, fr)


@dataclass(frozen=True, eq=False)
class PartitionSpec:
    """Ordered parts; for block-weight parts a shared ``grid``."""

    parts: tuple
    grid: BlockGrid | None = field(default=None)

    def __post_init__(self):
        parts = tuple(self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise NullPart("a partition needs at least one part")
        for p in parts:
            if p.measure() == 0:
                raise NullPart("partition parts must be non-null")
        if all(isinstance(p, BlockSet) for p in parts):
            grid = self.grid or parts[0].grid
            object.__setattr__(self, "grid", grid)
            den = lcm(*(p.den for p in parts))
            total = sum(p.with_den(den) for p in parts)
            if not (np.asarray(total) == den).all():
                raise OutOfRange("block parts must be disjoint and cover every block")
        elif all(isinstance(p, IntervalSet) for p in parts):
            pieces = sorted(iv for p in parts for iv in p.intervals)
            cur = Fraction(0)
            for a, b in pieces:
                if a != cur:
                    raise OutOfRange("interval parts must be disjoint and cover [0, 1]")
                cur = b
            if cur != 1:
                raise OutOfRange("interval parts must cover [0, 1]")
        else:
            raise GridMismatch("mixed part representations")

    def __len__(self):
        return len(self.parts)

    def measures(self) -> list[Fraction]:
        return [p.measure() for p in self.parts]

    def on_grid(self, grid: BlockGrid) -> "PartitionSpec":
        return PartitionSpec(tuple(to_blockset(p, grid) for p in self.parts), grid)

    @classmethod
    def trivial(cls, grid: BlockGrid) -> "PartitionSpec":
        return cls((BlockSet.full(grid),), grid)

    @classmethod
    def from_labels(cls, grid: BlockGrid, labels) -> "PartitionSpec":
        """Whole-block partition; ``labels[i]`` names the part of block ``i``."""
        labels = np.asarray(labels)
        parts = [BlockSet.from_mask(grid, labels == v) for v in np.unique(labels)]
        return cls(tuple(parts), grid)

    def to_dict(self) -> dict:
        out: dict = {"parts": [p.to_dict() for p in self.parts]}
        if self.grid is not None:
            out["grid"] = self.grid.size if self.grid.is_uniform else [str(b) for b in self.grid.breakpoints]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "PartitionSpec":
        grid = None
        if "grid" in d:
            g = d["grid"]
            grid = BlockGrid.uniform(int(g)) if isinstance(g, int) else BlockGrid(tuple(Fraction(b) for b in g))
        return cls(tuple(set_from_dict(p, grid) for p in d["parts"]), grid)
