"""Tower function and the segment / subsegment / bit-vector coordinates.

A point ``x`` in ``[0, 1)`` lies in segment ``k`` when
``1 - 2**(1-k) <= x < 1 - 2**-k``.  Inside segment ``k`` the rescaled
position ``pos`` is split into ``t(k)`` subsegments, each of which is split
again into ``t(k)`` parts.  Segments are numbered from one, subsegments and
parts from zero.

All arithmetic on coordinates is exact: floats are converted to
:class:`fractions.Fraction` (every double is a dyadic rational), so the
terminating binary expansion is used for dyadic positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Union

from .errors import LevelTooLarge, OutOfDomain

Real = Union[int, float, Fraction]

DEFAULT_TOWER_CAP = 5


@lru_cache(maxsize=None)
def _tower_uncapped(n: int) -> int:
    value = 1
    for _ in range(n):
        value = 1 << value
    return value


def tower(n: int, cap: int = DEFAULT_TOWER_CAP) -> int:
    """Return ``t(n)`` with ``t(0) = 1`` and ``t(n) = 2**t(n-1)``.

    ``t(5)`` already has 65537 bits, so levels above ``cap`` are refused.
    """
    if n < 0:
        raise OutOfDomain(f"tower level must be non-negative, got {n}")
    if n > cap:
        raise LevelTooLarge(f"t({n}) exceeds the tower cap {cap}")
    return _tower_uncapped(n)


def tower_leq(n: int, bound: Real) -> bool:
    """Decide ``t(n) <= bound`` without materialising huge towers."""
    bound = Fraction(bound)
    if bound < 1:
        return False
    limit = bound.numerator // bound.denominator
    value = 1
    for _ in range(n):
        # 2**value > limit as soon as value reaches limit's bit length
        if value >= limit.bit_length():
            return False
        value = 1 << value
    return value <= bound


def as_fraction(x: Real) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    return Fraction(float(x))


def segment_of(x: Real) -> tuple[int, Fraction]:
    """Return ``([x]_1, [[x]]_1)`` exactly; needs no tower values."""
    X = as_fraction(x)
    if not 0 <= X < 1:
        raise OutOfDomain(f"point {x!r} outside [0, 1)")
    num, den = X.numerator, X.denominator
    q = den // (den - num)
    seg = max(1, q.bit_length())
    pos = X * (1 << seg) + 2 - (1 << seg)
    return seg, pos


def segment_bounds(k: int) -> tuple[Fraction, Fraction]:
    """Half-open segment ``[1 - 2**(1-k), 1 - 2**-k)``."""
    return 1 - Fraction(1, 1 << (k - 1)), 1 - Fraction(1, 1 << k)


@dataclass(frozen=True)
class Coordinate:
    """The bracket coordinates of a point of ``[0, 1)``."""

    x: Fraction
    seg: int
    pos: Fraction
    subseg: int
    part: int
    combined: int

    @property
    def t(self) -> int:
        return _tower_uncapped(self.seg)

    @property
    def t_prev(self) -> int:
        return _tower_uncapped(self.seg - 1)


def locate(x: Real, cap: int = DEFAULT_TOWER_CAP) -> Coordinate:
    seg, pos = segment_of(x)
    T = tower(seg, cap)
    combined = (pos * T * T).__floor__()
    subseg = combined // T
    return Coordinate(
        x=as_fraction(x),
        seg=seg,
        pos=pos,
        subseg=subseg,
        part=combined - T * subseg,
        combined=combined,
    )


def frac_bit(pos: Real, i: int) -> int:
    """The ``i``-th binary digit after the radix point (``i >= 1``)."""
    if i < 1:
        raise OutOfDomain("fractional bits are indexed from 1")
    p = as_fraction(pos)
    return (p.numerator << i) // p.denominator & 1


def int_bit(v: int, i: int) -> int:
    """Bit ``i`` of ``v`` counting from the least significant bit at 0."""
    return (v >> i) & 1


def sign_vector_frac(pos: Real, length: int) -> tuple[int, ...]:
    return tuple(2 * frac_bit(pos, i) - 1 for i in range(1, length + 1))


def sign_vector_int(v: int, length: int) -> tuple[int, ...]:
    return tuple(2 * int_bit(v, i) - 1 for i in range(length))


def signed_inner(a: int, b: int, length: int) -> int:
    """Inner product of the +-1 vectors built from the low bits of a and b."""
    mask = (1 << length) - 1
    return length - 2 * ((a ^ b) & mask).bit_count()


def trunc(v):
    """Clip to ``[0, 1]``, keeping the numeric type of ``v``."""
    if v < 0:
        return 0 * v
    if v > 1:
        return 0 * v + 1
    return v
