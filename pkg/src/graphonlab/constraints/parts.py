"""Part tables: named parts with measures, degrees and membership sets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from ..errors import DegreeUnassignable, MeasureMismatch, OutOfRange
from ..graphons.base import Graphon
from ..graphons.ops import degree as graphon_degree
from ..sets import IntervalSet, set_from_dict

DEFAULT_GRID = 200  # midpoints per 1/13 of the unit interval by default


@dataclass(frozen=True)
class PartEntry:
    name: str
    measure: Fraction
    degree: object  # Fraction, float, or a lower bound when ``lower_bound``
    members: Optional[IntervalSet] = None
    lower_bound: bool = False
    fitted_degree: Optional[float] = None
    fitted_measure: Optional[Fraction] = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "measure": str(self.measure), "degree": str(self.degree)}
        if self.lower_bound:
            d["lower_bound"] = True
        if self.members is not None:
            d["set"] = self.members.to_dict()
        if self.fitted_degree is not None:
            d["fitted_degree"] = repr(self.fitted_degree)
        if self.fitted_measure is not None:
            d["fitted_measure"] = str(self.fitted_measure)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PartEntry":
        members = set_from_dict(d["set"]) if "set" in d else None
        return cls(
            d["name"], Fraction(d["measure"]), Fraction(d["degree"]), members,
            bool(d.get("lower_bound", False)),
        )


@dataclass(frozen=True)
class PartTable:
    entries: tuple = field(default_factory=tuple)

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise OutOfRange("a part table needs at least one part")
        names = [e.name for e in entries]
        if len(set(names)) != len(names):
            raise OutOfRange("part names must be distinct")
        if any(e.measure <= 0 for e in entries):
            raise OutOfRange("part measures must be positive")
        if sum(e.measure for e in entries) != 1:
            raise OutOfRange("part measures must sum to 1")

    def __getitem__(self, name: str) -> PartEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def members(self, name: str) -> IntervalSet:
        m = self[name].members
        if m is None:
            raise OutOfRange(f"part {name} has no fitted membership set")
        return m

    def to_dict(self) -> dict:
        return {"parts": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "PartTable":
        return cls(tuple(PartEntry.from_dict(e) for e in d["parts"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "PartTable":
        return cls.from_dict(json.loads(Path(path).read_text()))


def svejk_part_table() -> PartTable:
    """The ten parts of the Svejk graphon with their expected degrees."""
    from ..graphons.svejk import LENGTH, PARTS, Q_DEGREE_BOUND, TABLE_DEGREES, part_interval

    entries = []
    for p in PARTS:
        lo, hi = part_interval(p)
        if p == "Q":
            entries.append(PartEntry(p, Fraction(LENGTH[p], 13), Q_DEGREE_BOUND, IntervalSet.of((lo, hi)), True))
        else:
            entries.append(PartEntry(p, Fraction(1, 13), TABLE_DEGREES[p], IntervalSet.of((lo, hi))))
    return PartTable(tuple(entries))


def _assign(deg: float, exact: list, bound: Optional[tuple], tol: float) -> Optional[int]:
    best, best_gap = None, None
    for idx, d in exact:
        gap = abs(deg - d)
        if gap <= tol and (best_gap is None or gap < best_gap):
            best, best_gap = idx, gap
    if best is not None:
        return best
    if bound is not None and deg >= bound[1] - tol and all(deg > d + tol for _, d in exact):
        return bound[0]
    return None


def partition_by_degree(g: Graphon, expected: PartTable, tol: float = 1e-6,
                        points: Optional[int] = None, measure_rtol: float = 0.02) -> PartTable:
    """Recover the parts of ``g`` from the degrees of grid midpoints.

    Each midpoint goes to the part whose expected degree is nearest and
    within ``tol``.  A part whose degree is only a lower bound takes the
    points whose degree exceeds every exact entry.  The membership set of a
    part is the union of the grid cells assigned to it.
    """
    exact = [(i, float(e.degree)) for i, e in enumerate(expected.entries) if not e.lower_bound]
    bounds = [(i, float(e.degree)) for i, e in enumerate(expected.entries) if e.lower_bound]
    if len(bounds) > 1:
        raise OutOfRange("at most one part may carry only a degree bound")
    ds = sorted(d for _, d in exact)
    if any(b - a <= 2 * tol for a, b in zip(ds, ds[1:])):
        raise OutOfRange("expected degrees must be separated by more than 2 * tol")
    n = points or 13 * DEFAULT_GRID
    bound = bounds[0] if bounds else None

    labels = np.empty(n, dtype=np.int64)
    degs = np.empty(n)
    for c in range(n):
        x = Fraction(2 * c + 1, 2 * n)
        d = float(graphon_degree(g, x, tol=tol))
        lab = _assign(d, exact, bound, tol)
        if lab is None:
            raise DegreeUnassignable(f"degree {d:.12g} at x = {float(x):.6g} matches no part")
        labels[c] = lab
        degs[c] = d

    out = []
    for i, e in enumerate(expected.entries):
        cells = np.flatnonzero(labels == i)
        meas = Fraction(len(cells), n)
        if abs(meas - e.measure) > measure_rtol * e.measure:
            raise MeasureMismatch(f"part {e.name}: measure {float(meas):.4f} vs expected {float(e.measure):.4f}")
        runs = []
        for c in cells:
            if runs and runs[-1][1] == c:
                runs[-1][1] = c + 1
            else:
                runs.append([int(c), int(c) + 1])
        members = IntervalSet(tuple((Fraction(a, n), Fraction(b, n)) for a, b in runs))
        out.append(replace(e, members=members, fitted_degree=float(degs[cells].mean()), fitted_measure=meas))
    return PartTable(tuple(out))
