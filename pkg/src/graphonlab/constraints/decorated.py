"""Graphs with labelled vertices, some of them ordered roots.

Each vertex carries the name of a part.  Every pair of vertices is an edge,
a non-edge, or unspecified; an unspecified pair stands for the sum of the
two completions.  The text form is::

    D{[A]1 [A]2 (B)3 (B)4; 1-2 1-3 2~3 1-4 2-4 3~4}

where ``[X]v`` declares a root (roots are ordered by appearance), ``(X)v`` a
non-root, ``u-v`` an edge and ``u~v`` a non-edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Optional

from ..errors import IncompatibleGraphs, OutOfRange


@dataclass(frozen=True)
class Vertex:
    id: int
    label: str
    root: Optional[int] = None  # 1-based position in the root order

    @property
    def is_root(self) -> bool:
        return self.root is not None


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class DecoratedGraph:
    vertices: tuple
    edges: frozenset
    nonedges: frozenset

    def __post_init__(self):
        ids = [v.id for v in self.vertices]
        if len(set(ids)) != len(ids):
            raise OutOfRange("vertex ids must be distinct")
        orders = sorted(v.root for v in self.vertices if v.is_root)
        if orders != list(range(1, len(orders) + 1)):
            raise OutOfRange("root order must run 1..#roots")
        known = set(ids)
        edges = frozenset(_pair(*e) for e in self.edges)
        nonedges = frozenset(_pair(*e) for e in self.nonedges)
        for i, j in edges | nonedges:
            if i == j or i not in known or j not in known:
                raise OutOfRange(f"pair {i}-{j} does not join two declared vertices")
        if edges & nonedges:
            raise OutOfRange("a pair cannot be both an edge and a non-edge")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "nonedges", nonedges)

    # views
    @property
    def roots(self) -> list[Vertex]:
        return sorted((v for v in self.vertices if v.is_root), key=lambda v: v.root)

    @property
    def nonroots(self) -> list[Vertex]:
        return [v for v in self.vertices if not v.is_root]

    @property
    def labels(self) -> set[str]:
        return {v.label for v in self.vertices}

    def status(self, i: int, j: int) -> Optional[bool]:
        p = _pair(i, j)
        if p in self.edges:
            return True
        if p in self.nonedges:
            return False
        return None

    def unspecified(self) -> list[tuple[int, int]]:
        ids = sorted(v.id for v in self.vertices)
        return [p for p in combinations(ids, 2) if self.status(*p) is None]

    def root_signature(self) -> tuple:
        """Labels of the roots in order and the status of every root pair."""
        rs = self.roots
        pairs = []
        for a, b in combinations(range(len(rs)), 2):
            s = self.status(rs[a].id, rs[b].id)
            if s is None:
                raise IncompatibleGraphs("pairs between roots must be specified")
            pairs.append(s)
        return tuple(v.label for v in rs), tuple(pairs)

    def completions(self) -> list["DecoratedGraph"]:
        """All graphs obtained by deciding every unspecified pair."""
        free = self.unspecified()
        out = []
        for choice in product((True, False), repeat=len(free)):
            e = set(self.edges) | {p for p, c in zip(free, choice) if c}
            n = set(self.nonedges) | {p for p, c in zip(free, choice) if not c}
            out.append(DecoratedGraph(self.vertices, frozenset(e), frozenset(n)))
        return out

    def render(self) -> str:
        def tag(v: Vertex) -> str:
            return f"[{v.label}]{v.id}" if v.is_root else f"({v.label}){v.id}"

        verts = self.roots + sorted(self.nonroots, key=lambda v: v.id)
        text = " ".join(tag(v) for v in verts)
        pairs = sorted(self.edges | self.nonedges)
        if pairs:
            text += "; " + " ".join(f"{i}{'-' if (i, j) in self.edges else '~'}{j}" for i, j in pairs)
        return "D{" + text + "}"

    def __str__(self) -> str:
        return self.render()


def check_compatible(graphs) -> tuple:
    """Common root signature of ``graphs``; raises if two differ."""
    sig = None
    for g in graphs:
        s = g.root_signature()
        if sig is None:
            sig = s
        elif s != sig:
            raise IncompatibleGraphs(f"root-induced graphs differ: {sig} vs {s}")
    return sig
