"""Small simple graphs, text I/O and isomorphism for up to ten vertices."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product

from .errors import OutOfRange

MAX_VERTICES = 10


def pair_index(n: int) -> dict[tuple[int, int], int]:
    """Position of each pair ``i < j`` in lexicographic order."""
    return {p: k for k, p in enumerate(combinations(range(n), 2))}


@dataclass(frozen=True)
class SimpleGraph:
    n: int
    edges: frozenset

    def __init__(self, n: int, edges=()):
        if n < 0:
            raise OutOfRange("vertex count must be non-negative")
        norm = set()
        for e in edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise OutOfRange(f"loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise OutOfRange(f"edge {i}-{j} outside 0..{n - 1}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(norm))

    # constructors
    @classmethod
    def complete(cls, n: int) -> "SimpleGraph":
        return cls(n, combinations(range(n), 2))

    @classmethod
    def empty(cls, n: int) -> "SimpleGraph":
        return cls(n)

    @classmethod
    def cycle(cls, n: int) -> "SimpleGraph":
        if n < 3:
            raise OutOfRange("cycles need at least three vertices")
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "SimpleGraph":
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "SimpleGraph":
        pairs = list(combinations(range(n), 2))
        return cls(n, [p for k, p in enumerate(pairs) if mask >> k & 1])

    # views
    @property
    def n_pairs(self) -> int:
        return self.n * (self.n - 1) // 2

    def mask(self) -> int:
        idx = pair_index(self.n)
        return sum(1 << idx[e] for e in self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return tuple(deg)

    def complement(self) -> "SimpleGraph":
        return SimpleGraph(self.n, set(combinations(range(self.n), 2)) - self.edges)

    def relabel(self, perm) -> "SimpleGraph":
        """Vertex ``v`` becomes ``perm[v]``."""
        return SimpleGraph(self.n, [(perm[i], perm[j]) for i, j in self.edges])

    # text format
    def to_text(self) -> str:
        es = " ".join(f"{i}-{j}" for i, j in sorted(self.edges))
        return f"n={self.n}\nedges={es}\n"

    @classmethod
    def from_text(cls, text: str) -> "SimpleGraph":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        m = re.fullmatch(r"n\s*=\s*(\d+)", lines[0]) if lines else None
        if m is None:
            raise OutOfRange("first line must read n=<k>")
        n = int(m.group(1))
        edges = []
        if len(lines) > 1:
            m2 = re.fullmatch(r"edges\s*=\s*(.*)", lines[1])
            if m2 is None:
                raise OutOfRange("second line must read edges=<i>-<j> ...")
            for tok in m2.group(1).split():
                a, _, b = tok.partition("-")
                edges.append((int(a), int(b)))
        return cls(n, edges)

    def __str__(self) -> str:
        return f"G{{{self.n}; " + " ".join(f"{i}-{j}" for i, j in sorted(self.edges)) + "}"


def _adjacency(n: int, mask: int) -> list[int]:
    """Neighbourhoods as bitmasks."""
    adj = [0] * n
    for k, (i, j) in enumerate(combinations(range(n), 2)):
        if mask >> k & 1:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return adj


def _refine(n: int, adj: list[int]) -> list[int]:
    """Colour refinement; returns a stable colour per vertex."""
    colors = [bin(a).count("1") for a in adj]
    while True:
        sigs = [
            (colors[v], tuple(sorted(colors[u] for u in range(n) if adj[v] >> u & 1)))
            for v in range(n)
        ]
        ranks = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


@lru_cache(maxsize=1 << 16)
def canonical_mask(n: int, mask: int) -> int:
    """Smallest pair mask over relabellings that respect refined colours.

    Colour refinement is isomorphism invariant, so restricting to
    colour-sorted orders keeps the form canonical while pruning the search.
    """
    if n > MAX_VERTICES:
        raise OutOfRange(f"graphs are limited to {MAX_VERTICES} vertices")
    adj = _adjacency(n, mask)
    colors = _refine(n, adj)
    classes = [[v for v in range(n) if colors[v] == c] for c in sorted(set(colors))]
    pairs = list(combinations(range(n), 2))
    best = None
    for choice in product(*(permutations(cls) for cls in classes)):
        order = [v for block in choice for v in block]  # position -> vertex
        code = 0
        for k, (a, b) in enumerate(pairs):
            if adj[order[a]] >> order[b] & 1:
                code |= 1 << k
        if best is None or code < best:
            best = code
    return best if best is not None else 0


def canonical_form(g: SimpleGraph) -> tuple[int, int]:
    return g.n, canonical_mask(g.n, g.mask())


def is_isomorphic(g: SimpleGraph, h: SimpleGraph) -> bool:
    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    if sorted(g.degrees()) != sorted(h.degrees()):
        return False
    return canonical_form(g) == canonical_form(h)


def labeled_copies(h: SimpleGraph) -> list[int]:
    """Pair masks of all distinct labelled graphs on ``h.n`` vertices isomorphic to ``h``."""
    seen = {h.relabel(p).mask() for p in permutations(range(h.n))}
    return sorted(seen)


@lru_cache(maxsize=None)
def isomorphism_classes(n: int) -> tuple[int, ...]:
    """Canonical masks of all graphs on ``n`` vertices (practical for n <= 5)."""
    if n > 6:
        raise OutOfRange("class enumeration is limited to six vertices")
    return tuple(sorted({canonical_mask(n, m) for m in range(1 << (n * (n - 1) // 2))}))


ALIASES = {
    **{f"K{k}": (lambda k: lambda: SimpleGraph.complete(k))(k) for k in range(1, 11)},
    **{f"E{k}": (lambda k: lambda: SimpleGraph.empty(k))(k) for k in range(1, 11)},
    **{f"C{k}": (lambda k: lambda: SimpleGraph.cycle(k))(k) for k in range(3, 11)},
    **{f"P{k}": (lambda k: lambda: SimpleGraph.path(k))(k) for k in range(1, 11)},
}


def named_graph(name: str) -> SimpleGraph:
    try:
        return ALIASES[name]()
    except KeyError:
        raise OutOfRange(f"unknown graph alias {name!r}") from None
