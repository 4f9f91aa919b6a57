"""Simple graphs, exact arboricity and forest decompositions."""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CapExceededError, InfeasibleError, StructuralError

MAX_EXACT_EDGES = 25
_MAX_SUBSET_VERTICES = 20


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph; edges are stored as sorted pairs in canonical order."""

    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        clean = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise StructuralError(f"self-loop at vertex {u}")
            if u < 0 or v < 0:
                raise StructuralError("vertex labels must be non-negative")
            clean.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for e in self.edges for v in e}))


def complete_graph(n: int) -> Graph:
    return Graph(tuple((u, v) for u in range(n) for v in range(u + 1, n)))


def complete_bipartite_graph(m: int, n: int) -> Graph:
    return Graph(tuple((u, m + v) for u in range(m) for v in range(n)))


def cycle_graph(n: int) -> Graph:
    return Graph(tuple((i, (i + 1) % n) for i in range(n)))


def wheel_graph(n: int) -> Graph:
    """``n`` vertices: hub 0 joined to every vertex of the rim cycle 1..n-1."""
    rim = [(1 + i, 1 + (i + 1) % (n - 1)) for i in range(n - 1)]
    return Graph(tuple((0, k) for k in range(1, n)) + tuple(rim))


def read_edge_list(path: str | Path) -> Graph:
    text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    return parse_edge_list(text)


def parse_edge_list(text: str) -> Graph:
    """Parse lines of ``u v`` (0-indexed); blank lines and ``#`` comments are skipped."""
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise StructuralError(f"line {lineno}: expected 'u v', got {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph(tuple(edges))


class UnionFind:
    """Disjoint sets with union by size and an undo log (no path compression)."""

    def __init__(self):
        self.parent: dict[int, int] = {}
        self.size: dict[int, int] = {}
        self.history: list[tuple[int, int] | None] = []

    def find(self, x: int) -> int:
        while self.parent.get(x, x) != x:
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size.get(ra, 1) < self.size.get(rb, 1):
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] = self.size.get(ra, 1) + self.size.get(rb, 1)
        self.history.append((ra, rb))
        return True

    def undo(self) -> None:
        ra, rb = self.history.pop()
        del self.parent[rb]
        self.size[ra] -= self.size.get(rb, 1)


def is_forest(edges) -> bool:
    uf = UnionFind()
    return all(uf.union(u, v) for u, v in edges)


def _components(G: Graph) -> list[tuple[list[int], list[tuple[int, int]]]]:
    uf = UnionFind()
    for u, v in G.edges:
        uf.union(u, v)
    groups: dict[int, tuple[set, list]] = {}
    for u, v in G.edges:
        verts, edges = groups.setdefault(uf.find(u), (set(), []))
        verts.update((u, v))
        edges.append((u, v))
    return [(sorted(vs), es) for vs, es in groups.values()]


def _densest_bound(vertices: list[int], edges: list[tuple[int, int]]) -> int:
    """max over vertex subsets H (|H| >= 2) of ceil(m_H / (|H| - 1))."""
    n = len(vertices)
    pos = {v: k for k, v in enumerate(vertices)}
    masks = np.arange(1 << n, dtype=np.int64)
    m_h = np.zeros(1 << n, dtype=np.int64)
    for u, v in edges:
        m_h += ((masks >> pos[u]) & 1) & ((masks >> pos[v]) & 1)
    n_h = np.zeros(1 << n, dtype=np.int64)
    for k in range(n):
        n_h += (masks >> k) & 1
    sel = n_h >= 2
    return int(np.max(-((-m_h[sel]) // (n_h[sel] - 1))))


def nash_williams_bound(G: Graph, exhaustive: bool = True) -> int:
    """Nash-Williams density bound; exact arboricity when ``exhaustive``.

    Components with more than 20 vertices only contribute their global
    density ``ceil(m / (n - 1))``.
    """
    best = 0
    for verts, edges in _components(G):
        best = max(best, math.ceil(len(edges) / (len(verts) - 1)))
        if exhaustive and len(verts) <= _MAX_SUBSET_VERTICES:
            best = max(best, _densest_bound(verts, edges))
    return best


def _partition(edges: list[tuple[int, int]], k: int) -> list[list[tuple[int, int]]] | None:
    forests = [UnionFind() for _ in range(k)]
    choice = [-1] * len(edges)

    def place(e: int, used: int) -> bool:
        if e == len(edges):
            return True
        u, v = edges[e]
        # forests beyond the first unused one are interchangeable
        for f in range(min(k, used + 1)):
            if forests[f].union(u, v):
                choice[e] = f
                if place(e + 1, max(used, f + 1)):
                    return True
                forests[f].undo()
        return False

    if not place(0, 0):
        return None
    parts: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    for e, f in zip(edges, choice):
        parts[f].append(e)
    return parts


@dataclass(frozen=True)
class ForestDecomposition:
    forests: tuple[tuple[tuple[int, int], ...], ...]

    def is_valid_for(self, G: Graph) -> bool:
        flat = [e for f in self.forests for e in f]
        return sorted(flat) == list(G.edges) and all(is_forest(f) for f in self.forests)


def _check_size(G: Graph) -> None:
    if len(G.edges) > MAX_EXACT_EDGES:
        raise CapExceededError(
            f"{len(G.edges)} edges exceed the exact-search cap of {MAX_EXACT_EDGES}"
        )


def forest_decomposition(G: Graph, k: int) -> ForestDecomposition:
    """Partition the edges into ``k`` forests by backtracking (canonical edge order)."""
    _check_size(G)
    if not G.edges:
        return ForestDecomposition(tuple(() for _ in range(k)))
    if k < nash_williams_bound(G) or k < 1:
        raise InfeasibleError(f"no partition of the edges into {k} forests exists")
    parts = _partition(list(G.edges), k)
    if parts is None:
        raise InfeasibleError(f"no partition of the edges into {k} forests exists")
    return ForestDecomposition(tuple(tuple(p) for p in parts))


def arboricity(G: Graph) -> int:
    """Minimum number of forests covering the edges (0 for an edgeless graph).

    The search starts at the Nash-Williams density bound, which certifies
    optimality whenever a partition with that many forests is found.
    """
    _check_size(G)
    if not G.edges:
        return 0
    k = max(1, nash_williams_bound(G))
    while _partition(list(G.edges), k) is None:
        k += 1
    return k
