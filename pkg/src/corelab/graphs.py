"""Finite directed multigraphs: paths, simple cycles, double-cycle property."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "DirectedGraph",
    "Path",
    "enumerate_simple_cycles",
    "has_strong_double_cycle",
    "paths_of_length",
    "single_vertex_graph",
    "cycle_graph",
]


@dataclass(frozen=True)
class DirectedGraph:
    """Vertices ``0..vertex_count-1``; edge ``e`` runs ``edges[e][0] -> edges[e][1]``.

    Edge ids are the positions in ``edges``, so they are dense by construction.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        edges = tuple((int(s), int(r)) for s, r in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.vertex_count < 1:
            raise ValueError("a graph needs at least one vertex")
        for e, (s, r) in enumerate(edges):
            if not (0 <= s < self.vertex_count and 0 <= r < self.vertex_count):
                raise ValueError(f"edge {e} has endpoint outside 0..{self.vertex_count - 1}")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def source(self, e: int) -> int:
        return self.edges[e][0]

    def range(self, e: int) -> int:
        return self.edges[e][1]

    def out_edges(self, v: int) -> list[int]:
        return [e for e, (s, _) in enumerate(self.edges) if s == v]

    def adjacency(self) -> np.ndarray:
        """Count matrix ``M[r, s]`` = number of edges from s to r."""
        m = np.zeros((self.vertex_count, self.vertex_count), dtype=np.int64)
        for s, r in self.edges:
            m[r, s] += 1
        return m

    def relabel(self, vertex_perm: Sequence[int], edge_perm: Sequence[int]) -> "DirectedGraph":
        """Graph with vertex v renamed ``vertex_perm[v]`` and edge e moved to ``edge_perm[e]``."""
        new = [None] * self.edge_count
        for e, (s, r) in enumerate(self.edges):
            new[edge_perm[e]] = (vertex_perm[s], vertex_perm[r])
        return DirectedGraph(self.vertex_count, tuple(new))


@dataclass(frozen=True)
class Path:
    """Edges in written order ``e_k ... e_1``; ``e_1`` is traversed first."""

    graph: DirectedGraph
    edges: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))
        if not self.edges:
            raise ValueError("paths have length at least 1")
        if not is_composable(self.graph, self.edges):
            raise ValueError(f"edges {self.edges} are not composable")

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def source(self) -> int:
        return self.graph.source(self.edges[-1])

    @property
    def range(self) -> int:
        return self.graph.range(self.edges[0])

    def is_cycle(self) -> bool:
        return self.source == self.range

    def vertices(self) -> list[int]:
        """Vertices visited, in traversal order, starting at the source."""
        out = [self.source]
        for e in reversed(self.edges):
            out.append(self.graph.range(e))
        return out


def is_composable(g: DirectedGraph, edges: Sequence[int]) -> bool:
    # written order: r(e_i) = s(e_{i+1}) where e_{i+1} sits to the left
    return all(g.range(edges[i + 1]) == g.source(edges[i]) for i in range(len(edges) - 1))


def _canonical_rotation(seq: tuple[int, ...]) -> tuple[int, ...]:
    return min(seq[i:] + seq[:i] for i in range(len(seq)))


def enumerate_simple_cycles(g: DirectedGraph) -> list[Path]:
    """All simple directed cycles, each once, in canonical rotation.

    Backtracking from each start vertex ``v`` through vertices larger than
    ``v``; every simple cycle is found exactly once from its smallest vertex.
    Parallel edges give distinct cycles.
    """
    found: set[tuple[int, ...]] = set()
    out_by_vertex = [g.out_edges(v) for v in range(g.vertex_count)]

    def walk(start: int, v: int, visited: set[int], trail: list[int]) -> Iterator[list[int]]:
        for e in out_by_vertex[v]:
            r = g.range(e)
            if r == start:
                yield trail + [e]
            elif r > start and r not in visited:
                visited.add(r)
                yield from walk(start, r, visited, trail + [e])
                visited.discard(r)

    for start in range(g.vertex_count):
        for trail in walk(start, start, {start}, []):
            written = tuple(reversed(trail))
            found.add(_canonical_rotation(written))
    return [Path(g, c) for c in sorted(found)]


def _reachable(g: DirectedGraph, v: int) -> set[int]:
    seen = {v}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for e in g.out_edges(u):
            r = g.range(e)
            if r not in seen:
                seen.add(r)
                queue.append(r)
    return seen


def has_strong_double_cycle(g: DirectedGraph) -> bool:
    """Every vertex reaches (possibly trivially) a vertex on two distinct simple cycles."""
    counts = [0] * g.vertex_count
    for c in enumerate_simple_cycles(g):
        for v in set(c.vertices()):
            counts[v] += 1
    hubs = {v for v, n in enumerate(counts) if n >= 2}
    if not hubs:
        return False
    return all(_reachable(g, v) & hubs for v in range(g.vertex_count))


def paths_of_length(g: DirectedGraph, n: int) -> list[Path]:
    """Composable edge sequences of length n, lexicographic in written order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    seqs = [(e,) for e in range(g.edge_count)]
    for _ in range(n - 1):
        # prepend on the left: new leading edge must start where the path ends
        seqs = [(e,) + p for e in range(g.edge_count) for p in seqs
                if g.source(e) == g.range(p[0])]
    return [Path(g, p) for p in sorted(seqs)]


def single_vertex_graph(n_loops: int) -> DirectedGraph:
    return DirectedGraph(1, tuple((0, 0) for _ in range(n_loops)))


def cycle_graph(n: int) -> DirectedGraph:
    """Vertices 0..n-1 with edge i : i -> i+1 (mod n)."""
    return DirectedGraph(n, tuple((i, (i + 1) % n) for i in range(n)))
