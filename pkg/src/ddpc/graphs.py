"""Undirected communication/coupling graphs for network systems.

Node ids are 0-based. Neighbor lists are kept sorted ascending; every
module downstream relies on that canonical ordering when stacking
per-neighbor signal blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Graph", "GraphParameterError", "build_graph"]


class GraphParameterError(ValueError):
    """Raised for invalid graph construction parameters."""


@dataclass(frozen=True)
class Graph:
    """Undirected graph without self-loops.

    edges stores each edge once as (i, j) with i < j; neighbors[i] is the
    ascending tuple of nodes adjacent to i.
    """

    node_count: int
    edges: frozenset[tuple[int, int]]
    neighbors: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise GraphParameterError("node_count must be positive")
        adj: list[set[int]] = [set() for _ in range(self.node_count)]
        for i, j in self.edges:
            if i == j:
                raise GraphParameterError(f"self-loop at node {i}")
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise GraphParameterError(f"edge ({i}, {j}) out of range")
            if i > j:
                raise GraphParameterError(f"edge ({i}, {j}) not in canonical (i < j) form")
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "neighbors", tuple(tuple(sorted(s)) for s in adj))

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])


def _star_edges(n: int) -> set[tuple[int, int]]:
    return {(0, j) for j in range(1, n)}


def _ring_edges(n: int, k: int) -> set[tuple[int, int]]:
    # k/2 nearest neighbors on each side
    edges = set()
    for i in range(n):
        for d in range(1, k // 2 + 1):
            j = (i + d) % n
            edges.add((min(i, j), max(i, j)))
    return edges


def _nws_edges(n: int, k: int, p: float, rng: np.random.Generator) -> set[tuple[int, int]]:
    """Ring lattice plus random shortcuts, one Bernoulli(p) draw per ring edge.

    Shortcuts are added (never rewired); duplicate and self edges are skipped,
    matching the small-world construction with edge addition.
    """
    edges = _ring_edges(n, k)
    for i, j in sorted(edges):
        if rng.random() < p:
            w = int(rng.integers(0, n))
            if w != i and (min(i, w), max(i, w)) not in edges:
                edges.add((min(i, w), max(i, w)))
    return edges


def build_graph(kind: str, params: dict, seed: int = 0) -> Graph:
    """Build a named topology deterministically for a given seed.

    kinds:
      star                     params: n        (node 0 is the hub)
      newman_watts_strogatz    params: n, k (even ring degree), p in [0, 1]
      explicit_edge_list       params: n, edges (iterable of (i, j) pairs)
    """
    if kind == "star":
        n = int(params["n"])
        if n < 2:
            raise GraphParameterError("star needs n >= 2")
        return Graph(n, frozenset(_star_edges(n)))
    if kind == "newman_watts_strogatz":
        n = int(params["n"])
        k = int(params["k"])
        p = float(params["p"])
        if n < 2:
            raise GraphParameterError("graph needs n >= 2")
        if k % 2 != 0 or k < 2 or k >= n:
            raise GraphParameterError(f"ring degree k={k} must be even with 2 <= k < n")
        if not 0.0 <= p <= 1.0:
            raise GraphParameterError(f"shortcut probability p={p} outside [0, 1]")
        rng = np.random.default_rng(seed)
        return Graph(n, frozenset(_nws_edges(n, k, p, rng)))
    if kind == "explicit_edge_list":
        n = int(params["n"])
        edges = {(min(int(i), int(j)), max(int(i), int(j))) for i, j in params["edges"]}
        return Graph(n, frozenset(edges))
    raise GraphParameterError(f"unknown graph kind {kind!r}")
