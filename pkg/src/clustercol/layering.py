"""Layerings: ordered vertex partitions where every edge spans at most one step."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .graph import Graph, GraphError, bfs_distances, connected_components
from .validation import Validation


@dataclass(frozen=True)
class Layering:
    """``layers[i]`` is the sorted tuple of vertices in layer ``i``; empty layers are kept."""

    layers: tuple[tuple[int, ...], ...]

    @classmethod
    def from_sets(cls, layers: Iterable[Iterable[int]]) -> "Layering":
        return cls(tuple(tuple(sorted(set(layer))) for layer in layers))

    def __len__(self) -> int:
        return len(self.layers)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.layers[i] if 0 <= i < len(self.layers) else ()

    def index_of(self, n: int) -> list[int]:
        """Per-vertex layer index for a graph on ``n`` vertices (-1 if missing).

        Assumes the layering is a partition; use :func:`validate_layering` first
        on untrusted input.
        """
        idx = [-1] * n
        for i, layer in enumerate(self.layers):
            for v in layer:
                if 0 <= v < n:
                    idx[v] = i
        return idx

    def sizes(self) -> list[int]:
        return [len(layer) for layer in self.layers]


def validate_layering(g: Graph, l: Layering) -> Validation:
    report = Validation()
    where: dict[int, int] = {}
    for i, layer in enumerate(l.layers):
        for v in layer:
            if not 0 <= v < g.n:
                report.add("invalid-vertex", v)
            elif v in where:
                report.add("duplicate", (v, where[v], i))
            else:
                where[v] = i
    for v in range(g.n):
        if v not in where:
            report.add("uncovered", v)
    for u, v in g.edges():
        if u in where and v in where and abs(where[u] - where[v]) > 1:
            report.add("edge", (u, v))
    return report


def bfs_layering(g: Graph, root: int) -> Layering:
    if not 0 <= root < g.n:
        raise GraphError(f"root {root} out of range")
    dist = bfs_distances(g, root)
    if len(dist) != g.n:
        raise GraphError("graph is disconnected; use bfs_layering_multi")
    depth = max(dist.values())
    layers: list[list[int]] = [[] for _ in range(depth + 1)]
    for v, d in dist.items():
        layers[d].append(v)
    return Layering.from_sets(layers)


def bfs_layering_multi(g: Graph) -> Layering:
    """BFS layering of every component from its smallest vertex, merged by depth."""
    layers: list[set[int]] = []
    for comp in connected_components(g):
        for v, d in bfs_distances(g, comp[0]).items():
            while len(layers) <= d:
                layers.append(set())
            layers[d].add(v)
    return Layering.from_sets(layers)


def shift_layering(l: Layering, s: int) -> Layering:
    return Layering(((),) * s + l.layers)


def band(l: Layering, i: int, w: int) -> list[int]:
    """Union of layers ``i .. i+w-1``; indices outside the layering count as empty."""
    if w < 1:
        raise ValueError("band width must be at least 1")
    out: list[int] = []
    for j in range(max(i, 0), min(i + w, len(l))):
        out.extend(l.layers[j])
    return sorted(out)


def coarsen_layering(l: Layering, p: int) -> Layering:
    """Merge every ``p`` consecutive layers, starting at index 0."""
    if p < 1:
        raise ValueError("coarsening factor must be at least 1")
    return Layering.from_sets(
        [v for layer in l.layers[i : i + p] for v in layer]
        for i in range(0, len(l), p)
    )


def distance_collapse(
    l: Layering, hit_layers: Iterable[int]
) -> tuple[Layering, list[int]]:
    """Regroup layers by their distance (along the layer path) to the nearest hit layer.

    Returns the new layering and ``d`` with ``d[j]`` the new index of old layer ``j``.
    """
    hits = sorted(set(hit_layers))
    if not hits:
        raise ValueError("hit_layers must be non-empty")
    if hits[0] < 0 or hits[-1] >= len(l):
        raise ValueError(f"hit layer out of range 0..{len(l) - 1}")
    d = [min(abs(j - i) for i in hits) for j in range(len(l))]
    out: list[list[int]] = [[] for _ in range(max(d) + 1)]
    for j, layer in enumerate(l.layers):
        out[d[j]].extend(layer)
    return Layering.from_sets(out), d
