"""Seeded instance families.

Randomness comes only from ``random.Random(seed).random()`` (MT19937 doubles);
integer draws, shuffles and samples are derived from it here, so the output
does not depend on how a Python version implements ``randrange``/``sample``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from .graph import Graph, GraphError, induced_subgraph
from .layering import Layering, band
from .treewidth import heuristic_tree_decomposition, width


class Rng:
    def __init__(self, seed: int):
        self._r = random.Random(seed)

    def random(self) -> float:
        return self._r.random()

    def below(self, n: int) -> int:
        return min(int(self._r.random() * n), n - 1)

    def shuffle(self, xs: list) -> None:
        for i in range(len(xs) - 1, 0, -1):
            j = self.below(i + 1)
            xs[i], xs[j] = xs[j], xs[i]

    def sample(self, xs, k: int) -> list:
        pool = list(xs)
        self.shuffle(pool)
        return sorted(pool[:k])


def _check_dims(*dims: int) -> None:
    if any(d < 1 for d in dims):
        raise GraphError("dimensions must be at least 1")


def gen_grid(rows: int, cols: int) -> Graph:
    _check_dims(rows, cols)
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return Graph.from_edges(rows * cols, edges)


def gen_triangulated_grid(rows: int, cols: int) -> Graph:
    """Grid plus the down-right diagonal of every cell."""
    _check_dims(rows, cols)
    base = gen_grid(rows, cols)
    diagonals = [
        (i * cols + j, (i + 1) * cols + j + 1)
        for i in range(rows - 1)
        for j in range(cols - 1)
    ]
    return Graph.from_edges(base.n, base.edges() + diagonals)


def gen_series_parallel(n: int, seed: int) -> Graph:
    """Start from an edge; each new vertex subdivides a random edge or is
    attached in parallel to both of its ends (keeping the edge).
    """
    if n < 2:
        raise GraphError("series-parallel generator needs n >= 2")
    rng = Rng(seed)
    edges = [(0, 1)]
    for v in range(2, n):
        idx = rng.below(len(edges))
        a, b = edges[idx]
        if rng.random() < 0.5:
            edges[idx] = (a, v)
            edges.append((v, b))
        else:
            edges.append((a, v))
            edges.append((v, b))
    return Graph.from_edges(n, [(min(e), max(e)) for e in edges])


def _partial_ktree(size: int, k: int, rng: Rng, keep: float = 0.75) -> list[tuple[int, int]]:
    if size <= 0:
        return []
    start = min(k + 1, size)
    edges = set(combinations(range(start), 2))
    cliques = [tuple(c) for c in combinations(range(start), min(k, start))] if start > k else []
    for v in range(start, size):
        q = cliques[rng.below(len(cliques))]
        for u in q:
            edges.add((u, v))
        for drop in q:
            cliques.append(tuple(sorted(set(q) - {drop} | {v})))
    return sorted(e for e in edges if rng.random() < keep)


def gen_banded(
    layers: int, per_layer: int, k: int, delta_cap: int, seed: int
) -> tuple[Graph, Layering]:
    """Layers of random partial k-trees joined by random partial matchings.

    Vertex ``j`` of layer ``i`` has id ``i * per_layer + j``. Between two
    consecutive layers, ``delta_cap`` rounds of a random matching are laid
    down (each pair kept with probability 1/2), so a vertex has at most
    ``delta_cap`` neighbours in each adjacent layer.
    """
    if layers < 1 or per_layer < 1 or k < 1:
        raise GraphError("layers, per_layer and k must be at least 1")
    if delta_cap < 0:
        raise GraphError("delta_cap must be non-negative")
    rng = Rng(seed)
    edges: set[tuple[int, int]] = set()
    for i in range(layers):
        off = i * per_layer
        edges.update((off + a, off + b) for a, b in _partial_ktree(per_layer, k, rng))
    for i in range(layers - 1):
        lo, hi = i * per_layer, (i + 1) * per_layer
        for _ in range(delta_cap):
            perm = list(range(per_layer))
            rng.shuffle(perm)
            for j, pj in enumerate(perm):
                if rng.random() < 0.5:
                    edges.add((lo + j, hi + pj))
    g = Graph.from_edges(layers * per_layer, edges)
    lay = Layering.from_sets(range(i * per_layer, (i + 1) * per_layer) for i in range(layers))
    return g, lay


def band_widths(g: Graph, l: Layering, size: int = 7, strategy: str = "min-degree") -> list[int]:
    """Heuristic width of every window of ``size`` consecutive layers."""
    out = []
    for start in range(max(len(l) - size + 1, 1)):
        sub, _ = induced_subgraph(g, band(l, start, size))
        out.append(width(heuristic_tree_decomposition(sub, strategy)))
    return out


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    params: tuple[int, ...]
    seed: int = 0

    def build(self) -> tuple[Graph, Layering | None]:
        f, p = self.family, self.params
        if f == "grid":
            return gen_grid(*p), None
        if f == "trigrid":
            return gen_triangulated_grid(*p), None
        if f == "sp":
            return gen_series_parallel(p[0], self.seed), None
        if f == "banded":
            return gen_banded(*p, seed=self.seed)
        raise GraphError(f"unknown family {f!r}")


def gen_apexed(
    base: GeneratorSpec, apex_count: int, apex_degree: int, seed: int
) -> tuple[Graph, list[int]]:
    """Base graph plus ``apex_count`` new vertices, each joined to
    ``apex_degree`` distinct random base vertices. Apex ids follow the base ids.
    """
    g, _ = base.build()
    if apex_count < 0 or apex_degree < 0 or apex_degree > g.n:
        raise GraphError(f"cannot attach apices of degree {apex_degree} to {g.n} vertices")
    rng = Rng(seed)
    edges = g.edges()
    apices = list(range(g.n, g.n + apex_count))
    for a in apices:
        edges.extend((w, a) for w in rng.sample(range(g.n), apex_degree))
    return Graph.from_edges(g.n + apex_count, edges), apices
