"""Simple undirected graphs on dense vertex ids and the basic operations on them."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

DEFAULT_PRODUCT_LIMIT = 10**6


class GraphError(ValueError):
    """Raised for malformed graphs or invalid arguments to graph operations."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with vertices ``0..n-1``.

    ``adj[v]`` is the sorted tuple of neighbours of ``v``. Instances are
    immutable; build them with :meth:`from_edges`.
    """

    n: int
    adj: tuple[tuple[int, ...], ...]
    _nbr_sets: tuple[frozenset[int], ...] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        if len(self.adj) != self.n:
            raise GraphError(f"adjacency has {len(self.adj)} rows, expected {self.n}")
        object.__setattr__(self, "_nbr_sets", tuple(frozenset(a) for a in self.adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def empty(cls, n: int = 0) -> "Graph":
        return cls.from_edges(n, ())

    def neighbours(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._nbr_sets[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        """All edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        return [(u, v) for u in range(self.n) for v in self.adj[u] if u < v]

    @property
    def m(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def vertices(self) -> range:
        return range(self.n)

    def validate(self) -> None:
        """Check simplicity and symmetry; raise :class:`GraphError` otherwise."""
        for v, nbrs in enumerate(self.adj):
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphError(f"neighbours of {v} not sorted/unique")
            for w in nbrs:
                if not 0 <= w < self.n:
                    raise GraphError(f"neighbour {w} of {v} out of range")
                if w == v:
                    raise GraphError(f"loop at vertex {v}")
                if v not in self._nbr_sets[w]:
                    raise GraphError(f"edge ({v}, {w}) is not symmetric")


def max_degree(g: Graph) -> int:
    return max((len(a) for a in g.adj), default=0)


def _check_vertices(g: Graph, vs: Iterable[int]) -> None:
    for v in vs:
        if not (isinstance(v, int) and 0 <= v < g.n):
            raise GraphError(f"invalid vertex id {v!r} for graph on {g.n} vertices")


def components_within(g: Graph, allowed: Iterable[int]) -> list[list[int]]:
    """Connected components of ``g[allowed]``, each sorted, ordered by smallest member."""
    allowed_set = set(allowed)
    seen: set[int] = set()
    comps = []
    for s in sorted(allowed_set):
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.adj[u]:
                if w in allowed_set and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def connected_components(g: Graph) -> list[list[int]]:
    return components_within(g, range(g.n))


def is_connected_set(g: Graph, s: Iterable[int]) -> bool:
    s = list(s)
    return len(components_within(g, s)) <= 1


def induced_subgraph(g: Graph, s: Iterable[int]) -> tuple[Graph, list[int]]:
    """Return ``g[s]`` relabelled to ``0..|s|-1`` plus the new->old map."""
    old = sorted(set(s))
    _check_vertices(g, old)
    index = {v: i for i, v in enumerate(old)}
    edges = [
        (index[u], index[w]) for u in old for w in g.adj[u] if w in index and u < w
    ]
    return Graph.from_edges(len(old), edges), old


@dataclass(frozen=True)
class ContractionMap:
    """``mapping[old] = new`` plus the groups that were merged into single vertices."""

    mapping: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]


def _check_disjoint(groups: Sequence[Sequence[int]], n: int, *, cover: bool) -> None:
    seen: dict[int, int] = {}
    for gi, grp in enumerate(groups):
        if len(grp) == 0:
            raise GraphError(f"group {gi} is empty")
        for v in grp:
            if v in seen:
                raise GraphError(f"vertex {v} in groups {seen[v]} and {gi}")
            seen[v] = gi
    if cover and len(seen) != n:
        missing = sorted(set(range(n)) - set(seen))
        raise GraphError(f"parts do not cover vertices {missing[:10]}")


def contract_components(
    g: Graph, groups: Sequence[Iterable[int]]
) -> tuple[Graph, ContractionMap]:
    """Contract each (connected) group to one vertex.

    New ids: groups first in the given order, then the ungrouped vertices in
    increasing order.
    """
    groups_t = tuple(tuple(sorted(set(grp))) for grp in groups)
    for grp in groups_t:
        _check_vertices(g, grp)
    _check_disjoint(groups_t, g.n, cover=False)
    for gi, grp in enumerate(groups_t):
        if not is_connected_set(g, grp):
            raise GraphError(f"group {gi} does not induce a connected subgraph")
    mapping = [-1] * g.n
    for gi, grp in enumerate(groups_t):
        for v in grp:
            mapping[v] = gi
    nxt = len(groups_t)
    for v in range(g.n):
        if mapping[v] < 0:
            mapping[v] = nxt
            nxt += 1
    edges = {
        (min(mapping[u], mapping[w]), max(mapping[u], mapping[w]))
        for u, w in g.edges()
        if mapping[u] != mapping[w]
    }
    return Graph.from_edges(nxt, edges), ContractionMap(tuple(mapping), groups_t)


def quotient(g: Graph, parts: Sequence[Iterable[int]]) -> Graph:
    """Quotient graph: vertex ``i`` is ``parts[i]``; adjacent iff a cross edge exists."""
    parts_t = [tuple(p) for p in parts]
    for p in parts_t:
        _check_vertices(g, p)
    _check_disjoint(parts_t, g.n, cover=True)
    owner = [0] * g.n
    for i, p in enumerate(parts_t):
        for v in p:
            owner[v] = i
    edges = {
        (min(owner[u], owner[w]), max(owner[u], owner[w]))
        for u, w in g.edges()
        if owner[u] != owner[w]
    }
    return Graph.from_edges(len(parts_t), edges)


def strong_product(a: Graph, b: Graph, limit: int = DEFAULT_PRODUCT_LIMIT) -> Graph:
    """Strong product; vertex ``(v, x)`` gets id ``v * b.n + x``."""
    n = a.n * b.n
    if n > limit:
        raise GraphError(f"strong product has {n} vertices, above limit {limit}")
    nb = b.n
    edges = []
    for v in range(a.n):
        for x, y in b.edges():
            edges.append((v * nb + x, v * nb + y))
    for v, w in a.edges():
        for x in range(nb):
            edges.append((v * nb + x, w * nb + x))
        for x, y in b.edges():
            edges.append((v * nb + x, w * nb + y))
            edges.append((v * nb + y, w * nb + x))
    return Graph.from_edges(n, edges)


def bfs_distances(g: Graph, source: int, cutoff: int | None = None) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        d = dist[u]
        if cutoff is not None and d >= cutoff:
            continue
        for w in g.adj[u]:
            if w not in dist:
                dist[w] = d + 1
                queue.append(w)
    return dist


def graph_power(g: Graph, p: int) -> Graph:
    if p < 1:
        raise GraphError("power must be at least 1")
    edges = []
    for v in range(g.n):
        for w in bfs_distances(g, v, cutoff=p):
            if v < w:
                edges.append((v, w))
    return Graph.from_edges(g.n, edges)
