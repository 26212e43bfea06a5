"""Tree decompositions and tree-partitions.

Covers validation, elimination-ordering heuristics, an exact subset-DP oracle for
small graphs, and a tree-partition construction whose part sizes are bounded
linearly in (treewidth + 1) times the maximum degree.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .graph import Graph, GraphError, components_within, connected_components, max_degree
from .validation import Validation

EXACT_LIMIT = 14
PARTITION_CONSTANT = 20


class BudgetExceeded(RuntimeError):
    """A construction produced a structure wider than its guaranteed budget."""


@dataclass(frozen=True)
class TreeDecomposition:
    tree: Graph
    bags: tuple[tuple[int, ...], ...]

    @classmethod
    def make(cls, tree_edges: Iterable[tuple[int, int]], bags: Sequence[Iterable[int]]):
        bags_t = tuple(tuple(sorted(set(b))) for b in bags)
        return cls(Graph.from_edges(len(bags_t), tree_edges), bags_t)

    @property
    def width(self) -> int:
        return width(self)


@dataclass(frozen=True)
class TreePartition:
    tree: Graph
    parts: tuple[tuple[int, ...], ...]
    budget: int | None = None

    @classmethod
    def make(cls, tree_edges, parts, budget=None):
        parts_t = tuple(tuple(sorted(set(p))) for p in parts)
        return cls(Graph.from_edges(len(parts_t), tree_edges), parts_t, budget)

    @property
    def width(self) -> int:
        return max((len(p) for p in self.parts), default=0)


def is_forest(t: Graph) -> bool:
    return t.m == t.n - len(connected_components(t))


def _require_forest(t: Graph) -> None:
    if not is_forest(t):
        raise GraphError("tree field contains a cycle")


def width(td: TreeDecomposition) -> int:
    return max((len(b) for b in td.bags), default=0) - 1


def validate_tree_decomposition(g: Graph, td: TreeDecomposition) -> Validation:
    """Check vertex coverage, occurrence connectivity and edge coverage.

    The index tree may be a forest; a cycle raises :class:`GraphError`.
    """
    _require_forest(td.tree)
    report = Validation()
    occ: list[list[int]] = [[] for _ in range(g.n)]
    for x, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.n:
                report.add("invalid-vertex", (x, v))
            else:
                occ[v].append(x)
    for v in range(g.n):
        if not occ[v]:
            report.add("vertex-missing", v)
        elif len(components_within(td.tree, occ[v])) > 1:
            report.add("vertex-disconnected", v)
    bag_sets = [set(b) for b in td.bags]
    for u, v in g.edges():
        if occ[u] and not any(v in bag_sets[x] for x in occ[u]):
            report.add("edge", (u, v))
    return report


def validate_tree_partition(g: Graph, tp: TreePartition) -> Validation:
    _require_forest(tp.tree)
    report = Validation()
    owner = [-1] * g.n
    for x, part in enumerate(tp.parts):
        for v in part:
            if not 0 <= v < g.n:
                report.add("invalid-vertex", (x, v))
            elif owner[v] >= 0:
                report.add("duplicate", (v, owner[v], x))
            else:
                owner[v] = x
    for v in range(g.n):
        if owner[v] < 0:
            report.add("uncovered", v)
    for u, v in g.edges():
        x, y = owner[u], owner[v]
        if x >= 0 and y >= 0 and x != y and not tp.tree.has_edge(x, y):
            report.add("edge", (u, v))
    return report


# --- heuristics -----------------------------------------------------------


def decomposition_from_ordering(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Standard elimination-game decomposition: one bag per vertex."""
    if sorted(order) != list(range(g.n)):
        raise GraphError("ordering must be a permutation of the vertices")
    pos = {v: i for i, v in enumerate(order)}
    nbrs = [set(a) for a in g.adj]
    bags: list[tuple[int, ...]] = []
    later_sets: list[set[int]] = []
    for v in order:
        later = nbrs[v]
        bags.append(tuple(sorted(later | {v})))
        later_sets.append(set(later))
        for a in later:
            nbrs[a].discard(v)
            nbrs[a] |= later - {a}
        nbrs[v] = set()
    edges = []
    roots = []
    for i, later in enumerate(later_sets):
        if later:
            edges.append((i, min(pos[a] for a in later)))
        else:
            roots.append(i)
    edges.extend(zip(roots, roots[1:]))
    return TreeDecomposition.make(edges, bags)


def _fill(nbrs: list[set[int]], v: int) -> int:
    ns = sorted(nbrs[v])
    missing = 0
    for i, a in enumerate(ns):
        na = nbrs[a]
        for b in ns[i + 1 :]:
            if b not in na:
                missing += 1
    return missing


def elimination_ordering(g: Graph, strategy: str = "min-degree") -> list[int]:
    """Greedy ordering; ties go to the lowest vertex id."""
    if strategy not in ("min-degree", "min-fill"):
        raise ValueError(f"unknown strategy {strategy!r}")
    nbrs = [set(a) for a in g.adj]
    score: Callable[[int], int]
    if strategy == "min-degree":
        score = lambda v: len(nbrs[v])  # noqa: E731
    else:
        score = lambda v: _fill(nbrs, v)  # noqa: E731
    current = {v: score(v) for v in range(g.n)}
    heap = [(s, v) for v, s in current.items()]
    heapq.heapify(heap)
    alive = set(range(g.n))
    order = []
    while heap:
        s, v = heapq.heappop(heap)
        if v not in alive or current[v] != s:
            continue
        order.append(v)
        alive.discard(v)
        later = nbrs[v]
        for a in later:
            nbrs[a].discard(v)
            nbrs[a] |= later - {a}
        if strategy == "min-degree":
            touched = later
        else:
            touched = set(later)
            for a in later:
                touched |= nbrs[a]
            touched &= alive
        nbrs[v] = set()
        for u in touched:
            new = score(u)
            if new != current[u]:
                current[u] = new
                heapq.heappush(heap, (new, u))
    return order


def heuristic_tree_decomposition(g: Graph, strategy: str = "min-degree") -> TreeDecomposition:
    return decomposition_from_ordering(g, elimination_ordering(g, strategy))


# --- exact oracle ---------------------------------------------------------


def exact_treewidth(g: Graph, limit: int = EXACT_LIMIT) -> tuple[int, TreeDecomposition]:
    """Exact treewidth by dynamic programming over sets of eliminated vertices.

    ``tw(S) = min_{v in S} max(tw(S - v), |Q(S - v, v)|)`` where ``Q(S, v)`` is
    the set of vertices outside ``S + v`` reachable from ``v`` through ``S``.
    """
    n = g.n
    if n > limit:
        raise GraphError(f"exact treewidth limited to {limit} vertices, got {n}")
    if n == 0:
        return -1, TreeDecomposition.make([], [])
    adj = [sum(1 << w for w in g.adj[v]) for v in range(n)]
    full = (1 << n) - 1

    def q_size(s: int, v: int) -> int:
        seen = 1 << v
        frontier = 1 << v
        out = 0
        while frontier:
            nb = 0
            f = frontier
            while f:
                low = f & -f
                nb |= adj[low.bit_length() - 1]
                f ^= low
            out |= nb & ~s & ~seen
            frontier = nb & s & ~seen
            seen |= frontier
        out &= ~(1 << v)
        return bin(out).count("1")

    best = [0] * (1 << n)
    choice = [0] * (1 << n)
    best[0] = -1
    for s in range(1, 1 << n):
        value = n
        pick = -1
        t = s
        while t:
            low = t & -t
            v = low.bit_length() - 1
            rest = s ^ low
            cand = max(best[rest], q_size(rest, v))
            if cand < value:
                value, pick = cand, v
            t ^= low
        best[s] = value
        choice[s] = pick
    order = []
    s = full
    while s:
        v = choice[s]
        order.append(v)
        s ^= 1 << v
    order.reverse()
    td = decomposition_from_ordering(g, order)
    assert width(td) == best[full]
    return best[full], td


# --- decomposition transport ------------------------------------------------


def map_decomposition(td: TreeDecomposition, mapping: Mapping[int, int]) -> TreeDecomposition:
    """Push bags through ``mapping``; vertices absent from it are dropped.

    Restriction to a vertex subset and contraction of connected groups both
    preserve validity under this transport.
    """
    bags = [tuple(sorted({mapping[v] for v in bag if v in mapping})) for bag in td.bags]
    return TreeDecomposition(td.tree, tuple(bags))


# --- tree-partitions --------------------------------------------------------


def partition_budget(k: int, delta: int) -> int:
    return PARTITION_CONSTANT * k * max(delta, 1)


class _Separator:
    """Rooted view of the decomposition nodes that meet a vertex set."""

    def __init__(self, td: TreeDecomposition, occ: list[list[int]]):
        self.td = td
        self.occ = occ

    def pick(self, region: set[int], weighted: set[int], threshold: int) -> set[int]:
        """Union of region-restricted bags cutting ``region`` into pieces of weight < threshold.

        Greedy: in post-order, cut at the first node whose uncut subtree weight
        reaches ``threshold``; then close the cut nodes under lowest common
        ancestors so every piece borders at most two cut bags.
        """
        nodes = sorted({x for v in region for x in self.occ[v]})
        node_set = set(nodes)
        root = nodes[0]
        parent = {root: -1}
        depth = {root: 0}
        order = [root]
        for x in order:
            for y in self.td.tree.adj[x]:
                if y in node_set and y not in parent:
                    parent[y] = x
                    depth[y] = depth[x] + 1
                    order.append(y)
        own = dict.fromkeys(nodes, 0)
        for v in weighted:
            top = min(self.occ[v], key=lambda x: (depth.get(x, 1 << 30), x))
            own[top] += 1
        acc = dict(own)
        cut = []
        for x in reversed(order):
            if acc[x] >= threshold:
                cut.append(x)
                acc[x] = 0
            if parent[x] >= 0:
                acc[parent[x]] += acc[x]
        pre = {x: i for i, x in enumerate(order)}
        closed = set(cut)
        ranked = sorted(cut, key=lambda x: pre[x])
        for a, b in zip(ranked, ranked[1:]):
            while a != b:
                if depth[a] >= depth[b]:
                    a = parent[a]
                else:
                    b = parent[b]
            closed.add(a)
        return {v for x in closed for v in self.td.bags[x] if v in region}


def tree_partition_bounded(g: Graph, td: TreeDecomposition) -> TreePartition:
    """Tree-partition of width at most 20 * (width(td) + 1) * max_degree(g).

    Grown from a root part per component. Each part ``R = S + X`` holds the set
    ``S`` forced by its parent plus a separator ``X`` built from few bags, so
    each remaining component sees fewer than ``3 k D`` vertices of ``N(R)``;
    parts therefore stay below ``9 k D``.
    """
    k = max(width(td) + 1, 1)
    delta = max(max_degree(g), 1)
    budget = partition_budget(k, delta)
    if g.n == 0:
        return TreePartition.make([], [], budget)
    occ: list[list[int]] = [[] for _ in range(g.n)]
    for x, bag in enumerate(td.bags):
        for v in bag:
            occ[v].append(x)
    if any(not o for o in occ):
        raise GraphError("decomposition does not cover every vertex")
    sep = _Separator(td, occ)
    threshold = k * delta
    parts: list[list[int]] = []
    tree_edges: list[tuple[int, int]] = []
    roots: list[int] = []
    stack: list[tuple[frozenset[int], frozenset[int], int]] = []
    for comp in reversed(connected_components(g)):
        cset = frozenset(comp)
        # A component inside one bag is already a part of width <= k.
        whole = any(cset.issubset(td.bags[x]) for x in occ[comp[0]])
        stack.append((cset, cset if whole else frozenset(comp[:1]), -1))
    while stack:
        region, forced, parent = stack.pop()
        boundary = {w for v in forced for w in g.adj[v] if w in region and w not in forced}
        root_part = set(forced)
        if len(boundary) >= threshold:
            root_part |= sep.pick(set(region), boundary, threshold)
        me = len(parts)
        parts.append(sorted(root_part))
        if parent < 0:
            roots.append(me)
        else:
            tree_edges.append((parent, me))
        rest = region - root_part
        children = components_within(g, rest)
        for comp in reversed(children):
            cset = frozenset(comp)
            nxt = frozenset(w for v in root_part for w in g.adj[v] if w in cset)
            stack.append((cset, nxt, me))
    tree_edges.extend(zip(roots, roots[1:]))
    tp = TreePartition.make(tree_edges, parts, budget)
    if tp.width > budget:
        raise BudgetExceeded(f"tree-partition width {tp.width} exceeds budget {budget}")
    return tp

