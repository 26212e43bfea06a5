"""Layered treewidth, H-partitions and (k, l)-partitions.

A (k, l)-partition is an H-partition whose host has a witnessed tree
decomposition of width <= k, together with a layering in which every part has
at most l vertices per layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graph import Graph, GraphError, bfs_distances, graph_power, induced_subgraph, max_degree, quotient
from .layering import Layering, coarsen_layering, distance_collapse, validate_layering
from .treewidth import TreeDecomposition, heuristic_tree_decomposition, validate_tree_decomposition, width
from .validation import Validation


@dataclass(frozen=True)
class LayeredTreeDecomposition:
    td: TreeDecomposition
    layering: Layering
    layered_width: int


@dataclass(frozen=True)
class HPartition:
    """``parts[x]`` is the set of graph vertices placed on host vertex ``x``."""

    host: Graph
    parts: tuple[tuple[int, ...], ...]

    @classmethod
    def make(cls, host: Graph, parts: Iterable[Iterable[int]]) -> "HPartition":
        return cls(host, tuple(tuple(sorted(set(p))) for p in parts))

    def owner(self, n: int) -> list[int]:
        out = [-1] * n
        for x, part in enumerate(self.parts):
            for v in part:
                if 0 <= v < n:
                    out[v] = x
        return out


@dataclass(frozen=True)
class KLPartition:
    hp: HPartition
    layering: Layering
    k: int
    ell: int
    witness: TreeDecomposition


def _intersection_width(groups: Sequence[Sequence[int]], l: Layering, n: int) -> int:
    idx = l.index_of(n)
    best = 0
    for grp in groups:
        counts: dict[int, int] = {}
        for v in grp:
            counts[idx[v]] = counts.get(idx[v], 0) + 1
        best = max(best, max(counts.values(), default=0))
    return best


def layered_width_of_decomposition(g: Graph, td: TreeDecomposition, l: Layering) -> int:
    """Largest ``|bag & layer|`` over all bags and layers."""
    for name, report in (
        ("decomposition", validate_tree_decomposition(g, td)),
        ("layering", validate_layering(g, l)),
    ):
        if not report.ok:
            raise GraphError(f"invalid {name}: {report.summary()}")
    return _intersection_width(td.bags, l, g.n)


def validate_h_partition(g: Graph, hp: HPartition) -> Validation:
    report = Validation()
    if len(hp.parts) != hp.host.n:
        report.add("host-size", (len(hp.parts), hp.host.n))
    owner = [-1] * g.n
    for x, part in enumerate(hp.parts):
        if not part:
            report.add("empty-part", x)
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
        if x < 0 or y < 0 or x == y:
            continue
        if not (x < hp.host.n and y < hp.host.n and hp.host.has_edge(x, y)):
            report.add("edge", {"edge": (u, v), "hosts": (x, y)})
    return report


def partition_layered_width(g: Graph, hp: HPartition, l: Layering) -> int:
    return _intersection_width(hp.parts, l, g.n)


def validate_kl_partition(g: Graph, klp: KLPartition) -> Validation:
    report = Validation()
    report.extend(validate_h_partition(g, klp.hp), "partition:")
    report.extend(validate_layering(g, klp.layering), "layering:")
    if report.ok:
        lw = partition_layered_width(g, klp.hp, klp.layering)
        if lw > klp.ell:
            report.add("layered-width", (lw, klp.ell))
    report.extend(validate_tree_decomposition(klp.hp.host, klp.witness), "witness:")
    if width(klp.witness) > klp.k:
        report.add("witness-width", (width(klp.witness), klp.k))
    return report


def _require(report: Validation, what: str) -> None:
    if not report.ok:
        raise GraphError(f"invalid {what}: {report.summary()}")


def klpartition_from_parts(
    g: Graph, parts: Sequence[Iterable[int]], l: Layering, strategy: str = "min-degree"
) -> KLPartition:
    """Host = quotient, witness = heuristic decomposition of the quotient, tight k and l."""
    hp = HPartition.make(quotient(g, parts), parts)
    witness = heuristic_tree_decomposition(hp.host, strategy)
    ell = partition_layered_width(g, hp, l)
    return KLPartition(hp, l, width(witness), ell, witness)


def singleton_klpartition(
    g: Graph, l: Layering, td: TreeDecomposition | None = None
) -> KLPartition:
    if td is None:
        td = heuristic_tree_decomposition(g)
    hp = HPartition.make(g, ([v] for v in range(g.n)))
    return KLPartition(hp, l, width(td), 1 if g.n else 0, td)


def layered_td_from_partition(g: Graph, klp: KLPartition) -> LayeredTreeDecomposition:
    """Replace each host vertex in each witness bag by its part."""
    _require(validate_kl_partition(g, klp), "(k, l)-partition")
    bags = [[v for x in bag for v in klp.hp.parts[x]] for bag in klp.witness.bags]
    td = TreeDecomposition(klp.witness.tree, tuple(tuple(sorted(b)) for b in bags))
    _require(validate_tree_decomposition(g, td), "substituted decomposition")
    return LayeredTreeDecomposition(td, klp.layering, _intersection_width(td.bags, klp.layering, g.n))


def power_bound(k: int, delta: int, p: int) -> int | None:
    """Strict upper bound ``2 p k D^(p // 2)`` on the layered width of the power; None if D < 2."""
    if delta < 2:
        return None
    return 2 * p * k * delta ** (p // 2)


def power_layered_decomposition(
    g: Graph, td: TreeDecomposition, l: Layering, p: int
) -> tuple[Graph, LayeredTreeDecomposition]:
    """Decomposition of ``g^p``: each bag grows to the radius-``p//2`` balls of its
    vertices, over the layering that merges ``p`` consecutive layers.
    """
    if p < 1:
        raise GraphError("power must be at least 1")
    layered_width_of_decomposition(g, td, l)
    gp = graph_power(g, p)
    radius = p // 2
    balls = [sorted(bfs_distances(g, v, cutoff=radius)) for v in range(g.n)]
    bags = [tuple(sorted({w for v in bag for w in balls[v]})) for bag in td.bags]
    new_td = TreeDecomposition(td.tree, tuple(bags))
    coarse = coarsen_layering(l, p)
    _require(validate_tree_decomposition(gp, new_td), "power decomposition")
    _require(validate_layering(gp, coarse), "coarsened layering")
    return gp, LayeredTreeDecomposition(new_td, coarse, _intersection_width(bags, coarse, g.n))


def drop_apices(g: Graph, apices: Iterable[int], klp_of_rest: KLPartition) -> KLPartition:
    """Extend a (k, l)-partition of ``g - A`` to a (k+1, 2 l D_A |A|)-partition of ``g``.

    ``klp_of_rest`` uses the ids of ``induced_subgraph(g, V - A)``, i.e. the
    non-apex vertices renumbered in increasing order. The result uses ``g``'s ids.
    Layers are regrouped by distance to the nearest layer holding a neighbour of
    ``A``; ``A`` joins layer 0 as one new part adjacent to every host vertex.
    """
    a = sorted(set(apices))
    if not a:
        return klp_of_rest
    a_set = set(a)
    rest, old = induced_subgraph(g, [v for v in range(g.n) if v not in a_set])
    _require(validate_kl_partition(rest, klp_of_rest), "(k, l)-partition of g - A")
    new_id = {v: i for i, v in enumerate(old)}
    rest_layer = klp_of_rest.layering.index_of(rest.n)
    hits = {rest_layer[new_id[w]] for v in a for w in g.adj[v] if w not in a_set}
    if hits:
        collapsed, _ = distance_collapse(klp_of_rest.layering, hits)
    else:
        collapsed = klp_of_rest.layering
    layers = [[old[v] for v in layer] for layer in collapsed.layers] or [[]]
    layers[0].extend(a)
    host = klp_of_rest.hp.host
    h = host.n
    new_host = Graph.from_edges(h + 1, host.edges() + [(x, h) for x in range(h)])
    parts = [[old[v] for v in part] for part in klp_of_rest.hp.parts] + [a]
    bags = [bag + (h,) for bag in klp_of_rest.witness.bags] or [(h,)]
    witness = TreeDecomposition(klp_of_rest.witness.tree if klp_of_rest.witness.bags else Graph.empty(1), tuple(bags))
    delta_a = max(max((g.degree(v) for v in a), default=0), 1)
    return KLPartition(
        HPartition.make(new_host, parts),
        Layering.from_sets(layers),
        klp_of_rest.k + 1,
        2 * klp_of_rest.ell * delta_a * len(a),
        witness,
    )


@dataclass
class ProductEmbedding:
    """``mapping[v] = (host vertex, layer, copy)``; ``failures`` lists edges not realised."""

    mapping: list[tuple[int, int, int]]
    edge_ok: list[tuple[tuple[int, int], bool]] = field(default_factory=list)

    @property
    def failures(self) -> list[tuple[int, int]]:
        return [e for e, ok in self.edge_ok if not ok]

    @property
    def ok(self) -> bool:
        return len(set(self.mapping)) == len(self.mapping) and not self.failures


def _copy_indices(hp: HPartition, l: Layering, n: int) -> tuple[list[int], list[int]]:
    owner = hp.owner(n)
    layer = l.index_of(n)
    counter: dict[tuple[int, int], int] = {}
    copy = [0] * n
    for v in range(n):
        key = (owner[v], layer[v])
        copy[v] = counter.get(key, 0)
        counter[key] = copy[v] + 1
    return owner, copy


def embed_in_product(g: Graph, klp: KLPartition) -> ProductEmbedding:
    """Map ``g`` into ``host x path x K_l`` and check every edge against the strong-product rule."""
    owner, copy = _copy_indices(klp.hp, klp.layering, g.n)
    layer = klp.layering.index_of(g.n)
    if any(c >= klp.ell for c in copy):
        raise GraphError(f"a part has more than l={klp.ell} vertices in one layer")
    emb = ProductEmbedding([(owner[v], layer[v], copy[v]) for v in range(g.n)])
    host = klp.hp.host
    for u, v in g.edges():
        (x, i, _), (y, j, _) = emb.mapping[u], emb.mapping[v]
        host_ok = x >= 0 and y >= 0 and (x == y or host.has_edge(x, y))
        ok = host_ok and i >= 0 and j >= 0 and abs(i - j) <= 1
        emb.edge_ok.append(((u, v), ok))
    return emb


def partition_from_embedding(emb: ProductEmbedding, host_n: int) -> list[list[int]]:
    parts: list[list[int]] = [[] for _ in range(host_n)]
    for v, (x, _, _) in enumerate(emb.mapping):
        parts[x].append(v)
    return parts


def make_width_one(klp: KLPartition, g: Graph | None = None) -> KLPartition:
    """Split every part by copy index: host becomes ``host x K_l`` on the used
    (host vertex, copy) pairs and every new part meets each layer at most once.
    """
    n = sum(len(p) for p in klp.hp.parts)
    if g is not None:
        _require(validate_kl_partition(g, klp), "(k, l)-partition")
    owner, copy = _copy_indices(klp.hp, klp.layering, n)
    used = sorted({(owner[v], copy[v]) for v in range(n)})
    ident = {pair: i for i, pair in enumerate(used)}
    parts: list[list[int]] = [[] for _ in used]
    for v in range(n):
        parts[ident[(owner[v], copy[v])]].append(v)
    host = klp.hp.host
    edges = [
        (i, j)
        for i, (x, _) in enumerate(used)
        for j, (y, _) in enumerate(used)
        if i < j and (x == y or host.has_edge(x, y))
    ]
    by_host: dict[int, list[int]] = {}
    for i, (x, _) in enumerate(used):
        by_host.setdefault(x, []).append(i)
    bags = [tuple(i for x in bag for i in by_host.get(x, ())) for bag in klp.witness.bags]
    witness = TreeDecomposition(klp.witness.tree, tuple(tuple(sorted(b)) for b in bags))
    out = KLPartition(
        HPartition.make(Graph.from_edges(len(used), edges), parts),
        klp.layering,
        (klp.k + 1) * klp.ell - 1,
        1 if n else 0,
        witness,
    )
    if g is not None:
        _require(validate_kl_partition(g, out), "width-one partition")
    return out


def friendliness_check(
    g: Graph,
    klp: KLPartition,
    clique: Iterable[int],
    c0: Iterable[int],
    c1: Iterable[int],
    prescribed_parts: Sequence[Iterable[int]],
) -> tuple[bool, Validation]:
    """Are the prescribed parts parts of ``klp`` with ``c0`` in layer 0 and ``c1`` in layer 1?"""
    cl = sorted(set(clique))
    for i, u in enumerate(cl):
        for v in cl[i + 1 :]:
            if not g.has_edge(u, v):
                raise GraphError(f"{u} and {v} are not adjacent; not a clique")
    s0, s1 = set(c0), set(c1)
    if s0 & s1 or s0 | s1 != set(cl):
        raise GraphError("c0, c1 must partition the clique")
    pres = [frozenset(p) for p in prescribed_parts]
    if sum(len(p) for p in pres) != len(cl) or set().union(*pres) != set(cl) or any(not p for p in pres):
        raise GraphError("prescribed parts must partition the clique")
    report = Validation()
    existing = {frozenset(p) for p in klp.hp.parts}
    for p in pres:
        if p not in existing:
            report.add("not-a-part", sorted(p))
    layer0, layer1 = set(klp.layering[0]), set(klp.layering[1])
    for v in sorted(s0 - layer0):
        report.add("c0-outside-layer-0", v)
    for v in sorted(s1 - layer1):
        report.add("c1-outside-layer-1", v)
    return report.ok, report


def max_apex_degree(g: Graph, apices: Iterable[int]) -> int:
    return max((g.degree(v) for v in apices), default=0)

