import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clustercol.generators import GeneratorSpec, gen_apexed, gen_banded, gen_grid
from clustercol.graph import Graph, GraphError, graph_power, induced_subgraph, max_degree
from clustercol.layered import (
    HPartition,
    KLPartition,
    drop_apices,
    embed_in_product,
    friendliness_check,
    klpartition_from_parts,
    layered_td_from_partition,
    layered_width_of_decomposition,
    make_width_one,
    partition_from_embedding,
    partition_layered_width,
    power_bound,
    power_layered_decomposition,
    singleton_klpartition,
    validate_h_partition,
    validate_kl_partition,
)
from clustercol.layering import Layering, bfs_layering, bfs_layering_multi, validate_layering
from clustercol.treewidth import (
    TreeDecomposition,
    heuristic_tree_decomposition,
    validate_tree_decomposition,
    width,
)

from strategies import complete, connected_graphs, cycle, layered_graphs, path


def singletons(n: int) -> Layering:
    return Layering.from_sets([v] for v in range(n))


def pair_bags(n: int) -> TreeDecomposition:
    return TreeDecomposition.make([(i, i + 1) for i in range(n - 2)], [[i, i + 1] for i in range(n - 1)])


def one_part(g: Graph, l: Layering) -> KLPartition:
    host = Graph.empty(1)
    hp = HPartition.make(host, [range(g.n)])
    return KLPartition(hp, l, 0, partition_layered_width(g, hp, l), TreeDecomposition.make([], [[0]]))


@st.composite
def random_klps(draw, max_layers: int = 8, max_per_layer: int = 5):
    """A layered graph with a random partition into connected-or-not groups."""
    g, l = draw(layered_graphs(max_layers, max_per_layer))
    labels = draw(st.lists(st.integers(0, max(g.n // 2, 0)), min_size=g.n, max_size=g.n))
    groups: dict[int, list[int]] = {}
    for v, lab in enumerate(labels):
        groups.setdefault(lab, []).append(v)
    parts = [groups[k] for k in sorted(groups)]
    return g, klpartition_from_parts(g, parts, l)


class TestLayeredWidth:
    def test_singleton_bags(self):
        td = TreeDecomposition.make([(0, 1), (1, 2)], [[0], [1], [2]])
        assert layered_width_of_decomposition(Graph.empty(3), td, singletons(3)) == 1

    def test_one_layer(self):
        g = cycle(6)
        td = heuristic_tree_decomposition(g)
        one = Layering.from_sets([range(6)])
        assert layered_width_of_decomposition(g, td, one) == width(td) + 1

    def test_path_pairs(self):
        assert layered_width_of_decomposition(path(6), pair_bags(6), singletons(6)) == 1

    def test_invalid_inputs(self):
        with pytest.raises(GraphError):
            layered_width_of_decomposition(path(3), pair_bags(3), Layering.from_sets([[0], [2], [1]]))


class TestHPartition:
    def test_one_part(self):
        hp = HPartition.make(Graph.empty(1), [range(5)])
        assert validate_h_partition(cycle(5), hp).ok

    def test_singletons(self):
        g = cycle(5)
        assert validate_h_partition(g, HPartition.make(g, ([v] for v in range(5)))).ok

    def test_non_adjacent_parts(self):
        hp = HPartition.make(Graph.empty(2), [[0], [1]])
        report = validate_h_partition(path(2), hp)
        assert not report.ok
        assert report.violations[0][0] == "edge"

    def test_empty_part(self):
        hp = HPartition.make(Graph.empty(2), [[0, 1], []])
        assert not validate_h_partition(Graph.empty(2), hp).ok

    def test_partition_layered_width(self):
        g = path(4)
        assert partition_layered_width(g, HPartition.make(g, ([v] for v in range(4))), singletons(4)) == 1
        assert partition_layered_width(g, HPartition.make(Graph.empty(1), [range(4)]), singletons(4)) == 1
        one = Layering.from_sets([range(4)])
        assert partition_layered_width(g, HPartition.make(Graph.empty(1), [range(4)]), one) == 4


class TestLayeredTdFromPartition:
    def test_singleton_identity(self):
        g = gen_grid(4, 4)
        l = bfs_layering(g, 0)
        td = heuristic_tree_decomposition(g)
        ltd = layered_td_from_partition(g, singleton_klpartition(g, l, td))
        assert ltd.layered_width == layered_width_of_decomposition(g, td, l)

    def test_one_part(self):
        g = cycle(6)
        l = bfs_layering(g, 0)
        ltd = layered_td_from_partition(g, one_part(g, l))
        assert ltd.td.bags == (tuple(range(6)),)
        assert ltd.layered_width == max(l.sizes())

    def test_path_pairs(self):
        g = path(8)
        klp = klpartition_from_parts(g, [[2 * i, 2 * i + 1] for i in range(4)], singletons(8))
        assert (klp.k, klp.ell) == (1, 1)
        ltd = layered_td_from_partition(g, klp)
        assert validate_tree_decomposition(g, ltd.td).ok
        assert ltd.layered_width <= 2

    @settings(max_examples=60)
    @given(random_klps())
    def test_bound(self, gk):
        g, klp = gk
        ltd = layered_td_from_partition(g, klp)
        assert validate_tree_decomposition(g, ltd.td).ok
        assert ltd.layered_width <= (klp.k + 1) * klp.ell


class TestPower:
    def test_identity(self):
        g = cycle(6)
        td = heuristic_tree_decomposition(g)
        l = bfs_layering(g, 0)
        gp, ltd = power_layered_decomposition(g, td, l, 1)
        assert gp == g and ltd.td.bags == td.bags and ltd.layering == l

    def test_single_vertex(self):
        g = Graph.empty(1)
        gp, ltd = power_layered_decomposition(g, TreeDecomposition.make([], [[0]]), singletons(1), 3)
        assert gp == g and ltd.layered_width == 1

    def test_path_squared(self):
        g = path(6)
        gp, ltd = power_layered_decomposition(g, pair_bags(6), singletons(6), 2)
        assert validate_tree_decomposition(gp, ltd.td).ok
        assert power_bound(1, 2, 2) == 8
        assert ltd.layered_width < 8
        assert ltd.layered_width == 2

    def test_zero(self):
        with pytest.raises(GraphError):
            power_layered_decomposition(path(3), pair_bags(3), singletons(3), 0)

    def test_bound_formula(self):
        assert power_bound(2, 3, 3) == 2 * 3 * 2 * 3
        assert power_bound(1, 1, 2) is None

    @settings(max_examples=60, deadline=None)
    @given(connected_graphs(max_n=40, max_degree=4), st.integers(1, 3))
    def test_bfs_and_heuristic_inputs(self, g, p):
        l = bfs_layering(g, 0)
        td = heuristic_tree_decomposition(g)
        k = layered_width_of_decomposition(g, td, l)
        gp, ltd = power_layered_decomposition(g, td, l, p)
        assert gp == graph_power(g, p)
        assert validate_tree_decomposition(gp, ltd.td).ok
        assert validate_layering(gp, ltd.layering).ok
        bound = power_bound(k, max_degree(g), p)
        if bound is not None:
            assert ltd.layered_width < bound

    def test_adversarial_bag_exceeds_bound(self):
        """Bag-wise ball growth is not enough for every decomposition.

        Four stars whose centres share one bag: that bag's balls cover all 20
        vertices, 18 of which fall in one coarsened layer, above 2*p*k*D = 16.
        """
        centres = [0, 1, 2, 3]
        leaf_layer = {0: 2, 1: 3, 2: 2, 3: 3}
        layers: list[list[int]] = [[], [0], [1], [2], [3], []]
        edges, leaf_bags = [], []
        nxt = 4
        for c in centres:
            for _ in range(4):
                edges.append((c, nxt))
                layers[leaf_layer[c]].append(nxt)
                leaf_bags.append([c, nxt])
                nxt += 1
        g = Graph.from_edges(nxt, edges)
        l = Layering.from_sets(layers)
        td = TreeDecomposition.make([(0, i) for i in range(1, 17)], [centres] + leaf_bags)
        assert validate_layering(g, l).ok and validate_tree_decomposition(g, td).ok
        k = layered_width_of_decomposition(g, td, l)
        assert (k, max_degree(g)) == (1, 4)
        gp, ltd = power_layered_decomposition(g, td, l, 2)
        assert validate_tree_decomposition(gp, ltd.td).ok
        assert power_bound(k, 4, 2) == 16
        assert ltd.layered_width == 18


class TestDropApices:
    def test_no_apices(self):
        g = path(6)
        klp = singleton_klpartition(g, singletons(6), pair_bags(6))
        assert drop_apices(g, [], klp) is klp

    def test_path_with_apex(self):
        g = Graph.from_edges(7, [(i, i + 1) for i in range(5)] + [(2, 6), (5, 6)])
        rest, _ = induced_subgraph(g, range(6))
        klp = singleton_klpartition(rest, singletons(6), pair_bags(6))
        assert (klp.k, klp.ell) == (1, 1)
        out = drop_apices(g, [6], klp)
        assert out.layering.layers == ((2, 5, 6), (1, 3, 4), (0,))
        assert validate_kl_partition(g, out).ok
        assert out.k == 2 and width(out.witness) <= 2
        assert out.ell == 4
        assert partition_layered_width(g, out.hp, out.layering) == 1

    def test_apex_on_whole_layer(self):
        base = gen_grid(4, 4)
        l = bfs_layering(base, 0)
        target = list(l[3])
        g = Graph.from_edges(17, base.edges() + [(v, 16) for v in target])
        out = drop_apices(g, [16], singleton_klpartition(base, l))
        assert validate_kl_partition(g, out).ok
        assert set(target) | {16} <= set(out.layering[0])

    def test_requires_valid_rest(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        bad = singleton_klpartition(path(2), Layering.from_sets([[0], [], [1]]))
        with pytest.raises(GraphError):
            drop_apices(g, [2], bad)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 6), st.booleans())
    def test_random_apexed(self, seed, count, degree, banded):
        spec = GeneratorSpec("banded", (6, 5, 2, 1), seed) if banded else GeneratorSpec("grid", (5, 6), seed)
        g, apices = gen_apexed(spec, count, degree, seed)
        rest, _ = induced_subgraph(g, [v for v in range(g.n) if v not in apices])
        klp = singleton_klpartition(rest, bfs_layering_multi(rest))
        out = drop_apices(g, apices, klp)
        assert validate_kl_partition(g, out).ok
        assert width(out.witness) <= klp.k + 1
        delta_a = max(g.degree(a) for a in apices)
        assert partition_layered_width(g, out.hp, out.layering) <= 2 * klp.ell * delta_a * len(apices)
        layer0 = set(out.layering[0])
        assert all(w in layer0 for a in apices for w in g.adj[a])


class TestEmbedding:
    def test_singletons(self):
        g = path(5)
        emb = embed_in_product(g, singleton_klpartition(g, singletons(5), pair_bags(5)))
        assert emb.ok and len(set(emb.mapping)) == 5

    def test_one_part(self):
        g = gen_grid(3, 4)
        emb = embed_in_product(g, one_part(g, bfs_layering(g, 0)))
        assert emb.ok

    def test_corrupt_host(self):
        g = path(3)
        hp = HPartition.make(Graph.from_edges(3, [(0, 1)]), [[0], [1], [2]])
        klp = KLPartition(hp, singletons(3), 1, 1, TreeDecomposition.make([(0, 1)], [[0, 1], [2]]))
        emb = embed_in_product(g, klp)
        assert not emb.ok and emb.failures == [(1, 2)]

    def test_overflow(self):
        g = Graph.empty(2)
        hp = HPartition.make(Graph.empty(1), [[0, 1]])
        klp = KLPartition(hp, Layering.from_sets([[0, 1]]), 0, 1, TreeDecomposition.make([], [[0]]))
        with pytest.raises(GraphError):
            embed_in_product(g, klp)

    @settings(max_examples=60)
    @given(random_klps())
    def test_round_trip(self, gk):
        g, klp = gk
        emb = embed_in_product(g, klp)
        assert emb.ok
        parts = partition_from_embedding(emb, klp.hp.host.n)
        assert tuple(tuple(p) for p in parts) == klp.hp.parts


class TestWidthOne:
    def test_ell_one_keeps_host(self):
        g = path(6)
        klp = singleton_klpartition(g, singletons(6), pair_bags(6))
        out = make_width_one(klp, g)
        assert out.hp.host == klp.hp.host and out.hp.parts == klp.hp.parts

    def test_two_copies(self):
        g = Graph.from_edges(2, [(0, 1)])
        klp = one_part(g, Layering.from_sets([[0, 1]]))
        assert (klp.k, klp.ell) == (0, 2)
        out = make_width_one(klp, g)
        assert out.hp.host.n == 2 and width(out.witness) <= 1
        assert partition_layered_width(g, out.hp, out.layering) == 1

    @settings(max_examples=60)
    @given(random_klps())
    def test_random(self, gk):
        g, klp = gk
        out = make_width_one(klp, g)
        assert validate_h_partition(g, out.hp).ok
        assert validate_kl_partition(g, out).ok
        assert partition_layered_width(g, out.hp, out.layering) <= 1
        assert width(out.witness) <= (klp.k + 1) * klp.ell - 1 or g.n == 0
        assert embed_in_product(g, out).ok


class TestFriendliness:
    def setup_method(self):
        self.g = complete(3)
        self.l = Layering.from_sets([[0, 1], [2]])
        self.klp = klpartition_from_parts(self.g, [[0], [1, 2]], self.l)

    def test_empty_clique(self):
        ok, _ = friendliness_check(self.g, self.klp, [], [], [], [])
        assert ok

    def test_singleton(self):
        ok, _ = friendliness_check(self.g, self.klp, [0], [0], [], [[0]])
        assert ok
        ok, report = friendliness_check(self.g, self.klp, [1], [1], [], [[1]])
        assert not ok and report.violations == [("not-a-part", [1])]

    def test_c1_outside_layer_one(self):
        ok, report = friendliness_check(self.g, self.klp, [1, 2], [2], [1], [[1, 2]])
        assert not ok
        assert ("c1-outside-layer-1", 1) in report.violations

    def test_not_a_clique(self):
        with pytest.raises(GraphError):
            friendliness_check(path(3), singleton_klpartition(path(3), singletons(3)), [0, 2], [0], [2], [[0], [2]])

    def test_malformed_split(self):
        with pytest.raises(GraphError):
            friendliness_check(self.g, self.klp, [0, 1], [0], [], [[0], [1]])
