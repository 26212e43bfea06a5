import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clustercol.colouring import (
    BLUE,
    Colouring,
    monochromatic_components,
    three_colour_appendix,
    three_colour_main,
    three_colour_pipeline,
    tree_parity,
    two_colour_bounded,
    verify_clustering,
)
from clustercol.generators import gen_banded, gen_grid, gen_triangulated_grid
from clustercol.graph import Graph, GraphError, max_degree
from clustercol.layering import Layering, bfs_layering, bfs_layering_multi
from clustercol.treewidth import (
    TreePartition,
    exact_treewidth,
    heuristic_tree_decomposition,
    tree_partition_bounded,
    width,
)

from strategies import complete, connected_graphs, cycle, graphs, layered_graphs, path, star


def union_find_sizes(g: Graph, colours) -> list[int]:
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in g.edges():
        if colours[u] == colours[v]:
            parent[find(u)] = find(v)
    sizes: dict[int, int] = {}
    for v in range(g.n):
        r = find(v)
        sizes[r] = sizes.get(r, 0) + 1
    return sorted(sizes.values())


class TestColouring:
    def test_palette_enforced(self):
        with pytest.raises(ValueError):
            Colouring((0, 3), 2)

    def test_of_infers_palette(self):
        assert Colouring.of([0, 2, 1]).palette == 3


class TestMonochromatic:
    def test_one_colour(self):
        comps = monochromatic_components(cycle(5), Colouring.of([0] * 5))
        assert comps == [(0, [0, 1, 2, 3, 4])]

    def test_proper(self):
        comps = monochromatic_components(path(4), Colouring.of([0, 1, 0, 1]))
        assert all(len(c) == 1 for _, c in comps)

    def test_triangle(self):
        comps = monochromatic_components(complete(3), Colouring.of([0, 0, 1]))
        assert comps == [(0, [0, 1]), (1, [2])]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            monochromatic_components(path(3), Colouring.of([0, 1]))


class TestVerify:
    def test_proper_tree(self):
        cert = verify_clustering(path(6), Colouring.of([0, 1] * 3), 2, 1)
        assert cert.ok

    def test_oversized(self):
        cert = verify_clustering(path(5), Colouring.of([0] * 5), 2, 4)
        assert not cert.ok
        assert cert.offending == [0, 1, 2, 3, 4]
        assert cert.max_component == 5

    def test_too_many_colours(self):
        cert = verify_clustering(path(3), Colouring.of([0, 1, 2]), 2, 5)
        assert not cert.ok and not cert.checks["palette"]

    @settings(max_examples=100)
    @given(graphs(max_n=20), st.data())
    def test_agrees_with_union_find(self, g, data):
        colours = data.draw(st.lists(st.integers(0, 2), min_size=g.n, max_size=g.n))
        cert = verify_clustering(g, Colouring.of(colours, 3))
        assert sorted(len(c) for _, c in cert.components) == union_find_sizes(g, colours)
        assert cert.max_component == max(union_find_sizes(g, colours), default=0)
        for colour, comp in cert.components:
            assert all(colours[v] == colour for v in comp)


class TestTwoColour:
    def test_single_edge(self):
        tp = TreePartition.make([(0, 1)], [[0], [1]])
        col, cert = two_colour_bounded(path(2), tp)
        assert col.colours[0] != col.colours[1]
        assert cert.max_component == 1

    def test_star(self):
        g = star(5)
        tp = TreePartition.make([(0, i) for i in range(1, 6)], [[0]] + [[i] for i in range(1, 6)])
        col, cert = two_colour_bounded(g, tp)
        assert cert.ok and cert.max_component == 1

    def test_pairs_on_path(self):
        g = path(10)
        tp = TreePartition.make([(i, i + 1) for i in range(4)], [[2 * i, 2 * i + 1] for i in range(5)])
        col, cert = two_colour_bounded(g, tp)
        assert verify_clustering(g, col, 2, 2).ok
        assert cert.max_component <= 2

    def test_invalid_partition(self):
        tp = TreePartition.make([(0, 1), (1, 2)], [[0], [1], [2]])
        with pytest.raises(GraphError):
            two_colour_bounded(Graph.from_edges(3, [(0, 2)]), tp)

    def test_parity_per_component(self):
        tp = TreePartition.make([(0, 1), (2, 3)], [[0], [1], [2], [3]])
        assert tree_parity(tp) == [0, 1, 0, 1]

    @settings(max_examples=60)
    @given(graphs(max_n=40, max_degree=5))
    def test_components_inside_parts(self, g):
        td = heuristic_tree_decomposition(g)
        tp = tree_partition_bounded(g, td)
        col, cert = two_colour_bounded(g, tp)
        assert cert.checks["within_parts"]
        assert col.used() <= 2
        assert verify_clustering(g, col, 2, tp.width).ok
        k, d = width(td) + 1, max(max_degree(g), 1)
        assert cert.max_component <= 20 * k * d


def check_three(g: Graph, col: Colouring, cert) -> None:
    assert cert.ok, cert.checks
    fresh = verify_clustering(g, col, 3, cert.budget)
    assert fresh.ok
    assert cert.budget == 8000 * cert.k**3 * max(cert.delta, 1) ** 2
    f = cert.factors
    assert f["product"] == max(f["first"], 1) * max(f["second"], 1)
    assert cert.max_component <= f["product"]


class TestThreeColour:
    @pytest.mark.parametrize("fn", [three_colour_main, three_colour_appendix])
    def test_empty(self, fn):
        col, cert = fn(Graph.empty(), Layering(()))
        assert col.colours == () and cert.ok

    def test_single_band_main(self):
        # A path laid out in 5 layers: after the shift these are layers 5..9,
        # which sit in the seam region of i = 0 and the band G_1.
        g = path(5)
        col, cert = three_colour_main(g, bfs_layering(g, 0))
        check_three(g, col, cert)

    def test_two_layer_appendix(self):
        # Layers 0..2 map to shifted 5..7, all non-multiples of 8.
        g, l = gen_banded(3, 6, 2, 1, seed=3)
        col, cert = three_colour_appendix(g, l)
        check_three(g, col, cert)
        assert cert.max_component <= cert.factors["first"]

    @pytest.mark.parametrize("fn", [three_colour_main, three_colour_appendix])
    def test_grid_20(self, fn):
        g = gen_grid(20, 20)
        col, cert = fn(g, bfs_layering(g, 0))
        check_three(g, col, cert)
        assert cert.delta == 4

    def test_appendix_blue_and_containment(self):
        g = gen_triangulated_grid(25, 25)
        col, cert = three_colour_appendix(g, bfs_layering(g, 0))
        check_three(g, col, cert)
        assert cert.per_colour_max.get(BLUE, 0) <= cert.factors["first"]
        for item in cert.details["large_components"]:
            lo, hi = item["layers"]
            c = 8 * item["window"]
            assert item["colour"] != BLUE and c - 3 <= lo and hi <= c + 3

    def test_main_components_within_seams(self):
        g = gen_triangulated_grid(20, 20)
        col, cert = three_colour_main(g, bfs_layering(g, 0))
        assert cert.checks["within_seam_regions"]

    def test_invalid_layering(self):
        with pytest.raises(GraphError):
            three_colour_main(path(3), Layering.from_sets([[0], [2], [1]]))

    def test_injected_exact_decomposer(self):
        g = gen_grid(4, 3)
        col, cert = three_colour_appendix(g, bfs_layering(g, 0), lambda h: exact_treewidth(h)[1])
        check_three(g, col, cert)

    @pytest.mark.parametrize("variant", ["main", "appendix"])
    def test_pipeline(self, variant):
        col, cert = three_colour_pipeline(Graph.empty(1), variant)
        assert col.colours in ((0,), (1,), (2,)) and cert.ok
        col, cert = three_colour_pipeline(cycle(20), variant)
        check_three(cycle(20), col, cert)
        g = gen_triangulated_grid(15, 15)
        col, cert = three_colour_pipeline(g, variant)
        check_three(g, col, cert)
        assert cert.delta == 6

    def test_pipeline_unknown_variant(self):
        with pytest.raises(ValueError):
            three_colour_pipeline(path(3), "other")

    @settings(max_examples=40, deadline=None)
    @given(layered_graphs(max_layers=30, max_per_layer=5), st.sampled_from(["main", "appendix"]))
    def test_random_layered(self, gl, variant):
        g, l = gl
        fn = three_colour_main if variant == "main" else three_colour_appendix
        col, cert = fn(g, l)
        check_three(g, col, cert)
        if variant == "main":
            assert cert.checks["within_seam_regions"]
        else:
            assert cert.checks["band_containment"]

    @settings(max_examples=25, deadline=None)
    @given(connected_graphs(max_n=60, max_degree=4), st.sampled_from(["main", "appendix"]))
    def test_random_connected(self, g, variant):
        col, cert = three_colour_pipeline(g, variant)
        check_three(g, col, cert)

    def test_deterministic(self):
        g = gen_triangulated_grid(12, 12)
        l = bfs_layering_multi(g)
        for fn in (three_colour_main, three_colour_appendix):
            a, ca = fn(g, l)
            b, cb = fn(g, l)
            assert a == b and ca.to_json() == cb.to_json()
