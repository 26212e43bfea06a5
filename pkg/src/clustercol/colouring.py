"""Clustered colourings: the verifier, 2-colouring from a tree-partition, and the
two banded 3-colouring constructions driven by a layering.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .graph import Graph, GraphError, components_within, contract_components, induced_subgraph, max_degree
from .layering import Layering, band, bfs_layering_multi, shift_layering, validate_layering
from .treewidth import (
    PARTITION_CONSTANT,
    TreeDecomposition,
    TreePartition,
    heuristic_tree_decomposition,
    map_decomposition,
    tree_partition_bounded,
    validate_tree_decomposition,
    validate_tree_partition,
    width,
)

Decomposer = Callable[[Graph], TreeDecomposition]

SHIFT = 5
MAIN_BAND = 11
APPENDIX_BAND = 7
BLUE, RED, GREEN = 0, 1, 2


def default_decomposer(g: Graph) -> TreeDecomposition:
    return heuristic_tree_decomposition(g, "min-degree")


@dataclass(frozen=True)
class Colouring:
    colours: tuple[int, ...]
    palette: int

    def __post_init__(self) -> None:
        for c in self.colours:
            if not 0 <= c < self.palette:
                raise ValueError(f"colour {c} outside palette of size {self.palette}")

    @classmethod
    def of(cls, colours: Sequence[int], palette: int | None = None) -> "Colouring":
        colours = tuple(colours)
        if palette is None:
            palette = max(colours, default=-1) + 1
        return cls(colours, palette)

    def used(self) -> int:
        return len(set(self.colours))


@dataclass
class ClusterCertificate:
    """Measured monochromatic components of a colouring plus the bounds it was held to."""

    components: list[tuple[int, list[int]]]
    max_component: int
    per_colour_max: dict[int, int]
    colours_used: int
    max_colours: int | None = None
    bound: int | None = None
    offending: list[int] | None = None
    ok: bool = True
    k: int | None = None
    delta: int | None = None
    budget: int | None = None
    band_widths: list[int] = field(default_factory=list)
    factors: dict[str, Any] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "max_component": self.max_component,
            "per_colour_max": {str(c): m for c, m in sorted(self.per_colour_max.items())},
            "colours_used": self.colours_used,
            "max_colours": self.max_colours,
            "bound": self.bound,
            "offending": self.offending,
            "k": self.k,
            "delta": self.delta,
            "budget": self.budget,
            "band_widths": self.band_widths,
            "factors": self.factors,
            "checks": self.checks,
            **self.details,
        }


def monochromatic_components(g: Graph, c: Colouring) -> list[tuple[int, list[int]]]:
    """Components of every colour class, ordered by their smallest vertex."""
    if len(c.colours) != g.n:
        raise ValueError(f"colouring has {len(c.colours)} entries for {g.n} vertices")
    classes: dict[int, list[int]] = {}
    for v, col in enumerate(c.colours):
        classes.setdefault(col, []).append(v)
    out = [(col, comp) for col, vs in classes.items() for comp in components_within(g, vs)]
    out.sort(key=lambda item: item[1][0])
    return out


def verify_clustering(
    g: Graph, c: Colouring, max_colours: int | None = None, bound: int | None = None
) -> ClusterCertificate:
    comps = monochromatic_components(g, c)
    per_colour: dict[int, int] = {}
    for col, comp in comps:
        per_colour[col] = max(per_colour.get(col, 0), len(comp))
    biggest = max(comps, key=lambda item: (len(item[1]), -item[1][0]), default=None)
    cert = ClusterCertificate(
        components=comps,
        max_component=len(biggest[1]) if biggest else 0,
        per_colour_max=per_colour,
        colours_used=len(per_colour),
        max_colours=max_colours,
        bound=bound,
    )
    if max_colours is not None:
        cert.checks["palette"] = cert.colours_used <= max_colours
    if bound is not None:
        cert.checks["bound"] = cert.max_component <= bound
        if biggest and len(biggest[1]) > bound:
            cert.offending = biggest[1]
    cert.ok = all(cert.checks.values())
    return cert


def _recheck(cert: ClusterCertificate, g: Graph, col: Colouring, max_colours: int) -> ClusterCertificate:
    """Run the independent verifier and carry over construction data."""
    fresh = verify_clustering(g, col, max_colours, cert.budget)
    for key, value in cert.checks.items():
        fresh.checks.setdefault(key, value)
    fresh.k, fresh.delta, fresh.budget = cert.k, cert.delta, cert.budget
    fresh.band_widths = cert.band_widths
    fresh.factors = cert.factors
    fresh.details = cert.details
    fresh.ok = all(fresh.checks.values())
    return fresh


def tree_parity(tp: TreePartition) -> list[int]:
    """Proper 2-colouring of the index forest, each component rooted at its smallest node."""
    side = [-1] * tp.tree.n
    for r in range(tp.tree.n):
        if side[r] >= 0:
            continue
        side[r] = 0
        stack = [r]
        while stack:
            x = stack.pop()
            for y in tp.tree.adj[x]:
                if side[y] < 0:
                    side[y] = 1 - side[x]
                    stack.append(y)
    return side


def _parity_colours(n: int, tp: TreePartition) -> list[int]:
    side = tree_parity(tp)
    out = [0] * n
    for x, part in enumerate(tp.parts):
        for v in part:
            out[v] = side[x]
    return out


def two_colour_bounded(g: Graph, tp: TreePartition) -> tuple[Colouring, ClusterCertificate]:
    """Colour each vertex by the side of its part's tree node; clustering <= width(tp)."""
    report = validate_tree_partition(g, tp)
    if not report.ok:
        raise GraphError(f"invalid tree-partition: {report.summary()}")
    col = Colouring.of(_parity_colours(g.n, tp), palette=2)
    cert = verify_clustering(g, col, 2, tp.width)
    owner = {v: x for x, part in enumerate(tp.parts) for v in part}
    cert.checks["within_parts"] = all(len({owner[v] for v in comp}) == 1 for _, comp in cert.components)
    cert.factors = {"partition_width": tp.width, "partition_budget": tp.budget}
    cert.ok = all(cert.checks.values())
    return col, cert


# --- shared machinery for the banded constructions ---------------------------


class _BandRun:
    """Bookkeeping shared by both banded constructions on a shifted layering."""

    def __init__(self, g: Graph, layering: Layering, decomposer: Decomposer):
        report = validate_layering(g, layering)
        if not report.ok:
            raise GraphError(f"invalid layering: {report.summary()}")
        self.g = g
        self.lay = shift_layering(layering, SHIFT)
        self.layer_of = self.lay.index_of(g.n)
        self.decomposer = decomposer
        self.band_widths: list[int] = []
        self.colour = [-1] * g.n

    def layer_set(self, *indices: int) -> list[int]:
        return [v for i in indices for v in self.lay[i]]

    def decompose_band(self, start: int, size: int) -> tuple[list[int], TreeDecomposition] | None:
        verts = band(self.lay, start, size)
        if not verts:
            return None
        bg, old = induced_subgraph(self.g, verts)
        td = self.decomposer(bg)
        report = validate_tree_decomposition(bg, td)
        if not report.ok:
            raise GraphError(f"band decomposition at layer {start} invalid: {report.summary()}")
        self.band_widths.append(width(td))
        return old, td

    def colour_minor(
        self,
        band_data: tuple[list[int], TreeDecomposition],
        keep: Sequence[int],
        groups: Sequence[Sequence[int]],
    ) -> tuple[dict[int, int], dict[int, int], TreePartition, Graph]:
        """2-colour the graph ``G[keep]`` with ``groups`` contracted.

        The decomposition is transported from the band containing ``keep``.
        Returns (colour per uncontracted vertex, colour per group index, partition, minor).
        """
        sub, old = induced_subgraph(self.g, keep)
        local = {v: i for i, v in enumerate(old)}
        local_groups = [[local[v] for v in grp] for grp in groups]
        minor, cmap = contract_components(sub, local_groups)
        band_old, band_td = band_data
        transport = {b: cmap.mapping[local[v]] for b, v in enumerate(band_old) if v in local}
        td = map_decomposition(band_td, transport)
        tp = tree_partition_bounded(minor, td)
        side = _parity_colours(minor.n, tp)
        grouped = {v for grp in groups for v in grp}
        vertex_side = {v: side[cmap.mapping[local[v]]] for v in keep if v not in grouped}
        group_side = {gi: side[gi] for gi in range(len(groups))}
        return vertex_side, group_side, tp, minor

    def assign(self, v: int, c: int) -> None:
        if self.colour[v] >= 0:
            raise AssertionError(f"vertex {v} coloured twice")
        self.colour[v] = c

    def finish(self) -> Colouring:
        missing = [v for v, c in enumerate(self.colour) if c < 0]
        if missing:
            raise AssertionError(f"vertices left uncoloured: {missing[:10]}")
        return Colouring.of(self.colour, palette=3)


def _components_by_region(comps, region_of) -> bool:
    return all(len({region_of[v] for v in comp}) == 1 for _, comp in comps)


def three_colour_main(
    g: Graph, l: Layering, decomposer: Decomposer = default_decomposer
) -> tuple[Colouring, ClusterCertificate]:
    """3-colouring from bands of 5 layers re-coloured across 11-layer windows.

    Colours are residues mod 3. ``G_i`` spans layers ``6i..6i+4`` of the
    shifted layering and is 2-coloured with ``{i, i+1} mod 3``; the seams are
    repaired by 2-colouring, with ``{i, i-1} mod 3``, the graph ``Z_i`` obtained
    from ``G[Y_i]`` by contracting the components of ``G[A_i]`` and ``G[B_i]``.
    """
    run = _BandRun(g, l, decomposer)
    nl = len(run.lay)
    rounds = (nl + 5) // 6 + 1
    bands: dict[int, tuple[list[int], TreeDecomposition]] = {}
    first = [-1] * g.n
    g_widths = [0]
    for i in range(rounds):
        data = run.decompose_band(6 * i, MAIN_BAND)
        if data is None:
            continue
        bands[i] = data
        verts = band(run.lay, 6 * i, 5)
        if not verts:
            continue
        vside, _, tp, _ = run.colour_minor(data, verts, [])
        g_widths.append(tp.width)
        for v, s in vside.items():
            first[v] = (i + s) % 3

    z_widths = [0]
    z_degrees = [0]
    group_max = 0
    region_of = [-1] * g.n
    for i in range(rounds):
        ci, prev = i % 3, (i - 1) % 3
        base = 6 * i
        a_set = [v for v in run.layer_set(base, base + 1, base + 2, base + 3) if first[v] == ci]
        b_set = [v for v in run.layer_set(base + 7, base + 8, base + 9, base + 10) if first[v] == prev]
        middle = (
            [v for v in run.lay[base + 4] if first[v] == ci]
            + list(run.lay[base + 5])
            + [v for v in run.lay[base + 6] if first[v] == prev]
        )
        y_set = a_set + middle + b_set
        for v in y_set:
            if region_of[v] >= 0:
                raise AssertionError(f"vertex {v} in two seam regions")
            region_of[v] = i
        # retained colours from the first pass
        for j in range(5):
            for v in run.lay[base + j]:
                keep = (j <= 1 and first[v] == ci) or j == 2 or (j >= 3 and first[v] == (i + 1) % 3)
                if keep:
                    run.assign(v, first[v])
        if not y_set:
            continue
        a_groups = components_within(g, a_set)
        b_groups = components_within(g, b_set)
        groups = a_groups + b_groups
        group_max = max([group_max] + [len(x) for x in groups])
        vside, gside, tp, minor = run.colour_minor(bands[i], y_set, groups)
        z_widths.append(tp.width)
        z_degrees.append(max_degree(minor))
        palette = (ci, prev)
        for v, s in vside.items():
            run.assign(v, palette[s])
        for gi, grp in enumerate(a_groups):
            for v in grp:
                if run.layer_of[v] == base + 3:
                    run.assign(v, palette[gside[gi]])
        for gi, grp in enumerate(b_groups, start=len(a_groups)):
            for v in grp:
                if run.layer_of[v] == base + 7:
                    run.assign(v, palette[gside[gi]])

    col = run.finish()
    k = max(run.band_widths, default=0) + 1
    delta = max_degree(g)
    cert = _band_certificate(k, delta, run.band_widths, max(g_widths), max(z_widths))
    cert.factors.update(contracted_max_degree=max(z_degrees), group_max=group_max)
    cert.checks["group_within_first_factor"] = group_max <= cert.factors["first"]
    cert = _recheck(cert, g, col, 3)
    cert.checks["within_seam_regions"] = _components_by_region(cert.components, region_of)
    cert.checks["product"] = cert.max_component <= cert.factors["product"]
    cert.details.update(variant="main", palette_encoding="residues mod 3", layer_shift=SHIFT)
    cert.ok = all(cert.checks.values())
    return col, cert


def _band_certificate(k, delta, band_widths, first, second) -> ClusterCertificate:
    d = max(delta, 1)
    cert = ClusterCertificate([], 0, {}, 0)
    cert.k, cert.delta = k, delta
    cert.budget = 8000 * k**3 * d**2
    cert.band_widths = list(band_widths)
    cert.factors = {
        "first": first,
        "second": second,
        "product": max(first, 1) * max(second, 1),
        "first_budget": PARTITION_CONSTANT * k * d,
        "second_budget": PARTITION_CONSTANT**2 * k**2 * d,
    }
    cert.checks["first_budget"] = first <= cert.factors["first_budget"]
    cert.checks["second_budget"] = second <= cert.factors["second_budget"]
    return cert


def three_colour_appendix(
    g: Graph, l: Layering, decomposer: Decomposer = default_decomposer
) -> tuple[Colouring, ClusterCertificate]:
    """3-colouring from 7-layer bands; blue components stay as small as a 2-colouring's.

    Layers ``8i+1..8i+7`` of the shifted layering are 2-coloured blue/yellow.
    Yellow vertices on residues 3, 4, 5 mod 8 become green, red, green; every
    other non-blue vertex is re-coloured red/green through the minor ``H_i``
    of the 7-layer window around layer ``8i``.
    """
    run = _BandRun(g, l, decomposer)
    nl = len(run.lay)
    rounds = nl // 8 + 2
    yellow = [False] * g.n
    blue_widths = [0]
    for j in range(rounds):
        data = run.decompose_band(8 * j + 1, APPENDIX_BAND)
        if data is None:
            continue
        vside, _, tp, _ = run.colour_minor(data, data[0], [])
        blue_widths.append(tp.width)
        for v, s in vside.items():
            if s == 0:
                run.assign(v, BLUE)
            else:
                yellow[v] = True
    for v in range(g.n):
        if yellow[v]:
            r = run.layer_of[v] % 8
            if r == 4:
                run.assign(v, RED)
            elif r in (3, 5):
                run.assign(v, GREEN)

    h_widths = [0]
    h_degrees = [0]
    group_max = 0
    for i in range(1, rounds):
        c = 8 * i
        u_core = list(run.lay[c]) + [
            v for v in run.layer_set(c - 2, c - 1, c + 1, c + 2) if yellow[v]
        ]
        u_plus = u_core + [v for v in run.layer_set(c - 3, c + 3) if yellow[v]]
        if not u_core:
            continue
        data = run.decompose_band(c - 3, APPENDIX_BAND)
        low = components_within(g, [v for v in run.layer_set(c - 3, c - 2) if yellow[v]])
        high = components_within(g, [v for v in run.layer_set(c + 2, c + 3) if yellow[v]])
        groups = low + high
        group_max = max([group_max] + [len(x) for x in groups])
        vside, gside, tp, minor = run.colour_minor(data, u_plus, groups)
        h_widths.append(tp.width)
        h_degrees.append(max_degree(minor))
        palette = (RED, GREEN)
        for v, s in vside.items():
            run.assign(v, palette[s])
        for gi, grp in enumerate(low):
            for v in grp:
                if run.layer_of[v] == c - 2:
                    run.assign(v, palette[gside[gi]])
        for gi, grp in enumerate(high, start=len(low)):
            for v in grp:
                if run.layer_of[v] == c + 2:
                    run.assign(v, palette[gside[gi]])

    col = run.finish()
    k = max(run.band_widths, default=0) + 1
    delta = max_degree(g)
    first = max(blue_widths)
    cert = _band_certificate(k, delta, run.band_widths, first, max(h_widths))
    cert.factors.update(contracted_max_degree=max(h_degrees), group_max=group_max)
    cert.checks["group_within_first_factor"] = group_max <= first
    cert = _recheck(cert, g, col, 3)
    cert.checks["product"] = cert.max_component <= cert.factors["product"]
    cert.checks["blue_within_first"] = cert.per_colour_max.get(BLUE, 0) <= first
    large = []
    contained = True
    for colour, comp in cert.components:
        if len(comp) <= first:
            continue
        layers = [run.layer_of[v] for v in comp]
        window = (max(layers) + 3) // 8
        inside = colour in (RED, GREEN) and 8 * window - 3 <= min(layers) and max(layers) <= 8 * window + 3
        contained &= inside
        large.append(
            {"colour": colour, "size": len(comp), "window": window,
             "layers": [min(layers), max(layers)], "contained": inside}
        )
    cert.checks["band_containment"] = contained
    # Stronger, size-free form: red/green components sit inside one window,
    # except red ones confined to a single layer of residue 4.
    localised = 0
    for colour, comp in cert.components:
        if colour == BLUE:
            continue
        layers = [run.layer_of[v] for v in comp]
        lo, hi = min(layers), max(layers)
        window = (hi + 3) // 8
        single = lo == hi and lo % 8 == 4 and colour == RED
        localised += (8 * window - 3 <= lo and hi <= 8 * window + 3) or single
    red_green = sum(1 for colour, _ in cert.components if colour != BLUE)
    cert.checks["red_green_localised"] = localised == red_green
    cert.details.update(
        variant="appendix",
        palette_encoding={"blue": BLUE, "red": RED, "green": GREEN},
        layer_shift=SHIFT,
        large_components=large,
        red_green_components=red_green,
    )
    cert.ok = all(cert.checks.values())
    return col, cert


def three_colour_pipeline(
    g: Graph, variant: str = "appendix", decomposer: Decomposer = default_decomposer
) -> tuple[Colouring, ClusterCertificate]:
    """BFS-layer ``g`` and run the chosen banded construction."""
    l = bfs_layering_multi(g)
    if variant == "main":
        return three_colour_main(g, l, decomposer)
    if variant == "appendix":
        return three_colour_appendix(g, l, decomposer)
    raise ValueError(f"unknown variant {variant!r}")
