"""Command-line entry point.

Every run writes a JSON report (to ``--report`` or stdout) and a one-line
summary to stderr. Exit status: 0 all checks passed, 1 a check failed,
2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Any, Callable

from . import io
from .colouring import (
    three_colour_appendix,
    three_colour_main,
    two_colour_bounded,
    verify_clustering,
)
from .generators import GeneratorSpec, band_widths, gen_apexed
from .graph import GraphError, induced_subgraph, max_degree
from .layered import (
    drop_apices,
    embed_in_product,
    friendliness_check,
    layered_width_of_decomposition,
    make_width_one,
    partition_layered_width,
    power_bound,
    power_layered_decomposition,
    singleton_klpartition,
    validate_kl_partition,
)
from .layering import bfs_layering, bfs_layering_multi, validate_layering
from .treewidth import (
    BudgetExceeded,
    exact_treewidth,
    heuristic_tree_decomposition,
    tree_partition_bounded,
    validate_tree_decomposition,
    validate_tree_partition,
    width,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Run:
    """Accumulates the report for one command."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.report: dict[str, Any] = {"command": args.command, "inputs": {}, "parameters": {}}
        self.checks: dict[str, bool] = {}
        self.timings: dict[str, float] = {}

    def input(self, name: str, path: str) -> str:
        if not Path(path).is_file():
            raise UsageError(f"{name}: no such file {path}")
        self.report["inputs"][name] = io.digest(path)
        return path

    def graph(self, path: str):
        return io.read_graph(self.input("graph", path))

    def json(self, name: str, path: str):
        return io.load_json(self.input(name, path))

    def timed(self, label: str, fn: Callable, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        self.timings[label] = round(time.perf_counter() - t0, 6)
        return out

    def check(self, name: str, ok: bool) -> None:
        self.checks[name] = bool(ok)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def finish(self) -> int:
        self.report["checks"] = self.checks
        self.report["pass"] = self.passed
        if getattr(self.args, "timings", False):
            self.report["timings"] = self.timings
        text = io.dumps(self.report)
        target = getattr(self.args, "report", None)
        if target:
            Path(target).write_text(text)
        else:
            sys.stdout.write(text)
        failed = [k for k, v in self.checks.items() if not v]
        status = "PASS" if self.passed else "FAIL " + ",".join(failed)
        print(f"{self.args.command}: {status}", file=sys.stderr)
        return EXIT_OK if self.passed else EXIT_FAIL


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _groups(text: str) -> list[list[int]]:
    return [_ints(chunk) for chunk in text.split(";") if chunk.strip()]


def _write_json(path: str | None, obj: Any) -> None:
    if path:
        Path(path).write_text(io.dumps(obj))


def _layering_for(run: Run, g, path: str | None):
    if path is None:
        return bfs_layering_multi(g)
    lay, n = io.layering_from_json(run.json("layering", path), path)
    if n != g.n:
        raise io.FormatError(f"{path}: field 'n' is {n}, graph has {g.n} vertices")
    return lay


def _decomposition(g, method: str):
    if method == "exact":
        return exact_treewidth(g)[1]
    return heuristic_tree_decomposition(g, method)


# --- commands ----------------------------------------------------------------


def cmd_gen(run: Run) -> None:
    a = run.args
    params = _ints(a.params)
    run.report["parameters"] = {"family": a.family, "params": params, "seed": a.seed}
    lay = None
    extra: dict[str, Any] = {}
    if a.family == "apexed":
        if len(params) != 2:
            raise UsageError("apexed needs --params apex_count,apex_degree")
        base = GeneratorSpec(a.base_family, tuple(_ints(a.base_params)), a.seed)
        g, apices = gen_apexed(base, params[0], params[1], a.seed)
        run.report["parameters"].update(base_family=a.base_family, base_params=list(base.params))
        extra["apices"] = apices
        _write_json(a.apices_out, {"apices": apices})
    else:
        g, lay = GeneratorSpec(a.family, tuple(params), a.seed).build()
    io.write_graph(g, a.out)
    if lay is not None:
        run.check("layering_valid", validate_layering(g, lay).ok)
        extra["band_widths_7"] = band_widths(g, lay, 7)
        _write_json(a.layering_out, io.layering_to_json(lay, g.n))
    run.report["result"] = {"n": g.n, "m": g.m, "max_degree": max_degree(g), **extra}
    run.check("graph_valid", True)


def cmd_layer(run: Run) -> None:
    a = run.args
    g = run.graph(a.graph)
    run.report["parameters"] = {"method": a.method, "root": a.root}
    lay = bfs_layering(g, a.root) if a.root is not None else bfs_layering_multi(g)
    run.check("layering_valid", validate_layering(g, lay).ok)
    _write_json(a.out, io.layering_to_json(lay, g.n))
    run.report["result"] = {"layers": len(lay), "sizes": lay.sizes()}


def cmd_tw(run: Run) -> None:
    a = run.args
    g = run.graph(a.graph)
    run.report["parameters"] = {"method": a.method}
    td = run.timed("decompose", _decomposition, g, a.method)
    run.check("decomposition_valid", validate_tree_decomposition(g, td).ok)
    _write_json(a.out, io.td_to_json(td))
    run.report["result"] = {"width": width(td), "bags": len(td.bags), "exact": a.method == "exact"}


def cmd_colour2(run: Run) -> None:
    a = run.args
    g = run.graph(a.graph)
    run.report["parameters"] = {"method": a.method, "tree_partition": bool(a.tree_partition)}
    delta = max_degree(g)
    if a.tree_partition:
        tp = io.tp_from_json(run.json("tree_partition", a.tree_partition), a.tree_partition)
        report = validate_tree_partition(g, tp)
        if not report.ok:
            raise UsageError(f"invalid tree-partition: {report.summary()}")
        k, budget = None, tp.width
    else:
        td = run.timed("decompose", heuristic_tree_decomposition, g, a.method)
        k = width(td) + 1
        tp = run.timed("partition", tree_partition_bounded, g, td)
        budget = tp.budget
    col, cert = run.timed("colour", two_colour_bounded, g, tp)
    check = verify_clustering(g, col, 2, budget)
    run.check("palette", check.checks["palette"])
    run.check("bound", check.checks["bound"])
    run.check("within_parts", cert.checks["within_parts"])
    cert.k, cert.delta, cert.budget = k, delta, budget
    cert.factors["first"] = tp.width
    _write_json(a.out, io.colouring_to_json(col))
    run.report["certificate"] = cert.to_json()


def cmd_colour3(run: Run) -> None:
    a = run.args
    g = run.graph(a.graph)
    lay = _layering_for(run, g, a.layering)
    run.report["parameters"] = {"variant": a.variant, "method": a.method, "layering": bool(a.layering)}
    build = three_colour_main if a.variant == "main" else three_colour_appendix
    col, cert = run.timed("colour", build, g, lay, lambda h: heuristic_tree_decomposition(h, a.method))
    check = verify_clustering(g, col, 3, cert.budget)
    run.check("palette", check.checks["palette"])
    run.check("budget", check.checks["bound"])
    for name, ok in cert.checks.items():
        run.check(name, ok)
    _write_json(a.out, io.colouring_to_json(col))
    run.report["certificate"] = cert.to_json()


def cmd_power(run: Run) -> None:
    a = run.args
    g = run.graph(a.graph)
    lay = _layering_for(run, g, a.layering)
    if a.td:
        td = io.td_from_json(run.json("td", a.td), a.td)
    else:
        td = heuristic_tree_decomposition(g, a.method)
    run.report["parameters"] = {"p": a.p, "method": a.method if not a.td else None}
    k = layered_width_of_decomposition(g, td, lay)
    delta = max_degree(g)
    gp, ltd = run.timed("power", power_layered_decomposition, g, td, lay, a.p)
    bound = power_bound(k, delta, a.p)
    run.check("decomposition_valid", validate_tree_decomposition(gp, ltd.td).ok)
    run.check("layering_valid", validate_layering(gp, ltd.layering).ok)
    if bound is not None:
        run.check("layered_width_bound", ltd.layered_width < bound)
    io.write_graph(gp, a.out)
    _write_json(a.td_out, io.td_to_json(ltd.td))
    _write_json(a.layering_out, io.layering_to_json(ltd.layering, gp.n))
    run.report["result"] = {
        "k": k, "delta": delta, "p": a.p, "layered_width": ltd.layered_width, "bound": bound,
        "power_edges": gp.m,
    }


def _klp(run: Run, g, path: str):
    return io.klp_from_json(run.json("klp", path), path)


def _klp_summary(g, klp) -> dict[str, Any]:
    return {
        "k": klp.k,
        "ell": klp.ell,
        "witness_width": width(klp.witness),
        "layered_width": partition_layered_width(g, klp.hp, klp.layering),
        "parts": len(klp.hp.parts),
    }


def cmd_partition(run: Run) -> None:
    a = run.args
    g = run.graph(a.graph)
    action = a.action
    run.report["parameters"] = {"action": action}
    if action == "singleton":
        lay = _layering_for(run, g, a.layering)
        klp = singleton_klpartition(g, lay, heuristic_tree_decomposition(g, a.method))
        run.check("valid", validate_kl_partition(g, klp).ok)
        _write_json(a.out, io.klp_to_json(klp))
        run.report["result"] = _klp_summary(g, klp)
    elif action == "validate":
        klp = _klp(run, g, a.klp)
        report = validate_kl_partition(g, klp)
        run.check("valid", report.ok)
        run.report["result"] = {"violations": [list(map(str, v)) for v in report.violations[:50]]}
        if report.ok:
            run.report["result"].update(_klp_summary(g, klp))
    elif action == "drop-apices":
        apices = sorted(set(_ints(a.apices or "")))
        if any(not 0 <= v < g.n for v in apices):
            raise UsageError("apex id out of range")
        if a.klp:
            klp = _klp(run, g, a.klp)
        else:
            rest, _ = induced_subgraph(g, [v for v in range(g.n) if v not in set(apices)])
            klp = singleton_klpartition(rest, bfs_layering_multi(rest), heuristic_tree_decomposition(rest, a.method))
        out = drop_apices(g, apices, klp)
        run.check("valid", validate_kl_partition(g, out).ok)
        run.check("k_bound", width(out.witness) <= klp.k + (1 if apices else 0))
        delta_a = max(max((g.degree(v) for v in apices), default=0), 1)
        bound = 2 * klp.ell * delta_a * len(apices) if apices else klp.ell
        measured = partition_layered_width(g, out.hp, out.layering)
        run.check("layered_width_bound", measured <= bound)
        layer0 = set(out.layering[0])
        nbrs = {w for v in apices for w in g.adj[v]}
        run.check("apex_neighbours_in_layer0", nbrs <= layer0)
        _write_json(a.out, io.klp_to_json(out))
        run.report["result"] = {**_klp_summary(g, out), "bound": bound, "apices": apices}
    elif action == "embed":
        klp = _klp(run, g, a.klp)
        emb = embed_in_product(g, klp)
        run.check("embedding", emb.ok)
        _write_json(a.out, {"mapping": [list(t) for t in emb.mapping]})
        run.report["result"] = {"failures": [list(e) for e in emb.failures]}
    elif action == "width1":
        klp = _klp(run, g, a.klp)
        report = validate_kl_partition(g, klp)
        if not report.ok:
            raise UsageError(f"invalid (k, l)-partition: {report.summary()}")
        out = make_width_one(klp, g)
        run.check("valid", validate_kl_partition(g, out).ok)
        run.check("layered_width_one", partition_layered_width(g, out.hp, out.layering) <= 1)
        run.check("witness_bound", width(out.witness) <= (klp.k + 1) * klp.ell - 1)
        _write_json(a.out, io.klp_to_json(out))
        run.report["result"] = _klp_summary(g, out)
    elif action == "friendly":
        klp = _klp(run, g, a.klp)
        clique = _ints(a.clique or "")
        ok, report = friendliness_check(
            g, klp, clique, _ints(a.c0 or ""), _ints(a.c1 or ""), _groups(a.prescribed or "")
        )
        run.check("friendly", ok)
        run.report["result"] = {"violations": [[k, v] for k, v in report.violations]}


def cmd_verify(run: Run) -> None:
    a = run.args
    g = run.graph(a.graph)
    col = io.colouring_from_json(run.json("colouring", a.colouring), a.colouring)
    if len(col.colours) != g.n:
        raise io.FormatError(f"{a.colouring}: field 'colours' has {len(col.colours)} entries, graph has {g.n}")
    if a.bound == "auto":
        if not a.certificate:
            raise UsageError("--bound auto needs --certificate")
        obj = run.json("certificate", a.certificate)
        cert_obj = obj.get("certificate", obj) if isinstance(obj, dict) else None
        bound = cert_obj.get("budget") if isinstance(cert_obj, dict) else None
        if not isinstance(bound, int):
            raise io.FormatError(f"{a.certificate}: missing integer field 'budget'")
    else:
        try:
            bound = int(a.bound)
        except ValueError:
            raise UsageError(f"--bound must be an integer or 'auto', got {a.bound!r}") from None
    run.report["parameters"] = {"max_colours": a.max_colours, "bound": bound}
    cert = verify_clustering(g, col, a.max_colours, bound)
    run.check("palette", cert.checks["palette"])
    run.check("bound", cert.checks["bound"])
    run.report["certificate"] = cert.to_json()


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clustercol", description="Clustered colouring toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn, **kw) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(func=fn)
        sp.add_argument("--report", help="write the JSON report here instead of stdout")
        sp.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
        return sp

    methods = ["min-degree", "min-fill"]
    sp = add("gen", cmd_gen, help="generate an instance")
    sp.add_argument("--family", required=True, choices=["grid", "trigrid", "sp", "banded", "apexed"])
    sp.add_argument("--params", required=True, help="comma-separated integers")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--layering-out")
    sp.add_argument("--base-family", default="grid", choices=["grid", "trigrid", "sp", "banded"])
    sp.add_argument("--base-params", default="5,5")
    sp.add_argument("--apices-out")

    sp = add("layer", cmd_layer, help="compute a layering")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--method", default="bfs", choices=["bfs"])
    sp.add_argument("--root", type=int)
    sp.add_argument("--out", required=True)

    sp = add("tw", cmd_tw, help="tree decomposition")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--method", default="min-degree", choices=methods + ["exact"])
    sp.add_argument("--out")

    sp = add("colour2", cmd_colour2, help="2-colouring from a tree-partition")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--tree-partition")
    sp.add_argument("--method", default="min-degree", choices=methods)
    sp.add_argument("--out")

    sp = add("colour3", cmd_colour3, help="banded 3-colouring")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--layering")
    sp.add_argument("--variant", default="appendix", choices=["main", "appendix"])
    sp.add_argument("--method", default="min-degree", choices=methods)
    sp.add_argument("--out")

    sp = add("power", cmd_power, help="layered decomposition of a graph power")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--td")
    sp.add_argument("--layering")
    sp.add_argument("--method", default="min-degree", choices=methods)
    sp.add_argument("--out", required=True)
    sp.add_argument("--td-out")
    sp.add_argument("--layering-out")

    sp = add("partition", cmd_partition, help="(k, l)-partition tools")
    sp.add_argument(
        "action", choices=["singleton", "validate", "drop-apices", "embed", "width1", "friendly"]
    )
    sp.add_argument("--graph", required=True)
    sp.add_argument("--klp")
    sp.add_argument("--layering")
    sp.add_argument("--method", default="min-degree", choices=methods)
    sp.add_argument("--apices")
    sp.add_argument("--clique")
    sp.add_argument("--c0")
    sp.add_argument("--c1")
    sp.add_argument("--prescribed", help="parts separated by ';', e.g. '0,1;2'")
    sp.add_argument("--out")

    sp = add("verify", cmd_verify, help="check a colouring's clustering")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--colouring", required=True)
    sp.add_argument("--max-colours", type=int, required=True)
    sp.add_argument("--bound", required=True, help="integer or 'auto'")
    sp.add_argument("--certificate", help="report or certificate JSON carrying 'budget'")
    return p


def _needs(args: argparse.Namespace) -> None:
    if args.command == "partition" and args.action not in ("singleton", "drop-apices") and not args.klp:
        raise UsageError(f"partition {args.action} needs --klp")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    run = Run(args)
    try:
        _needs(args)
        args.func(run)
    except (UsageError, io.FormatError, GraphError, OSError) as exc:
        print(f"{args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"{args.command}: budget exceeded: {exc}", file=sys.stderr)
        run.check("budget", False)
    return run.finish()


if __name__ == "__main__":
    sys.exit(main())
