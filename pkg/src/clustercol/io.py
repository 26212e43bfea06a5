"""Readers and writers for the edge-list text format and the JSON artefacts."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from .colouring import Colouring
from .graph import Graph
from .layered import HPartition, KLPartition
from .layering import Layering
from .treewidth import TreeDecomposition, TreePartition


class FormatError(ValueError):
    """Malformed input file; the message names the offending line or field."""


def parse_edge_list(text: str, source: str = "<edge list>") -> Graph:
    header = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is not None:
                raise FormatError(f"{source}:{lineno}: comment after header")
            continue
        fields = line.split()
        if len(fields) != 2:
            raise FormatError(f"{source}:{lineno}: expected two integers, got {line!r}")
        try:
            a, b = int(fields[0]), int(fields[1])
        except ValueError:
            raise FormatError(f"{source}:{lineno}: non-integer field in {line!r}") from None
        if header is None:
            if a < 0 or b < 0:
                raise FormatError(f"{source}:{lineno}: negative n or m")
            header = (a, b)
            continue
        n = header[0]
        if not 0 <= a < b < n:
            raise FormatError(f"{source}:{lineno}: edge {a} {b} needs 0 <= u < v < {n}")
        if (a, b) in seen:
            raise FormatError(f"{source}:{lineno}: duplicate edge {a} {b}")
        seen.add((a, b))
        edges.append((a, b))
    if header is None:
        raise FormatError(f"{source}: missing 'n m' header")
    if len(edges) != header[1]:
        raise FormatError(f"{source}: header declares {header[1]} edges, found {len(edges)}")
    return Graph.from_edges(header[0], edges)


def format_edge_list(g: Graph, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def read_graph(path: str | Path) -> Graph:
    return parse_edge_list(Path(path).read_text(), str(path))


def write_graph(g: Graph, path: str | Path, comment: str | None = None) -> None:
    Path(path).write_text(format_edge_list(g, comment))


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def load_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None


def _field(obj: Any, key: str, source: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise FormatError(f"{source}: missing field {key!r}")
    return obj[key]


def _int_lists(value: Any, key: str, source: str) -> list[list[int]]:
    if not isinstance(value, list) or not all(
        isinstance(row, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in row)
        for row in value
    ):
        raise FormatError(f"{source}: field {key!r} must be a list of integer lists")
    return value


def _pairs(value: Any, key: str, source: str) -> list[tuple[int, int]]:
    rows = _int_lists(value, key, source)
    if any(len(r) != 2 for r in rows):
        raise FormatError(f"{source}: field {key!r} must hold pairs")
    return [(r[0], r[1]) for r in rows]


def layering_to_json(l: Layering, n: int) -> dict:
    return {"n": n, "layers": [list(layer) for layer in l.layers]}


def layering_from_json(obj: Any, source: str = "<layering>") -> tuple[Layering, int]:
    n = _field(obj, "n", source)
    layers = _int_lists(_field(obj, "layers", source), "layers", source)
    return Layering.from_sets(layers), n


def td_to_json(td: TreeDecomposition) -> dict:
    return {"tree_edges": [list(e) for e in td.tree.edges()], "bags": [list(b) for b in td.bags]}


def td_from_json(obj: Any, source: str = "<decomposition>") -> TreeDecomposition:
    bags = _int_lists(_field(obj, "bags", source), "bags", source)
    edges = _pairs(_field(obj, "tree_edges", source), "tree_edges", source)
    try:
        return TreeDecomposition.make(edges, bags)
    except ValueError as exc:
        raise FormatError(f"{source}: tree_edges: {exc}") from None


def tp_to_json(tp: TreePartition) -> dict:
    return {"tree_edges": [list(e) for e in tp.tree.edges()], "parts": [list(p) for p in tp.parts]}


def tp_from_json(obj: Any, source: str = "<tree-partition>") -> TreePartition:
    parts = _int_lists(_field(obj, "parts", source), "parts", source)
    edges = _pairs(_field(obj, "tree_edges", source), "tree_edges", source)
    try:
        return TreePartition.make(edges, parts)
    except ValueError as exc:
        raise FormatError(f"{source}: tree_edges: {exc}") from None


def colouring_to_json(c: Colouring) -> dict:
    return {"palette": c.palette, "colours": list(c.colours)}


def colouring_from_json(obj: Any, source: str = "<colouring>") -> Colouring:
    palette = _field(obj, "palette", source)
    colours = _field(obj, "colours", source)
    if not isinstance(palette, int) or not isinstance(colours, list):
        raise FormatError(f"{source}: 'palette' must be an int and 'colours' a list")
    try:
        return Colouring.of(colours, palette)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{source}: colours: {exc}") from None


def klp_to_json(klp: KLPartition) -> dict:
    return {
        "host_n": klp.hp.host.n,
        "host_edges": [list(e) for e in klp.hp.host.edges()],
        "parts": [list(p) for p in klp.hp.parts],
        "layers": [list(layer) for layer in klp.layering.layers],
        "witness": td_to_json(klp.witness),
        "k": klp.k,
        "ell": klp.ell,
    }


def klp_from_json(obj: Any, source: str = "<klpartition>") -> KLPartition:
    host_n = _field(obj, "host_n", source)
    host_edges = _pairs(_field(obj, "host_edges", source), "host_edges", source)
    parts = _int_lists(_field(obj, "parts", source), "parts", source)
    layers = _int_lists(_field(obj, "layers", source), "layers", source)
    witness = td_from_json(_field(obj, "witness", source), source + ":witness")
    k, ell = _field(obj, "k", source), _field(obj, "ell", source)
    try:
        host = Graph.from_edges(host_n, host_edges)
    except ValueError as exc:
        raise FormatError(f"{source}: host_edges: {exc}") from None
    return KLPartition(HPartition.make(host, parts), Layering.from_sets(layers), k, ell, witness)


def digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
