"""JSON documents and DOT export.

Every document carries ``schema_version`` and a ``type`` field.  Output is
canonical (sorted keys, fixed indentation) so equal objects give equal
bytes.
"""
from __future__ import annotations

import json
from typing import IO, Union

from ._ids import decode_id, encode_id, sort_ids
from .bipartite import BipartiteLK, ScaleFamily
from .errors import InvalidArgument, SchemaError
from .graph import TruncatedGraph
from .trees import OrderTree, SparseTGraph

SCHEMA_VERSION = 1


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _doc(kind: str, body: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "type": kind, **body}


def _field(doc: dict, name: str, where: str):
    if name not in doc:
        raise SchemaError(f"{where}: missing field {name!r}")
    return doc[name]


def _decode(obj, where: str):
    try:
        return decode_id(obj)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from None


# -- trees ----------------------------------------------------------------


def tree_to_json(t: OrderTree) -> dict:
    body = {
        "root": encode_id(t.root),
        "parent": [[encode_id(c), encode_id(t.parent[c])] for c in sort_ids(t.parent)],
        "tops": [encode_id(x) for x in sort_ids(t.tops)],
        "antichains": None if t.antichains is None else
        [[encode_id(v) for v in sort_ids(a)] for a in t.antichains],
        "branching_profile": list(t.branching_profile),
        "labels": dict(t.labels),
    }
    return _doc("tree", body)


def tree_from_json(doc: dict) -> OrderTree:
    root = _decode(_field(doc, "root", "tree"), "tree.root")
    parent = {}
    for i, pair in enumerate(_field(doc, "parent", "tree")):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"tree.parent[{i}]: expected [child, parent]")
        parent[_decode(pair[0], f"tree.parent[{i}]")] = _decode(pair[1], f"tree.parent[{i}]")
    tops = frozenset(_decode(x, "tree.tops") for x in doc.get("tops", []))
    ac = doc.get("antichains")
    if ac is not None:
        ac = tuple(frozenset(_decode(v, "tree.antichains") for v in a) for a in ac)
    return OrderTree(root, parent, tops, ac, tuple(doc.get("branching_profile", ())),
                     dict(doc.get("labels", {})))


def sparse_to_json(g: SparseTGraph) -> dict:
    tree = tree_to_json(g.tree)
    body = {
        "tree": {k: v for k, v in tree.items() if k not in ("schema_version", "type")},
        "ladder": [[encode_id(t), [encode_id(s) for s in g.ladder[t]]] for t in sort_ids(g.ladder)],
        "notices": list(g.notices),
    }
    return _doc("sparse", body)


def sparse_from_json(doc: dict) -> SparseTGraph:
    tree = tree_from_json(_field(doc, "tree", "sparse"))
    ladder = {}
    for i, pair in enumerate(_field(doc, "ladder", "sparse")):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError(f"sparse.ladder[{i}]: expected [node, entries]")
        ladder[_decode(pair[0], f"sparse.ladder[{i}]")] = tuple(
            _decode(s, f"sparse.ladder[{i}]") for s in pair[1])
    return SparseTGraph(tree, ladder, tuple(doc.get("notices", ())))


# -- graphs ---------------------------------------------------------------


def graph_to_json(g: TruncatedGraph) -> dict:
    verts = []
    for v in g.vertices:
        row = {"id": encode_id(v), "depth": g.depth[v]}
        if g.provenance is not None:
            t, n = g.provenance[v]
            row["provenance"] = [encode_id(t), n]
        verts.append(row)
    body = {
        "vertices": verts,
        "edges": [[encode_id(u), encode_id(v)] for u, v in g.edges],
        "meta": dict(g.meta),
        "has_provenance": g.provenance is not None,
    }
    return _doc("graph", body)


def graph_from_json(doc: dict) -> TruncatedGraph:
    verts, depth, prov = [], {}, {}
    with_prov = bool(doc.get("has_provenance", False))
    for i, row in enumerate(_field(doc, "vertices", "graph")):
        where = f"graph.vertices[{i}]"
        if not isinstance(row, dict):
            raise SchemaError(f"{where}: expected an object")
        v = _decode(_field(row, "id", where), where)
        d = _field(row, "depth", where)
        if not isinstance(d, int) or isinstance(d, bool):
            raise SchemaError(f"{where}.depth: expected an integer")
        verts.append(v)
        depth[v] = d
        if with_prov:
            p = _field(row, "provenance", where)
            prov[v] = (_decode(p[0], where), int(p[1]))
    edges = []
    for i, e in enumerate(_field(doc, "edges", "graph")):
        if not isinstance(e, list) or len(e) != 2:
            raise SchemaError(f"graph.edges[{i}]: expected [u, v]")
        edges.append((_decode(e[0], f"graph.edges[{i}]"), _decode(e[1], f"graph.edges[{i}]")))
    if len(set(verts)) != len(verts):
        raise SchemaError("graph.vertices: duplicate vertex id")
    return TruncatedGraph.from_edges(verts, edges, depth, prov if with_prov else None,
                                     doc.get("meta", {}))


# -- bipartite graphs and scales -------------------------------------------


def bipartite_to_json(g: BipartiteLK) -> dict:
    return _doc("bipartite", {
        "side_a": [encode_id(v) for v in g.side_a],
        "side_b": [encode_id(v) for v in g.side_b],
        "nbrs": [[encode_id(b), [encode_id(a) for a in g.nbrs[b]]] for b in g.side_b],
        "d": g.d,
    })


def bipartite_from_json(doc: dict) -> BipartiteLK:
    nbrs = {}
    for i, pair in enumerate(_field(doc, "nbrs", "bipartite")):
        nbrs[_decode(pair[0], f"bipartite.nbrs[{i}]")] = tuple(
            _decode(a, f"bipartite.nbrs[{i}]") for a in pair[1])
    return BipartiteLK(tuple(_decode(v, "bipartite.side_a") for v in _field(doc, "side_a", "bipartite")),
                       tuple(_decode(v, "bipartite.side_b") for v in _field(doc, "side_b", "bipartite")),
                       nbrs, int(doc.get("d", 2)))


def scale_to_json(s: ScaleFamily) -> dict:
    ideal = sorted((sorted(e) for e in s.ideal), key=lambda e: (len(e), e))
    return _doc("scale", {"bounds": list(s.bounds),
                          "functions": [list(f) for f in s.functions],
                          "ideal": ideal})


def scale_from_json(doc: dict) -> ScaleFamily:
    return ScaleFamily(tuple(_field(doc, "bounds", "scale")),
                       tuple(tuple(f) for f in _field(doc, "functions", "scale")),
                       frozenset(frozenset(e) for e in doc.get("ideal", [[]])))


_WRITERS = {OrderTree: tree_to_json, SparseTGraph: sparse_to_json, TruncatedGraph: graph_to_json,
            BipartiteLK: bipartite_to_json, ScaleFamily: scale_to_json}
_READERS = {"tree": tree_from_json, "sparse": sparse_from_json, "graph": graph_from_json,
            "bipartite": bipartite_from_json, "scale": scale_from_json}


def to_document(obj) -> dict:
    if hasattr(obj, "to_json"):
        return obj.to_json()
    for cls, fn in _WRITERS.items():
        if isinstance(obj, cls):
            return fn(obj)
    raise InvalidArgument(f"cannot serialize {type(obj).__name__}")


def emit(obj, out: Union[str, IO, None] = None) -> str:
    """Serialize ``obj`` canonically; write to a path or stream when given."""
    text = dumps(to_document(obj))
    if isinstance(out, str):
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif out is not None:
        out.write(text)
    return text


def parse(src: Union[str, IO]):
    """Read a document from a path, a stream, or a JSON string."""
    if isinstance(src, str) and src.lstrip().startswith("{"):
        text = src
    elif isinstance(src, str):
        with open(src, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = src.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    kind = doc.get("type")
    if kind not in _READERS:
        raise SchemaError(f"type: unknown document type {kind!r}")
    return _READERS[kind](doc)


# -- DOT ------------------------------------------------------------------


def _label(x) -> str:
    if isinstance(x, tuple) and x and x[0] == "lift":
        return "lift" + ".".join(str(p) for p in x[1:])
    if isinstance(x, tuple):
        return "(" + ",".join(_label(p) for p in x) + ")"
    return repr(x) if not isinstance(x, (int, str)) else str(x)


def to_dot(g: TruncatedGraph) -> str:
    """Undirected DOT, nodes labelled ``(t|n)`` and ranked by ray index."""
    ids = {v: f"v{i}" for i, v in enumerate(g.vertices)}
    lines = ["graph G {", "  node [shape=box, fontsize=10];"]
    by_rank = {}
    for v in g.vertices:
        if g.provenance is not None:
            t, n = g.provenance[v]
            label = f"({_label(t)}|{n})"
        else:
            n = g.depth[v]
            label = _label(v)
        by_rank.setdefault(n, []).append(v)
        lines.append(f'  {ids[v]} [label="{label}"];')
    for n in sorted(by_rank):
        members = " ".join(ids[v] for v in by_rank[n])
        lines.append(f"  {{ rank=same; {members} }}")
    for u, v in g.edges:
        lines.append(f"  {ids[u]} -- {ids[v]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
