"""Ray inflations of sparse T-graphs, cut at a finite ray length.

Vertex ``(t, n)`` is the n-th vertex of the horizontal ray of tree node
``t``.  Edges follow three rules: the horizontal ray itself, a rung to the
predecessor at every index for successor nodes, and for a limit node the
rung from index n to its n-th ladder entry.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ._ids import encode_id, sort_ids, vkey
from .errors import CertificationError, InvalidArgument
from .graph import Ray, TruncatedGraph, pairwise_disjoint
from .trees import SparseTGraph


def inflate(g: SparseTGraph, depth: int, generator: Optional[dict] = None) -> TruncatedGraph:
    """Finite slice ``nodes x {0..depth}`` of the ray inflation of ``g``."""
    if depth < 0:
        raise InvalidArgument("depth must be nonnegative")
    tree = g.tree
    nodes = sort_ids(tree.nodes)
    verts = [(t, n) for t in nodes for n in range(depth + 1)]
    edges = []
    cut_ladders = {}
    for t in nodes:
        for n in range(depth):
            edges.append(((t, n), (t, n + 1)))
        if tree.is_successor(t):
            p = tree.parent[t]
            edges.extend(((t, n), (p, n)) for n in range(depth + 1))
        elif t in tree.tops:
            lad = g.ladder[t]
            edges.extend(((t, n), (lad[n], n)) for n in range(min(len(lad), depth + 1)))
            if len(lad) < depth + 1:
                cut_ladders[t] = len(lad)
    meta = {
        "depth": depth,
        "rule3_short_ladders": [[encode_id(t), k] for t, k in
                                sorted(cut_ladders.items(), key=lambda kv: vkey(kv[0]))],
    }
    if generator is not None:
        meta["generator"] = generator
    return TruncatedGraph.from_edges(
        verts, edges, depth={v: v[1] for v in verts},
        provenance={v: v for v in verts}, meta=meta)


def expected_counts(g: SparseTGraph, depth: int) -> dict:
    """Closed-form vertex and edge counts of ``inflate(g, depth)``."""
    tree = g.tree
    n_nodes = len(tree.nodes)
    successors = sum(1 for t in tree.nodes if tree.is_successor(t))
    rule3 = sum(min(len(g.ladder[x]), depth + 1) for x in tree.tops)
    return {
        "vertices": n_nodes * (depth + 1),
        "horizontal": n_nodes * depth,
        "rule2": successors * (depth + 1),
        "rule3": rule3,
        "edges": n_nodes * depth + successors * (depth + 1) + rule3,
    }


def _require_provenance(h: TruncatedGraph):
    if h.provenance is None:
        raise InvalidArgument("graph carries no provenance")


def _nodes_of(h: TruncatedGraph) -> set:
    return {h.provenance[v][0] for v in h.adj}


def horizontal_ray(h: TruncatedGraph, t) -> Ray:
    _require_provenance(h)
    column = sorted((v for v in h.adj if h.provenance[v][0] == t),
                    key=lambda v: h.provenance[v][1])
    if not column:
        raise InvalidArgument(f"unknown node {t!r}")
    return Ray(tuple(column), owner=t)


def horizontal_rays(h: TruncatedGraph) -> list:
    _require_provenance(h)
    return [horizontal_ray(h, t) for t in sort_ids(_nodes_of(h))]


@dataclass(frozen=True)
class LabelledPartition:
    level: int
    components: dict  # label node -> frozenset of vertices


def components_above(h: TruncatedGraph, tree, i: int) -> LabelledPartition:
    """Components of ``h`` minus the columns of all finite nodes below level ``i``.

    Labels are the minimal nodes of what remains (level ``i`` of the finite
    part, or the tops when ``i`` is the top level).  Each component must be
    exactly the union of columns of the up-closure of its label.
    """
    _require_provenance(h)
    if i == tree.top_level:
        labels = sort_ids(tree.tops)
    else:
        labels = sort_ids(tree.level(i))
    low = tree.below_level(i)
    keep = [v for v in h.adj if h.provenance[v][0] not in low]
    comps = h.components(within=keep)
    by_label = {}
    for t in labels:
        ups = tree.up_closure(t)
        by_label[t] = frozenset(v for v in keep if h.provenance[v][0] in ups)
    claimed = {}
    for comp in comps:
        matches = [t for t in labels if by_label[t] == comp]
        if len(matches) != 1:
            raise CertificationError(
                f"component at level {i} matches {len(matches)} labels", witness=comp)
        claimed[matches[0]] = comp
    if len(claimed) != len(labels):
        missing = [t for t in labels if t not in claimed]
        raise CertificationError(f"labels without a component: {missing!r}", witness=missing)
    return LabelledPartition(i, claimed)


@dataclass(frozen=True)
class DoubleStarReport:
    passed: bool
    per_node: dict  # node -> (passed, violating vertices)


def check_doublestar_property(h: TruncatedGraph, tree, s: dict) -> DoubleStarReport:
    """Check every vertex above ``t`` sends its downward edges into S_t x {0..|S_t|-1}."""
    _require_provenance(h)
    per_node = {}
    ok_all = True
    for t in sort_ids(tree.finite_nodes):
        if t not in s:
            raise InvalidArgument(f"attachment map misses node {t!r}")
        below = tree.strict_down(t)
        above = tree.up_closure(t) - {t}
        allowed_nodes = s[t]
        bound = len(allowed_nodes)
        bad = []
        for v in h.adj:
            if h.provenance[v][0] not in above:
                continue
            for u in h.adj[v]:
                node, n = h.provenance[u]
                if node in below and not (node in allowed_nodes and n < bound):
                    bad.append((v, u))
        bad.sort(key=lambda e: (vkey(e[0]), vkey(e[1])))
        per_node[t] = (not bad, tuple(bad))
        ok_all = ok_all and not bad
    return DoubleStarReport(ok_all, per_node)


def lift_with_stars(g: TruncatedGraph, rays: Sequence[Ray], sizes: Sequence[int]) -> TruncatedGraph:
    """Attach ``sizes[i]`` new parallel rays to ``rays[i]`` by level matchings.

    New ray ``(i, l)`` has vertices ``(("lift", i, l), n)``; its n-th vertex is
    joined to the n-th vertex of ``rays[i]`` and inherits that vertex's depth.
    """
    if len(rays) != len(sizes):
        raise InvalidArgument("sizes must match rays in length")
    if any(int(k) < 1 for k in sizes):
        raise InvalidArgument("sizes must be positive")
    if not pairwise_disjoint(rays):
        raise InvalidArgument("rays must be pairwise vertex-disjoint")
    for r in rays:
        if not r.is_valid_in(g):
            raise InvalidArgument(f"ray {r.vertices[:3]!r}... is not a ray of the graph")
    adj = {v: set(nb) for v, nb in g.adj.items()}
    depth = dict(g.depth)
    prov = None if g.provenance is None else dict(g.provenance)
    records = []
    for i, (r, k) in enumerate(zip(rays, sizes)):
        for ell in range(int(k)):
            label = ("lift", i, ell)
            new = [(label, n) for n in range(len(r))]
            for n, v in enumerate(new):
                if v in adj:
                    raise InvalidArgument(f"vertex id {v!r} already taken")
                adj[v] = set()
                depth[v] = g.depth[r.vertices[n]]
                if prov is not None:
                    prov[v] = v
            for n, v in enumerate(new):
                base = r.vertices[n]
                adj[v].add(base)
                adj[base].add(v)
                if n + 1 < len(new):
                    adj[v].add(new[n + 1])
                    adj[new[n + 1]].add(v)
            records.append({"base": i, "index": ell, "vertices": [encode_id(v) for v in new]})
    meta = dict(g.meta)
    meta["lifted_rays"] = records
    meta["lift_sizes"] = [int(k) for k in sizes]
    return TruncatedGraph({v: frozenset(nb) for v, nb in adj.items()}, depth, prov, meta)
