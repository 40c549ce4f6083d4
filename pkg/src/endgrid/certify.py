"""Certificates for the obstruction and affirmative pipelines.

Every certificate is parameter-relative: it speaks about one truncation
with explicit thresholds and never about the infinite graph.
"""
from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ._ids import encode_id, sort_ids, vkey
from .bipartite import (BipartiteLK, ScaleFamily, core_problems, dominance,
                        down_closed_subtrees, small_core, verify_scale)
from .ends import (EndSurrogate, StarNotFound, StarOfRays, assemble_star,
                   comb_problems, greedy_core, normal_tree, star_problems)
from .errors import InternalError, InvalidArgument
from .flow import INF, MaxFlow, disjoint_paths, separates
from .graph import Ray, TruncatedGraph, pairwise_disjoint
from .inflation import horizontal_ray
from .trees import SparseTGraph, attachment_sets

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
KINDS = ("attachment-bound", "scale-obstruction", "star-found", "star-not-found", "pipeline-star")


@dataclass(frozen=True)
class Certificate:
    kind: str
    parameters: dict
    witnesses: dict
    verdict: str  # pass, fail, found, not-found or inconclusive
    payload: Optional[object] = field(default=None, compare=False)  # in-memory witness objects

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown certificate kind {self.kind!r}")

    @property
    def ok(self) -> bool:
        return self.verdict in ("pass", "found")

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "type": "certificate", "kind": self.kind,
                "parameters": self.parameters, "witnesses": self.witnesses,
                "verdict": self.verdict}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    def summary(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in sorted(self.parameters.items())
                           if isinstance(v, (int, str)))
        return f"{self.kind}: {self.verdict} ({params})"


def _ids(vs) -> list:
    return [encode_id(v) for v in vs]


def star_json(star: StarOfRays) -> dict:
    return {"centre": _ids(star.centre.vertices),
            "leaves": [_ids(r.vertices) for r in star.leaves],
            "families": [[_ids(p) for p in fam] for fam in star.path_families]}


# -- attachment bound -----------------------------------------------------


def certify_attachment_bound(h: TruncatedGraph, g: SparseTGraph, sigma: Optional[int] = None,
                             s: Optional[dict] = None, m: Optional[int] = None) -> Certificate:
    """Bound the disjoint paths from above a level-``sigma`` node down past it.

    For every node t at level ``sigma`` and every component D of the
    columns above t (t's own column removed), the number of disjoint paths
    from D into the columns strictly below t is computed by max-flow and
    compared with ``|s_t|**2``.  With ``m``, the certificate also states a
    leaf budget: no star with a centre in the columns below ``sigma`` and
    ``m`` paths per leaf has more leaves than that.
    """
    tree = g.tree
    if h.provenance is None:
        raise InvalidArgument("graph carries no provenance")
    depth = h.max_depth
    sigma = tree.finite_height // 2 if sigma is None else sigma
    if not 0 <= sigma <= tree.finite_height:
        raise InvalidArgument(f"sigma must lie in 0..{tree.finite_height}")
    if sigma > depth:
        raise InvalidArgument(f"truncation depth {depth} is below sigma={sigma}")
    s = attachment_sets(g) if s is None else s
    missing = [t for t in tree.finite_nodes if t not in s]
    if missing:
        raise InvalidArgument(f"attachment map misses {sort_ids(missing)[:3]!r}")
    if m is not None and m < 1:
        raise InvalidArgument("m must be positive")

    col = {}
    for v in h.adj:
        col.setdefault(h.provenance[v][0], []).append(v)
    rows, verdict, failures = [], "pass", []
    budget = len(tree.below_level(sigma)) - 1 if m is not None else None
    for t in sort_ids(tree.level(sigma)):
        up = tree.up_closure(t)
        below = set(v for x in tree.strict_down(t) for v in col.get(x, ()))
        region = [v for x in up if x != t for v in col.get(x, ())]
        bound = len(s[t]) ** 2
        comp_rows, f_t = [], 0
        for comp in h.components(within=region):
            sub = h.induced(set(comp) | below)
            pk = disjoint_paths(sub, comp, below, len(comp) + 1)
            if pk.cut is None or len(pk.cut) != pk.count or not separates(sub, pk.cut, comp, below):
                raise InternalError("max-flow cut failed to revalidate")
            f_t = max(f_t, pk.count)
            row = {"component_min": encode_id(sort_ids(comp)[0]), "size": len(comp),
                   "paths": pk.count, "cut": _ids(sort_ids(pk.cut))}
            if pk.count > bound:
                row["witness_paths"] = [_ids(p) for p in pk.paths]
                failures.append(encode_id(t))
                verdict = "fail"
            comp_rows.append(row)
        entry = {"node": encode_id(t), "attachment": _ids(sort_ids(s[t])),
                 "bound": bound, "max_paths": f_t, "components": comp_rows}
        if m is not None:
            ncols = len(up)
            b_t = min(ncols, max(1, (depth + 1) // (m - f_t))) if m > f_t else ncols
            entry["leaf_budget"] = b_t
            budget += b_t
        rows.append(entry)
    params = {"depth": depth, "sigma": sigma}
    wit = {"nodes": rows, "failures": failures}
    if m is not None:
        params["m"] = m
        wit["leaf_budget"] = budget
    return Certificate("attachment-bound", params, wit, verdict, payload=budget)


# -- bounded star search --------------------------------------------------


def _star_flow(h: TruncatedGraph, centre: Ray, leaves: Sequence[Ray], m: int, strict: bool):
    net = MaxFlow()
    src, snk = ("__source__",), ("__sink__",)
    net.add_node(src)
    net.add_node(snk)
    cset = centre.vertex_set
    leaf_of = {}
    for i, r in enumerate(leaves):
        for v in r.vertices:
            leaf_of[v] = i
    for v in h.vertices:
        if v in cset:
            net.add_arc(("in", v), snk, 1 if strict else INF)
        elif v not in leaf_of:
            net.add_arc(("in", v), ("out", v), 1)
    for i, r in enumerate(leaves):
        net.add_arc(src, ("leaf", i), m)
        for v in r.vertices:
            net.add_arc(("leaf", i), ("out", v), 1)
    for v in h.vertices:
        if v in cset:
            continue
        for u in h.neighbours(v):
            if u not in leaf_of:
                net.add_arc(("out", v), ("in", u), 1)
    value = net.run(src, snk, limit=m * len(leaves))
    return value, net


def _families_from_flow(net, n_leaves: int) -> tuple:
    fams = [[] for _ in range(n_leaves)]
    for walk in net.decompose(("__source__",), ("__sink__",)):
        i = walk[1][1]
        verts = [walk[2][1]] + [x[1] for x in walk[3:-1] if x[0] == "in"]
        fams[i].append(tuple(verts))
    return tuple(tuple(sorted(f, key=lambda p: [vkey(x) for x in p])) for f in fams)


def default_centres(h: TruncatedGraph, rays: Sequence[Ray], branch_budget: int = 8) -> list:
    """Supplied rays, then frontier branches of depth-first trees rooted on them."""
    out = list(rays)
    seen = {r.vertices for r in rays}
    extra = 0
    for r in rays:
        comp = next(c for c in h.components() if r.vertices[0] in c)
        tree = normal_tree(h.induced(comp), [r.vertices[0]])
        for v in tree.order:
            if extra >= branch_budget:
                return out
            if v in h.frontier:
                b = tree.branch_to(v)
                if b not in seen:
                    seen.add(b)
                    out.append(Ray(b))
                    extra += 1
    return out


def search_star(h: TruncatedGraph, rays: Sequence[Ray], k: int, m: int,
                centres: Optional[Sequence[Ray]] = None, budget: int = 20000) -> Certificate:
    """Exhaustive bounded search for a star of rays with ``k`` leaves, ``m`` paths each.

    Leaves are drawn from ``rays``; centres from ``centres`` (default: the
    rays plus a few depth-first branches).  Each leaf set is tested by one
    max-flow in two capacity regimes for the centre vertices: one path per
    centre vertex overall (enough for a star) and unlimited (necessary for
    one).  When they disagree the leaf set is undecided, and an undecided
    set or an exhausted ``budget`` makes the verdict inconclusive.
    """
    if k < 1 or m < 1:
        raise InvalidArgument("k and m must be positive")
    if not pairwise_disjoint(rays):
        raise InvalidArgument("rays must be pairwise disjoint")
    centres = default_centres(h, rays) if centres is None else list(centres)
    params = {"depth": h.max_depth, "k": k, "m": m, "centres": len(centres),
              "candidate_rays": len(rays)}
    calls, undecided, exhausted = 0, 0, []
    for ci, centre in enumerate(centres):
        cands = [r for r in rays if not (r.vertex_set & centre.vertex_set)]
        if len(cands) < k:
            exhausted.append({"centre": ci, "leaf_candidates": len(cands), "sets_tested": 0})
            continue
        tested = 0
        dead = []  # relaxed-infeasible index sets, all supersets pruned

        def feasible(idx):
            nonlocal calls, undecided, tested
            calls += 1
            tested += 1
            leaves = [cands[i] for i in idx]
            need = m * len(leaves)
            relaxed, net = _star_flow(h, centre, leaves, m, strict=False)
            if relaxed < need:
                return "no", None
            if m == 1:
                return "yes", net
            # the unrestricted flow often decomposes into a valid star already
            if len(leaves) == k:
                trial = StarOfRays(centre, tuple(leaves), _families_from_flow(net, len(leaves)))
                if not star_problems(h, trial, m):
                    return "yes", net
            strict, net = _star_flow(h, centre, leaves, m, strict=True)
            if strict >= need:
                return "yes", net
            return "maybe", None

        found = None
        stack = [()]
        while stack and found is None:
            idx = stack.pop()
            if calls > budget:
                break
            if idx and any(set(d) <= set(idx) for d in dead):
                continue
            if idx:
                res, net = feasible(idx)
                if res == "no":
                    dead.append(idx)
                    continue
                if len(idx) == k:
                    if res == "yes":
                        found = (idx, net)
                    else:
                        undecided += 1
                    continue
            start = idx[-1] + 1 if idx else 0
            for j in reversed(range(start, len(cands) - (k - len(idx)) + 1)):
                stack.append(idx + (j,))
        if found is not None:
            idx, net = found
            leaves = tuple(cands[i] for i in idx)
            star = StarOfRays(centre, leaves, _families_from_flow(net, len(leaves)))
            problems = star_problems(h, star, m)
            if problems:
                raise InternalError(f"search produced an invalid star: {problems[:3]}")
            return Certificate("star-found", params, {"star": star_json(star), "centre_index": ci,
                                                      "flow_calls": calls}, "found", payload=star)
        exhausted.append({"centre": ci, "leaf_candidates": len(cands), "sets_tested": tested})
        if calls > budget:
            break
    complete = calls <= budget and undecided == 0 and len(exhausted) == len(centres)
    wit = {"exhausted": exhausted, "flow_calls": calls, "undecided_sets": undecided}
    return Certificate("star-not-found", params, wit, "not-found" if complete else "inconclusive")


# -- scale obstruction ----------------------------------------------------


def certify_scale_obstruction(h: TruncatedGraph, g: SparseTGraph, scale: ScaleFamily,
                              a: int, d: int, mode: str = "exact", sample: int = 500,
                              seed: int = 0) -> Certificate:
    """Count, per small down-closed subtree R, the tops with ``d`` ladder rungs into R.

    Rungs are read off the inflation's edges and each count is confirmed by
    a max-flow from the top's column into R's columns.  For every top
    counted, the bound function of R must fail to lie below the top's
    function modulo the ideal; the largest count is the exception bound.
    """
    if not verify_scale(scale).axiom1:
        raise InvalidArgument("family is not increasing modulo its ideal")
    tree = g.tree
    if h.provenance is None:
        raise InvalidArgument("graph carries no provenance")
    col = {}
    for v in h.adj:
        col.setdefault(h.provenance[v][0], []).append(v)
    rungs = {}
    for x in sort_ids(tree.tops):
        rungs[x] = {h.provenance[u][0] for v in col[x] for u in h.adj[v]
                    if h.provenance[u][0] != x}
    degenerate = len(tree.tops) <= 1 or frozenset(range(d - 1)) in scale.ideal
    limit = None if mode == "exact" else sample
    rows, worst, passed = [], 0, True
    for sub in down_closed_subtrees(tree, a, limit=limit, seed=seed):
        sub_cols = set(v for t in sub for v in col.get(t, ()))
        gvec = [0] * scale.index_length
        for t in sub:
            for n, val in enumerate(t):
                gvec[n] = max(gvec[n], val + 1)
        inside, captured = {}, []
        for x in sort_ids(tree.tops):
            cnt = len(rungs[x] & sub)
            pk = disjoint_paths(h.induced(sub_cols | set(col[x])), col[x], sub_cols, cnt + 1)
            if pk.count != cnt:
                raise InternalError(f"flow finds {pk.count} rungs from {x!r}, edge count {cnt}")
            inside[x.tag] = cnt
            if cnt >= d:
                captured.append(x.tag)
        undominated = [i for i, f in enumerate(scale.functions)
                       if not dominance(gvec, f, scale.ideal)]
        if not degenerate and not set(captured) <= set(undominated):
            passed = False
        worst = max(worst, len(captured))
        rows.append({"subtree": _ids(sort_ids(sub)), "bound_function": gvec,
                     "rungs_inside": [inside[i] for i in sorted(inside)],
                     "captured": captured, "undominated": undominated})
    params = {"depth": h.max_depth, "a": a, "d": d, "mode": mode, "tops": len(tree.tops)}
    wit = {"subtrees": rows, "exception_bound": worst, "degenerate": degenerate}
    return Certificate("scale-obstruction", params, wit, "pass" if passed else "fail", payload=worst)


# -- affirmative pipeline -------------------------------------------------


def affirmative_pipeline(e, rays: Sequence[Ray], m: int, a: int, k: int,
                         rounds_cap: int = 10, mode: str = "auto") -> Certificate:
    """Greedy core, then a small core of combs, then star assembly.

    Combs are contracted to large-side vertices listing their teeth in
    core insertion order; the captured combs are handed to star assembly.
    """
    h = e.deepest if isinstance(e, EndSurrogate) else e
    if len(rays) < k:
        raise InvalidArgument(f"need at least k={k} rays, got {len(rays)}")
    if not pairwise_disjoint(rays):
        raise InvalidArgument("rays must be pairwise disjoint")
    params = {"depth": h.max_depth, "m": m, "a": a, "k": k}
    trace = {}

    def fail(stage, msg):
        trace["failed_stage"] = stage
        trace["reason"] = msg
        return Certificate("pipeline-star", params, trace, "fail")

    gc = greedy_core(h, rays, m, rounds_cap)
    trace["greedy_core"] = {"rounds": len(gc.trace), "combs_per_round": list(gc.trace),
                            "core_sizes": list(gc.core_sizes), "stabilized": gc.stabilized}
    # combs of round r were packed against the core as it stood before that round
    for rnd in sorted(set(gc.rounds_by_comb)):
        target = gc.core_order[: gc.core_sizes[rnd]]
        batch = [c for r, c in zip(gc.rounds_by_comb, gc.combs) if r == rnd]
        problems = comb_problems(h, target, batch)
        if problems:
            raise InternalError(f"greedy core produced an invalid comb: {problems[0]}")
    combs = list(gc.combs)
    if combs:
        pos = {v: i for i, v in enumerate(gc.core_order)}
        side_b = tuple(("comb", i) for i in range(len(combs)))
        nbrs = {("comb", i): tuple(sorted(c.teeth, key=pos.__getitem__))
                for i, c in enumerate(combs)}
        bp = BipartiteLK(gc.core_order, side_b, nbrs, m)
        if a < m:
            return fail("small_core", f"core budget a={a} is below m={m}")
        core = small_core(bp, a, k, mode)
        if core is None:
            return fail("small_core", f"no core of {a} vertices captures {k} combs")
        problems = core_problems(bp, core, a, k)
        if problems:
            raise InternalError(f"small core failed validation: {problems[0]}")
        kept = [combs[b[1]] for b in core.b_prime]
        trace["small_core"] = {"a_prime": _ids(core.a_prime), "captured": [b[1] for b in core.b_prime],
                               "exact": core.exact}
    else:
        kept = []
        trace["small_core"] = {"skipped": "no combs to contract"}
    try:
        star = assemble_star(h, gc.core, kept, k, paths_min=1)
    except StarNotFound as exc:
        trace["assemble_star"] = exc.counts
        return fail("assemble_star", str(exc))
    problems = star_problems(h, star, 1)
    if problems:
        raise InternalError(f"assembled star failed validation: {problems[0]}")
    trace["assemble_star"] = {"leaves": len(star)}
    trace["star"] = star_json(star)
    return Certificate("pipeline-star", params, trace, "pass", payload=star)


def horizontal_leaf_rays(h: TruncatedGraph, nodes) -> list:
    return [horizontal_ray(h, t) for t in sort_ids(nodes)]
