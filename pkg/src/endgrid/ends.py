"""End surrogates on finite truncations: combs, cores, stars and ray graphs.

"Infinitely many" becomes an explicit threshold (``m`` paths, ``k``
leaves) everywhere; results are always relative to the truncation they
were computed on.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from ._ids import sort_ids, vkey
from .errors import InvalidArgument
from .flow import PathPacking, disjoint_paths, separates  # noqa: F401  (re-exported)
from .graph import Ray, TruncatedGraph, check_path, pairwise_disjoint

log = logging.getLogger(__name__)


# -- witnesses ------------------------------------------------------------


@dataclass(frozen=True)
class Comb:
    spine: Ray
    paths: tuple  # spine -> U paths, each a vertex tuple
    teeth: tuple

    @property
    def interior(self) -> frozenset:
        verts = set(self.spine.vertices)
        for p in self.paths:
            verts.update(p[:-1])
        return frozenset(verts)


@dataclass(frozen=True)
class StarOfRays:
    centre: Ray
    leaves: tuple
    path_families: tuple  # per leaf, a tuple of leaf -> centre paths

    def __len__(self):
        return len(self.leaves)


@dataclass(frozen=True)
class RayGraph:
    rays: tuple
    edges: dict  # (i, j) -> witness paths
    multiplicity: int
    classification: dict

    @property
    def edge_list(self) -> list:
        return sorted(self.edges)


class StarNotFound(Exception):
    """Too few combs survive star assembly."""

    def __init__(self, message, counts):
        super().__init__(message)
        self.counts = counts


@dataclass
class EndSurrogate:
    """A depth-indexed family of nested truncations of one graph."""

    generate: Callable[[int], TruncatedGraph]
    schedule: tuple
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.schedule = tuple(self.schedule)
        if not self.schedule or any(a >= b for a, b in zip(self.schedule, self.schedule[1:])):
            raise InvalidArgument("depth schedule must be nonempty and strictly increasing")

    def at(self, depth: int) -> TruncatedGraph:
        if depth not in self._cache:
            self._cache[depth] = self.generate(depth)
        return self._cache[depth]

    @property
    def deepest(self) -> TruncatedGraph:
        return self.at(self.schedule[-1])


# -- Menger-based checks --------------------------------------------------


@dataclass(frozen=True)
class EquivalenceResult:
    found: bool
    depth: Optional[int]
    paths: tuple
    tried: tuple


def equivalence_check(e: EndSurrogate, r1: Ray, r2: Ray, k: int) -> EquivalenceResult:
    """First scheduled depth at which ``k`` disjoint r1-r2 paths exist."""
    tried = []
    for d in e.schedule:
        h = e.at(d)
        a, b = r1.restricted_to(h), r2.restricted_to(h)
        pk = disjoint_paths(h, a, b, k)
        tried.append((d, pk.count))
        if pk.count >= k:
            return EquivalenceResult(True, d, pk.paths, tuple(tried))
    return EquivalenceResult(False, None, (), tuple(tried))


def frontier_ray_packing(g: TruncatedGraph) -> PathPacking:
    """Maximum family of disjoint paths from depth 0 to the frontier."""
    start = [v for v in g.adj if g.depth[v] == 0]
    return disjoint_paths(g, start, g.frontier, len(g.adj))


def dominators(g: TruncatedGraph, r: Ray, k: int) -> frozenset:
    """Vertices off ``r`` that send ``k`` paths to ``r`` disjoint except at the start."""
    if not r.vertices:
        raise InvalidArgument("empty ray")
    ray_set = r.vertex_set
    out = []
    for v in g.vertices:
        if v in ray_set or len(g.adj[v]) < k:
            continue
        pk = disjoint_paths(g, g.adj[v], ray_set, k, blocked={v})
        if pk.count >= k:
            out.append(v)
    return frozenset(out)


# -- combs and the greedy core --------------------------------------------


def find_combs(g: TruncatedGraph, u, candidate_spines: Sequence[Ray], m: int,
               blocked=()) -> list:
    """Greedy family of interior-disjoint combs with at least ``m`` teeth each.

    Spines are tried in the given order.  Paths first avoid the other
    candidate spines; a spine that only works by crossing them is then
    retried without that restriction.
    """
    if m < 1:
        raise InvalidArgument("teeth threshold m must be positive")
    u = frozenset(u)
    taken = set(blocked)
    combs = []
    for idx, spine in enumerate(candidate_spines):
        if spine.vertex_set & u:
            raise InvalidArgument("candidate spines must be disjoint from U")
        if spine.vertex_set & taken:
            continue
        others = set()
        for j, s in enumerate(candidate_spines):
            if j != idx:
                others |= s.vertex_set
        pk = disjoint_paths(g, spine, u, m, blocked=taken | (others - spine.vertex_set))
        if pk.count < m:
            pk = disjoint_paths(g, spine, u, m, blocked=taken)
        if pk.count < m:
            continue
        paths = tuple(sorted(pk.paths, key=lambda p: [vkey(x) for x in p]))
        comb = Comb(spine, paths, tuple(p[-1] for p in paths))
        taken |= comb.interior
        combs.append(comb)
    return combs


def comb_problems(g: TruncatedGraph, u, combs: Sequence[Comb]) -> list:
    """Independent check of the comb invariants; empty list means valid."""
    u = frozenset(u)
    bad = []
    for i, c in enumerate(combs):
        if not c.spine.is_valid_in(g):
            bad.append(f"comb {i}: spine is not a ray of the graph")
        if c.spine.vertex_set & u:
            bad.append(f"comb {i}: spine meets U")
        seen = set()
        for p in c.paths:
            if not check_path(g, p):
                bad.append(f"comb {i}: invalid path {p!r}")
                continue
            if p[0] not in c.spine.vertex_set or any(v in c.spine.vertex_set for v in p[1:]):
                bad.append(f"comb {i}: path must meet the spine exactly in its first vertex")
            if p[-1] not in u or any(v in u for v in p[:-1]):
                bad.append(f"comb {i}: path must meet U exactly in its last vertex")
            if seen & set(p):
                bad.append(f"comb {i}: paths are not disjoint")
            seen |= set(p)
    for i in range(len(combs)):
        for j in range(i + 1, len(combs)):
            if combs[i].interior & combs[j].interior:
                bad.append(f"combs {i} and {j} have overlapping interiors")
    return bad


@dataclass(frozen=True)
class GreedyCore:
    core: frozenset
    core_order: tuple  # insertion order of the core vertices
    combs: tuple
    trace: tuple  # combs packed per round
    core_sizes: tuple  # |U_i| per round, starting with |U_0|
    stabilized: bool
    rounds_by_comb: tuple  # round in which each comb was packed


def greedy_core(g, rays: Sequence[Ray], m: int, rounds_cap: int = 10) -> GreedyCore:
    """Grow U from the first ray by repeatedly packing combs into it.

    Stops when a round packs nothing, when every ray has been used, or at
    ``rounds_cap`` (then ``stabilized`` is False).
    """
    if isinstance(g, EndSurrogate):
        g = g.deepest
    if not rays:
        raise InvalidArgument("need at least one ray")
    if not pairwise_disjoint(rays):
        raise InvalidArgument("rays must be pairwise disjoint")
    order = list(rays[0].vertices)
    core = set(order)
    unused = list(rays[1:])
    combs, trace, sizes, rounds_of = [], [], [len(core)], []
    stabilized = False
    for rnd in range(rounds_cap):
        spines = [r for r in unused if not (r.vertex_set & core)]
        found = find_combs(g, core, spines, m)
        trace.append(len(found))
        for c in found:
            combs.append(c)
            rounds_of.append(rnd)
            for v in list(c.spine.vertices) + [x for p in c.paths for x in p]:
                if v not in core:
                    core.add(v)
                    order.append(v)
        packed = {c.spine for c in found}
        unused = [r for r in unused if r not in packed]
        sizes.append(len(core))
        log.debug("greedy round %d packed %d combs, |U|=%d", rnd, len(found), len(core))
        if not found or not unused:
            stabilized = True
            break
    return GreedyCore(frozenset(core), tuple(order), tuple(combs), tuple(trace),
                      tuple(sizes), stabilized, tuple(rounds_of))


# -- normal trees and star assembly ---------------------------------------


@dataclass(frozen=True)
class NormalTree:
    root: object
    parent: dict
    order: tuple  # DFS discovery order

    def branch_to(self, v) -> tuple:
        out = [v]
        while out[-1] != self.root:
            out.append(self.parent[out[-1]])
        return tuple(reversed(out))

    def ancestors(self, v) -> set:
        return set(self.branch_to(v))

    def comparable(self, x, y) -> bool:
        return x in self.ancestors(y) or y in self.ancestors(x)

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.order)


def normal_tree(g: TruncatedGraph, u) -> NormalTree:
    """Depth-first search tree of the component containing ``u``, rooted in ``u``.

    DFS trees of finite graphs are normal: every non-tree edge joins a vertex
    to one of its ancestors.
    """
    u = set(u)
    if not u:
        raise InvalidArgument("u must be nonempty")
    root = sort_ids(u)[0]
    parent, order, seen = {}, [root], {root}
    stack = [(root, iter(g.neighbours(root)))]
    while stack:
        v, it = stack[-1]
        nxt = next((w for w in it if w not in seen), None)
        if nxt is None:
            stack.pop()
            continue
        seen.add(nxt)
        parent[nxt] = v
        order.append(nxt)
        stack.append((nxt, iter(g.neighbours(nxt))))
    if not u <= seen:
        raise InvalidArgument("u spans more than one component")
    return NormalTree(root, parent, tuple(order))


def assemble_star(g: TruncatedGraph, u, combs: Sequence[Comb], k: int,
                  paths_min: int = 1) -> StarOfRays:
    """Centre on a normal branch through U and keep the combs it avoids.

    The centre is the frontier-reaching branch of a normal tree rooted in U
    that carries the most teeth (fewest discarded combs, then lowest end
    vertex, break ties).  A surviving comb contributes its spine as a leaf
    and those teeth paths that end on the centre.
    """
    u = frozenset(u)
    for c in combs:
        if not set(c.teeth) <= u:
            raise InvalidArgument("comb teeth must lie in U")
    tree = normal_tree(g, u)
    ends = [v for v in tree.order if v in g.frontier]
    if not ends:
        raise StarNotFound("no frontier-reaching normal branch", {"combs": len(combs), "survivors": 0})
    all_teeth = set(t for c in combs for t in c.teeth)
    best = None
    for end in sort_ids(ends):
        branch = tree.branch_to(end)
        bset = set(branch)
        survivors = []
        for c in combs:
            if c.interior & bset:
                continue
            fam = tuple(p for p in c.paths if p[-1] in bset)
            if len(fam) >= paths_min:
                survivors.append((c, fam))
        key = (-len(bset & all_teeth), len(combs) - len(survivors), vkey(end))
        if best is None or key < best[0]:
            best = (key, branch, survivors)
    _, branch, survivors = best
    counts = {"combs": len(combs), "survivors": len(survivors),
              "discarded": len(combs) - len(survivors), "k": k}
    if len(survivors) < k:
        raise StarNotFound(f"only {len(survivors)} combs survive, need {k}", counts)
    return StarOfRays(Ray(branch), tuple(c.spine for c, _ in survivors),
                      tuple(fam for _, fam in survivors))


def star_problems(g: TruncatedGraph, star: StarOfRays, paths_min: int = 1) -> list:
    """Independent check of the star-of-rays invariants; empty list means valid."""
    bad = []
    rays = [star.centre] + list(star.leaves)
    for i, r in enumerate(rays):
        if not r.is_valid_in(g):
            bad.append(f"ray {i} is not a ray of the graph")
    if not pairwise_disjoint(rays):
        bad.append("rays are not pairwise disjoint")
    if len(star.path_families) != len(star.leaves):
        bad.append("one path family per leaf required")
        return bad
    centre = star.centre.vertex_set
    on_rays = set().union(*(r.vertex_set for r in rays))
    interiors = {}
    endpoint_use = {}
    for j, (leaf, fam) in enumerate(zip(star.leaves, star.path_families)):
        if len(fam) < paths_min:
            bad.append(f"leaf {j}: {len(fam)} paths, need {paths_min}")
        used = set()
        for p in fam:
            if not check_path(g, p) or len(p) < 2:
                bad.append(f"leaf {j}: invalid path {p!r}")
                continue
            if p[0] not in leaf.vertex_set or p[-1] not in centre:
                bad.append(f"leaf {j}: path does not run leaf -> centre")
            if any(v in on_rays for v in p[1:-1]):
                bad.append(f"leaf {j}: path interior meets a ray")
            if used & set(p):
                bad.append(f"leaf {j}: paths in one family are not disjoint")
            used |= set(p)
            for v in p[1:-1]:
                if v in interiors:
                    bad.append(f"paths of leaves {interiors[v]} and {j} share {v!r}")
                interiors[v] = j
            endpoint_use.setdefault(p[0], set()).add(j)
    for v, js in endpoint_use.items():
        if v in interiors:
            bad.append(f"leaf vertex {v!r} is also a path interior")
    return bad


# -- frayed decomposition -------------------------------------------------


@dataclass(frozen=True)
class FrayedResult:
    kind: str  # "star", "frayed_star" or "frayed_comb"
    centre: object  # star/frayed-star centre, or the spine as a tuple
    edges: tuple  # witness subgraph
    leaves: tuple  # leaves, distance-2 leaves or teeth
    meets_threshold: bool

    @property
    def count(self) -> int:
        return len(self.leaves)


def _rooted(adj: Mapping, root):
    children, order, seen = {root: []}, [root], {root}
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for w in sort_ids(adj[v]):
            if w not in seen:
                seen.add(w)
                children[v].append(w)
                children[w] = []
                order.append(w)
    size = {}
    for v in reversed(order):
        size[v] = 1 + sum(size[c] for c in children[v])
    return children, size, len(order)


def frayed_decompose(t, root, threshold: int) -> FrayedResult:
    """Find a star, frayed star or frayed comb of size ``threshold`` in a rooted tree.

    Descend into a child subtree while one has at least ``threshold``
    vertices.  At the first vertex whose subtrees are all smaller, prefer a
    frayed star (counting vertices at distance two), then a plain star; if
    neither is large enough, read a frayed comb off the heavy path.
    """
    adj = t.adj if isinstance(t, TruncatedGraph) else t
    if threshold < 1:
        raise InvalidArgument("threshold must be positive")
    children, size, n = _rooted(adj, root)
    if n != len(adj) or sum(len(c) for c in children.values()) != n - 1:
        raise InvalidArgument("input is not a tree")
    if n < threshold:
        raise InvalidArgument(f"tree has {n} vertices, fewer than threshold {threshold}")

    v, spine = root, [root]
    while True:
        big = [c for c in children[v] if size[c] >= threshold]
        if not big:
            break
        v = sorted(big, key=lambda c: (-size[c], vkey(c)))[0]
        spine.append(v)

    grand = [(c, w) for c in children[v] for w in children[c]]
    if len(grand) >= threshold:
        edges = tuple((v, c) for c in children[v]) + tuple(grand)
        return FrayedResult("frayed_star", v, edges, tuple(w for _, w in grand), True)
    if len(children[v]) >= threshold:
        leaves = tuple(children[v][:threshold])
        return FrayedResult("star", v, tuple((v, c) for c in leaves), leaves, True)

    # extend the spine along the heavy path, stopping before a leaf
    while True:
        inner = [c for c in children[v] if children[c]]
        if not inner:
            break
        v = sorted(inner, key=lambda c: (-size[c], vkey(c)))[0]
        spine.append(v)
    on_spine = set(spine)
    edges = list(zip(spine, spine[1:]))
    teeth = []
    for s in spine:
        off = [c for c in children[s] if c not in on_spine]
        own = len(off)
        best_child = min(off, key=lambda c: (-len(children[c]), vkey(c)), default=None)
        via = len(children[best_child]) if best_child is not None else -1
        if own >= via:
            edges.extend((s, c) for c in off)
            teeth.extend(off)
        else:
            edges.append((s, best_child))
            edges.extend((best_child, w) for w in children[best_child])
            teeth.extend(children[best_child])
    return FrayedResult("frayed_comb", tuple(spine), tuple(edges), tuple(teeth),
                        len(teeth) >= threshold)


# -- ray graphs -----------------------------------------------------------


def ray_graph(g: TruncatedGraph, rays: Sequence[Ray], m: int, threshold: int = 2) -> RayGraph:
    """Graph on ray indices, with an edge where ``m`` independent paths are packed.

    Pairs are processed in index order; every pair's paths avoid all rays
    internally and all earlier witness interiors, so witnesses of distinct
    edges never interfere.
    """
    if m < 1:
        raise InvalidArgument("multiplicity threshold m must be positive")
    if not pairwise_disjoint(rays):
        raise InvalidArgument("rays must be pairwise disjoint")
    all_ray = set().union(*(r.vertex_set for r in rays)) if rays else set()
    used = set()
    edges = {}
    for i in range(len(rays)):
        for j in range(i + 1, len(rays)):
            block = used | (all_ray - rays[i].vertex_set - rays[j].vertex_set)
            pk = disjoint_paths(g, rays[i], rays[j], m, blocked=block)
            if pk.count >= m:
                edges[(i, j)] = pk.paths
                for p in pk.paths:
                    used.update(p[1:-1])
    return RayGraph(tuple(rays), edges, m, _classify(len(rays), edges, threshold))


def _classify(n: int, edges: Mapping, threshold: int) -> dict:
    adj = {i: set() for i in range(n)}
    for i, j in edges:
        adj[i].add(j)
        adj[j].add(i)
    seen, comps = set(), []
    for s in range(n):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    if n == 0 or len(comps) > 1:
        return {"type": "components", "components": comps}
    for c in range(n):
        if n > 1 and len(adj[c]) == n - 1:
            return {"type": "star", "centre": c}
    hub = max(range(n), key=lambda v: (len(adj[v]), -v))
    tree_adj, seen, queue = {v: set() for v in range(n)}, {hub}, [hub]
    while queue:
        v = queue.pop(0)
        for w in sorted(adj[v]):
            if w not in seen:
                seen.add(w)
                tree_adj[v].add(w)
                tree_adj[w].add(v)
                queue.append(w)
    fr = frayed_decompose(tree_adj, hub, min(threshold, n))
    return {"type": fr.kind, "centre": fr.centre, "count": fr.count,
            "meets_threshold": fr.meets_threshold, "spanning_tree_root": hub}
