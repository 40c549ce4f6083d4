"""Integer max-flow and vertex-disjoint path packing with Menger certificates.

Augmenting paths are found by breadth-first search over arcs in insertion
order; callers insert arcs in sorted vertex order, so the lowest-id
shortest augmenting path is always taken first and results are
reproducible.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional

from ._ids import sort_ids
from .graph import Ray, TruncatedGraph

INF = 10**9  # effectively unbounded; integer so flow arithmetic stays exact


class MaxFlow:
    """Edmonds-Karp on a small directed network with integer capacities."""

    def __init__(self):
        self.cap: dict = {}
        self.out: dict = {}

    def add_node(self, u):
        if u not in self.out:
            self.out[u] = []

    def add_arc(self, u, v, cap=1):
        self.add_node(u)
        self.add_node(v)
        if (u, v) not in self.cap:
            self.out[u].append(v)
            self.cap[(u, v)] = 0
        if (v, u) not in self.cap:
            self.out[v].append(u)
            self.cap[(v, u)] = 0
        self.cap[(u, v)] += cap

    def _augment(self, s, t) -> bool:
        prev = {s: None}
        queue = deque([s])
        while queue and t not in prev:
            u = queue.popleft()
            for v in self.out[u]:
                if v not in prev and self.cap[(u, v)] > 0:
                    prev[v] = u
                    queue.append(v)
        if t not in prev:
            return False
        v = t
        while prev[v] is not None:
            u = prev[v]
            self.cap[(u, v)] -= 1
            self.cap[(v, u)] += 1
            v = u
        return True

    def run(self, s, t, limit=None) -> int:
        """Push unit augmentations until none remain or ``limit`` is hit."""
        self._orig = dict(self.cap)
        value = 0
        while limit is None or value < limit:
            if not self._augment(s, t):
                break
            value += 1
        return value

    def flow_on(self, u, v) -> int:
        return max(0, self._orig[(u, v)] - self.cap[(u, v)])

    def reachable(self, s) -> set:
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in self.out[u]:
                if v not in seen and self.cap[(u, v)] > 0:
                    seen.add(v)
                    queue.append(v)
        return seen

    def decompose(self, s, t) -> list:
        """Split the current flow into s-t walks (each a node list)."""
        rest = {}
        for (u, v), c in self._orig.items():
            f = c - self.cap[(u, v)]
            if f > 0 and c > 0:
                rest[(u, v)] = f
        walks = []
        while True:
            u, walk = s, [s]
            while u != t:
                nxt = next((v for v in self.out[u] if rest.get((u, v), 0) > 0), None)
                if nxt is None:
                    return walks
                rest[(u, nxt)] -= 1
                walk.append(nxt)
                u = nxt
            walks.append(walk)


@dataclass(frozen=True)
class PathPacking:
    """Result of :func:`disjoint_paths`.

    ``cut`` is filled exactly when fewer than the requested ``k`` paths
    exist; it then has the same size as ``paths`` and separates source from
    target.
    """

    paths: tuple
    cut: Optional[frozenset]
    requested: int

    @property
    def count(self) -> int:
        return len(self.paths)


_S, _T = ("__source__",), ("__sink__",)


def _as_set(x) -> set:
    if isinstance(x, Ray):
        return set(x.vertices)
    return set(x)


def _trim(walk, a_set, b_set):
    last_a = max(i for i, v in enumerate(walk) if v in a_set)
    walk = walk[last_a:]
    first_b = min(i for i, v in enumerate(walk) if v in b_set)
    return tuple(walk[: first_b + 1])


def disjoint_paths(g: TruncatedGraph, source, target, k: int,
                   blocked: Iterable = ()) -> PathPacking:
    """Up to ``k`` pairwise vertex-disjoint source-target paths.

    Each path meets the source set only in its first vertex and the target
    set only in its last.  Vertices shared by source and target count as
    trivial one-vertex paths.  Vertices in ``blocked`` are never used.
    """
    blocked = set(blocked)
    a_set = _as_set(source) - blocked
    b_set = _as_set(target) - blocked
    shared = sort_ids(a_set & b_set)
    trivial = [(v,) for v in shared[:k]]
    need = k - len(trivial)
    used = set(shared)
    a_rest, b_rest = a_set - used, b_set - used
    if need <= 0 or not a_rest or not b_rest:
        found = list(trivial)
        if len(found) < k:
            return PathPacking(tuple(found), frozenset(shared), k)
        return PathPacking(tuple(found), None, k)

    net = MaxFlow()
    live = [v for v in g.vertices if v not in blocked and v not in used]
    live_set = set(live)
    net.add_node(_S)
    net.add_node(_T)
    for v in live:
        net.add_arc(("in", v), ("out", v), 1)
    for v in sort_ids(a_rest):
        net.add_arc(_S, ("in", v), INF)
    for v in live:
        for u in g.neighbours(v):
            if u in live_set:
                net.add_arc(("out", v), ("in", u), INF)
    for v in sort_ids(b_rest):
        net.add_arc(("out", v), _T, INF)
    net.run(_S, _T, limit=need)

    paths = list(trivial)
    for walk in net.decompose(_S, _T):
        verts = [n[1] for n in walk[1:-1] if n[0] == "in"]
        paths.append(_trim(verts, a_rest, b_rest))
    if len(paths) >= k:
        return PathPacking(tuple(paths[:k]), None, k)
    reach = net.reachable(_S)
    cut = {v for v in live if ("in", v) in reach and ("out", v) not in reach}
    cut.update(shared)
    return PathPacking(tuple(paths), frozenset(cut), k)


def separates(g: TruncatedGraph, cut, source, target) -> bool:
    """True if removing ``cut`` leaves no source-target path."""
    cut = set(cut)
    a_set = _as_set(source) - cut
    b_set = _as_set(target) - cut
    if a_set & b_set:
        return False
    seen = set(a_set)
    queue = deque(a_set)
    while queue:
        v = queue.popleft()
        if v in b_set:
            return False
        for u in g.adj[v]:
            if u not in cut and u not in seen:
                seen.add(u)
                queue.append(u)
    return True
