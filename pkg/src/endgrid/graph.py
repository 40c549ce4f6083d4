"""Finite truncations of lazily generated graphs, and rays inside them."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Optional

from ._ids import sort_ids, vkey
from .errors import InvalidArgument

Vertex = Hashable


@dataclass(frozen=True, eq=False)
class TruncatedGraph:
    """One finite slice of an infinite graph.

    ``adj`` is symmetric without loops.  ``depth`` labels every vertex;
    the frontier is the set of vertices of maximal depth.  ``provenance``
    (when present) maps each vertex to its ``(tree node, ray index)`` pair.
    ``meta`` records how the slice was generated so deeper slices can be
    regenerated, plus any truncation notices.
    """

    adj: Mapping[Vertex, frozenset]
    depth: Mapping[Vertex, int]
    provenance: Optional[Mapping[Vertex, tuple]] = None
    meta: Mapping = field(default_factory=dict)

    @classmethod
    def from_edges(cls, vertices: Iterable, edges: Iterable, depth=None,
                   provenance=None, meta=None) -> "TruncatedGraph":
        adj = {v: set() for v in vertices}
        for u, v in edges:
            if u not in adj or v not in adj:
                missing = u if u not in adj else v
                raise InvalidArgument(f"edge {u!r}-{v!r} references missing vertex {missing!r}")
            if u == v:
                raise InvalidArgument(f"loop at {u!r}")
            adj[u].add(v)
            adj[v].add(u)
        if depth is None:
            depth = {v: 0 for v in adj}
        return cls({v: frozenset(n) for v, n in adj.items()}, dict(depth),
                   None if provenance is None else dict(provenance), dict(meta or {}))

    def __post_init__(self):
        if set(self.depth) != set(self.adj):
            raise InvalidArgument("depth labels must cover exactly the vertex set")
        for v, nb in self.adj.items():
            if v in nb:
                raise InvalidArgument(f"loop at {v!r}")
            for u in nb:
                if u not in self.adj or v not in self.adj[u]:
                    raise InvalidArgument(f"asymmetric or dangling edge {v!r}-{u!r}")

    @cached_property
    def vertices(self) -> tuple:
        return tuple(sort_ids(self.adj))

    @cached_property
    def edges(self) -> tuple:
        out = []
        for u in self.vertices:
            ku = vkey(u)
            for v in self.adj[u]:
                if ku < vkey(v):
                    out.append((u, v))
        return tuple(sorted(out, key=lambda e: (vkey(e[0]), vkey(e[1]))))

    @cached_property
    def max_depth(self) -> int:
        return max(self.depth.values(), default=0)

    @cached_property
    def frontier(self) -> frozenset:
        return frozenset(v for v, d in self.depth.items() if d == self.max_depth)

    def neighbours(self, v) -> list:
        return sort_ids(self.adj[v])

    def __len__(self):
        return len(self.adj)

    def __contains__(self, v):
        return v in self.adj

    def induced(self, keep: Iterable) -> "TruncatedGraph":
        keep = set(keep)
        adj = {v: frozenset(u for u in self.adj[v] if u in keep) for v in self.adj if v in keep}
        prov = None if self.provenance is None else {v: self.provenance[v] for v in adj}
        return TruncatedGraph(adj, {v: self.depth[v] for v in adj}, prov, dict(self.meta))

    def without(self, drop: Iterable) -> "TruncatedGraph":
        drop = set(drop)
        return self.induced(v for v in self.adj if v not in drop)

    def components(self, within: Optional[Iterable] = None) -> list:
        """Connected components (of the induced subgraph on ``within``), sorted."""
        allowed = set(self.adj) if within is None else set(within)
        seen, comps = set(), []
        for s in sort_ids(allowed):
            if s in seen:
                continue
            comp, queue = [], deque([s])
            seen.add(s)
            while queue:
                v = queue.popleft()
                comp.append(v)
                for u in self.adj[v]:
                    if u in allowed and u not in seen:
                        seen.add(u)
                        queue.append(u)
            comps.append(frozenset(comp))
        return comps

    def same_structure(self, other: "TruncatedGraph") -> bool:
        return (self.vertices == other.vertices and self.edges == other.edges
                and dict(self.depth) == dict(other.depth)
                and (self.provenance or None) == (other.provenance or None))


@dataclass(frozen=True)
class Ray:
    """A finite truncation v_0, v_1, ..., v_k of a ray."""

    vertices: tuple
    owner: Optional[Hashable] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        if not self.vertices:
            raise InvalidArgument("a ray needs at least one vertex")
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidArgument("ray vertices must be pairwise distinct")

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    @cached_property
    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def is_valid_in(self, g: TruncatedGraph) -> bool:
        if any(v not in g for v in self.vertices):
            return False
        return all(b in g.adj[a] for a, b in zip(self.vertices, self.vertices[1:]))

    def reaches_frontier(self, g: TruncatedGraph) -> bool:
        return self.vertices[-1] in g.frontier

    def restricted_to(self, g: TruncatedGraph) -> "Ray":
        """Longest initial segment of this ray that lies in ``g``."""
        out = []
        for v in self.vertices:
            if v not in g:
                break
            out.append(v)
        return Ray(tuple(out), self.owner)


def check_path(g: TruncatedGraph, path) -> bool:
    return (len(path) > 0 and len(set(path)) == len(path)
            and all(v in g for v in path)
            and all(b in g.adj[a] for a, b in zip(path, path[1:])))


def pairwise_disjoint(rays) -> bool:
    seen = set()
    for r in rays:
        vs = set(r)
        if vs & seen:
            return False
        seen |= vs
    return True
