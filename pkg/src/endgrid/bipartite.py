"""Bipartite (small side, large side) graphs, small cores, and finite scales.

A large-side vertex ``b`` is *captured* by a small-side set ``A'`` when its
first ``d`` listed neighbours all lie in ``A'``.  Cores are searched
exactly when the small side is at most 20 vertices, otherwise by sweeping
prefixes of the small side's insertion order.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from ._ids import Top, sort_ids, vkey
from .errors import InternalError, InvalidArgument
from .trees import OrderTree, SparseTGraph, branch_ladders, level_antichains

EXACT_LIMIT = 20


@dataclass(frozen=True)
class BipartiteLK:
    side_a: tuple
    side_b: tuple
    nbrs: dict  # b -> ordered tuple of side_a members
    d: int = 2

    def __post_init__(self):
        object.__setattr__(self, "side_a", tuple(self.side_a))
        object.__setattr__(self, "side_b", tuple(self.side_b))
        object.__setattr__(self, "nbrs", {b: tuple(n) for b, n in self.nbrs.items()})
        if self.d < 1:
            raise InvalidArgument("d must be positive")
        a_set = set(self.side_a)
        if len(a_set) != len(self.side_a) or len(set(self.side_b)) != len(self.side_b):
            raise InvalidArgument("sides must not repeat vertices")
        if a_set & set(self.side_b):
            raise InvalidArgument("sides must be disjoint")
        if set(self.nbrs) != set(self.side_b):
            raise InvalidArgument("nbrs must list exactly the large side")
        for b, nb in self.nbrs.items():
            if len(nb) < self.d:
                raise InvalidArgument(f"{b!r} has {len(nb)} neighbours, fewer than d={self.d}")
            if len(set(nb)) != len(nb) or not set(nb) <= a_set:
                raise InvalidArgument(f"neighbours of {b!r} must be distinct small-side vertices")

    def key(self, b) -> tuple:
        """The neighbours that decide whether ``b`` is captured."""
        return self.nbrs[b][: self.d]

    def captured(self, a_prime) -> tuple:
        a_prime = set(a_prime)
        return tuple(b for b in self.side_b if set(self.key(b)) <= a_prime)


@dataclass(frozen=True)
class Core:
    a_prime: tuple
    b_prime: tuple
    exact: bool

    @property
    def size(self) -> int:
        return len(self.b_prime)


def core_problems(g: BipartiteLK, core: Core, a: int, b_min: int) -> list:
    """Independent soundness check of a returned core; empty list means valid."""
    bad = []
    a_set = set(core.a_prime)
    if len(a_set) > a:
        bad.append(f"|A'|={len(a_set)} exceeds budget {a}")
    if not a_set <= set(g.side_a):
        bad.append("A' leaves the small side")
    if len(set(core.b_prime)) < b_min:
        bad.append(f"|B'|={len(set(core.b_prime))} below target {b_min}")
    for b in core.b_prime:
        if b not in g.nbrs:
            bad.append(f"{b!r} is not a large-side vertex")
        elif not set(g.nbrs[b][: g.d]) <= a_set:
            bad.append(f"neighbours of {b!r} escape A'")
    return bad


def _canonical(g: BipartiteLK, a_prime) -> tuple:
    return tuple(sort_ids(a_prime))


def _better(cand, best) -> bool:
    """Order cores by more captured, then smaller A', then sorted ids."""
    if best is None:
        return True
    ck = (-len(cand[1]), len(cand[0]), [vkey(x) for x in cand[0]])
    bk = (-len(best[1]), len(best[0]), [vkey(x) for x in best[0]])
    return ck < bk


def _exact(g: BipartiteLK, a: int):
    index = {v: i for i, v in enumerate(g.side_a)}
    masks = sorted({sum(1 << index[x] for x in g.key(b)) for b in g.side_b})
    b_masks = [(b, sum(1 << index[x] for x in g.key(b))) for b in g.side_b]
    # every optimal A' may be shrunk to the union of its captured keys
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for m in masks:
                w = u | m
                if w not in seen and bin(w).count("1") <= a:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    best = None
    for u in seen:
        cap = tuple(b for b, m in b_masks if m & ~u == 0)
        a_prime = _canonical(g, [v for v in g.side_a if u >> index[v] & 1])
        cand = (a_prime, cap)
        if _better(cand, best):
            best = cand
    return best


def _greedy(g: BipartiteLK, a: int):
    best = None
    for i in range(min(a, len(g.side_a)) + 1):
        prefix = g.side_a[:i]
        cand = (_canonical(g, prefix), g.captured(prefix))
        if _better(cand, best):
            best = cand
    return best


def small_core(g: BipartiteLK, a: int, b_min: int, mode: str = "auto") -> Optional[Core]:
    """Best core with ``|A'| <= a``, or None when it captures fewer than ``b_min``.

    ``mode`` is ``"exact"``, ``"greedy"`` or ``"auto"`` (exact up to 20
    small-side vertices).  A None from greedy mode is not a proof that no
    core exists.
    """
    if a < g.d:
        raise InvalidArgument(f"core budget a={a} is below d={g.d}")
    if mode == "auto":
        mode = "exact" if len(g.side_a) <= EXACT_LIMIT else "greedy"
    if mode == "exact":
        best = _exact(g, a)
    elif mode == "greedy":
        best = _greedy(g, a)
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")
    if len(best[1]) < b_min:
        return None
    return Core(best[0], best[1], mode == "exact")


def small_core_oracle(g: BipartiteLK, a: int, b_min: int) -> Optional[Core]:
    """Brute force over every small-side subset of size at most ``a``."""
    if len(g.side_a) > EXACT_LIMIT or len(g.side_b) > EXACT_LIMIT:
        raise InvalidArgument("instance too large for the oracle (limit 20 per side)")
    best = None
    for r in range(min(a, len(g.side_a)) + 1):
        for sub in itertools.combinations(g.side_a, r):
            cand = (_canonical(g, sub), g.captured(sub))
            if _better(cand, best):
                best = cand
    if len(best[1]) < b_min:
        return None
    return Core(best[0], best[1], True)


def disjoint_cores(g: BipartiteLK, a: int, b_min: int, rounds: int, mode: str = "auto") -> list:
    """Repeatedly extract a core and delete its vertices from both sides."""
    cores = []
    for _ in range(rounds):
        core = small_core(g, a, b_min, mode)
        if core is None:
            break
        cores.append(core)
        used_a = set(core.a_prime)
        keep_b = [b for b in g.side_b if b not in set(core.b_prime)
                  and not set(g.key(b)) & used_a]
        g = BipartiteLK(tuple(v for v in g.side_a if v not in used_a), tuple(keep_b),
                        {b: g.nbrs[b] for b in keep_b}, g.d)
    return cores


def to_bipartite(t, d: int = 2) -> BipartiteLK:
    """Finite nodes against tops, each top listing its ladder.

    Accepts a :class:`SparseTGraph` or a bare :class:`OrderTree` (then
    each top's whole branch is its ladder).
    """
    g = t if isinstance(t, SparseTGraph) else branch_ladders(t)
    tree = g.tree
    if not tree.tops:
        raise InvalidArgument("tree has no tops: the large side would be empty")
    tops = sort_ids(tree.tops)
    for x in tops:
        if len(g.ladder[x]) < d:
            raise InvalidArgument(f"top {x!r} has {len(g.ladder[x])} ladder entries, need d={d}")
    return BipartiteLK(tuple(sort_ids(tree.finite_nodes)), tuple(tops),
                       {x: g.ladder[x] for x in tops}, d)


# -- finite scales --------------------------------------------------------


def downward_closure(generators: Iterable, k: Optional[int] = None) -> frozenset:
    """Smallest subset-closed family containing ``generators`` (and the empty set)."""
    out = {frozenset()}
    for gen in generators:
        gen = tuple(gen)
        for r in range(len(gen) + 1):
            out.update(frozenset(c) for c in itertools.combinations(gen, r))
    return frozenset(out)


@dataclass(frozen=True)
class ScaleFamily:
    bounds: tuple
    functions: tuple
    ideal: frozenset = field(default_factory=lambda: frozenset({frozenset()}))

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple(int(b) for b in self.bounds))
        object.__setattr__(self, "functions", tuple(tuple(int(x) for x in f) for f in self.functions))
        object.__setattr__(self, "ideal", frozenset(frozenset(s) for s in self.ideal))
        k = len(self.bounds)
        if any(b < 1 for b in self.bounds):
            raise InvalidArgument("bounds must be positive")
        if any(x >= y for x, y in zip(self.bounds, self.bounds[1:])):
            raise InvalidArgument("bounds must be strictly increasing")
        for f in self.functions:
            if len(f) != k:
                raise InvalidArgument(f"function {f!r} has length {len(f)}, expected {k}")
            if any(not 0 <= x < b for x, b in zip(f, self.bounds)):
                raise InvalidArgument(f"function {f!r} exceeds the bounds")
        if frozenset() not in self.ideal:
            raise InvalidArgument("ideal must contain the empty set")
        if frozenset(range(k)) in self.ideal:
            raise InvalidArgument("ideal must be proper")
        for s in self.ideal:
            if not s <= set(range(k)):
                raise InvalidArgument(f"ideal member {sorted(s)} leaves the index set")
            for x in s:
                if s - {x} not in self.ideal:
                    raise InvalidArgument(f"ideal is not subset-closed at {sorted(s)}")

    @property
    def index_length(self) -> int:
        return len(self.bounds)


def exceptional_set(f: Sequence[int], g: Sequence[int]) -> frozenset:
    """Indices where ``f`` fails to lie strictly below ``g``."""
    if len(f) != len(g):
        raise InvalidArgument("functions of different index length")
    return frozenset(n for n, (x, y) in enumerate(zip(f, g)) if x >= y)


def dominance(f: Sequence[int], g: Sequence[int], ideal) -> bool:
    """``f`` lies below ``g`` modulo the ideal."""
    return exceptional_set(f, g) in ideal


@dataclass(frozen=True)
class ScaleReport:
    axiom1: bool
    axiom1_violations: tuple  # (alpha, beta, exceptional set)
    axiom2: bool
    axiom2_witnesses: tuple  # (g, dominating index or None, exceptional sets)
    relativized_to: int  # number of test functions axiom (2) was checked against

    def to_json(self) -> dict:
        return {
            "axiom1": self.axiom1,
            "axiom1_violations": [[a, b, sorted(e)] for a, b, e in self.axiom1_violations],
            "axiom2": self.axiom2,
            "axiom2_witnesses": [{"g": list(g), "dominated_by": i,
                                  "exceptional_sets": [sorted(e) for e in es]}
                                 for g, i, es in self.axiom2_witnesses],
            "relativized_to_tests": self.relativized_to,
        }


def verify_scale(s: ScaleFamily, tests: Sequence[Sequence[int]] = ()) -> ScaleReport:
    """Check that the family increases, and that it dominates each test function.

    Domination is only checked against ``tests``; the report records how
    many there were.
    """
    viol = []
    fs = s.functions
    for a in range(len(fs)):
        for b in range(a + 1, len(fs)):
            if not dominance(fs[a], fs[b], s.ideal):
                viol.append((a, b, exceptional_set(fs[a], fs[b])))
    wit = []
    ok2 = True
    for g in tests:
        g = tuple(g)
        if len(g) != s.index_length or any(not 0 <= x < b for x, b in zip(g, s.bounds)):
            raise InvalidArgument(f"test function {g!r} violates the bounds")
        exc = tuple(exceptional_set(g, f) for f in fs)
        hit = next((i for i, e in enumerate(exc) if e in s.ideal), None)
        ok2 = ok2 and hit is not None
        wit.append((g, hit, exc))
    return ScaleReport(not viol, tuple(viol), ok2, tuple(wit), len(tests))


def build_scale_tree(s: ScaleFamily, depth: int) -> SparseTGraph:
    """Prefix tree of the family cut at ``depth``, one top per function.

    Top ``alpha`` sits over the prefix of length ``depth`` and its ladder is
    the prefix chain of lengths 0..depth.
    """
    if not 0 <= depth <= s.index_length:
        raise InvalidArgument(f"depth must lie in 0..{s.index_length}")
    if len(set(s.functions)) != len(s.functions):
        raise InvalidArgument("duplicate functions")
    parent = {}
    tops = []
    ladder = {(): ()}
    for alpha, f in enumerate(s.functions):
        for i in range(1, depth + 1):
            parent[f[:i]] = f[: i - 1]
        x = Top(f[:depth], tag=alpha)
        parent[x] = f[:depth]
        tops.append(x)
        ladder[x] = tuple(f[:i] for i in range(depth + 1))
    tree = OrderTree((), parent, frozenset(tops),
                     labels={"kind": "scale", "bounds": list(s.bounds)})
    tree = tree.with_antichains(level_antichains(tree))
    for t in tree.finite_nodes:
        if t != ():
            ladder[t] = (parent[t],)
    return SparseTGraph(tree, ladder)


def top_index(x: Top) -> int:
    return x.tag


def down_closed_subtrees(tree: OrderTree, a: int, limit: Optional[int] = None,
                         seed: int = 0) -> list:
    """Down-closed sets of at most ``a`` finite nodes, containing the root.

    With ``limit``, a seeded sample of that many sets is returned instead
    (always including the full enumeration's first member, the root alone).
    """
    if a < 1:
        return [frozenset()]
    out = []
    kids = {t: [c for c in tree.children[t] if c not in tree.tops] for t in tree.finite_nodes}

    def grow(current: frozenset, candidates: tuple):
        out.append(current)
        if len(current) == a:
            return
        for i, c in enumerate(candidates):
            grow(current | {c}, tuple(sort_ids(set(candidates[i + 1:]) | set(kids[c]))))

    grow(frozenset({tree.root}), tuple(sort_ids(kids[tree.root])))
    if limit is not None and len(out) > limit:
        rng = random.Random(seed)
        out = [out[0]] + rng.sample(out[1:], limit - 1)
    return out


@dataclass(frozen=True)
class NoCoreReport:
    passed: bool
    degenerate: bool
    exception_bound: int  # most tops captured by any candidate subtree
    rows: tuple  # per subtree: (nodes, g, captured tops, undominated tops)
    oracle_checked: bool
    budget: int
    d: int


def certify_no_core(s: ScaleFamily, a: int, d: int, depth: Optional[int] = None,
                    mode: str = "exact", sample: int = 500, seed: int = 0) -> NoCoreReport:
    """Bound how many tops any small down-closed subtree can capture.

    For each candidate subtree S, ``g(n)`` is one more than the largest
    value S shows at coordinate ``n``.  A top whose first ``d`` ladder
    entries lie in S agrees with S below ``d - 1``, so ``g`` is not below
    it modulo the ideal; the report asserts exactly that, then compares the
    largest capture count with the brute-force oracle.
    """
    if not verify_scale(s).axiom1:
        raise InvalidArgument("family is not increasing modulo its ideal")
    depth = s.index_length if depth is None else depth
    g_tree = build_scale_tree(s, depth)
    bp = to_bipartite(g_tree, d)
    tree = g_tree.tree
    degenerate = frozenset(range(d - 1)) in s.ideal
    limit = None if mode == "exact" else sample
    rows, passed, worst = [], True, 0
    for sub in down_closed_subtrees(tree, a, limit=limit, seed=seed):
        gvec = [0] * s.index_length
        for t in sub:
            for n, x in enumerate(t):
                gvec[n] = max(gvec[n], x + 1)
        captured = tuple(top_index(x) for x in bp.captured(sub))
        undominated = tuple(i for i, f in enumerate(s.functions)
                            if not dominance(gvec, f, s.ideal))
        if not degenerate and not set(captured) <= set(undominated):
            passed = False
        worst = max(worst, len(captured))
        rows.append((tuple(sort_ids(sub)), tuple(gvec), captured, undominated))
    oracle_checked = False
    if mode == "exact" and len(bp.side_a) <= EXACT_LIMIT and len(bp.side_b) <= EXACT_LIMIT:
        oracle_checked = True
        best = small_core_oracle(bp, a, 0)
        if best.size != worst:
            raise InternalError(f"oracle captures {best.size} tops, enumeration found {worst}")
        if small_core_oracle(bp, a, worst + 1) is not None:
            raise InternalError("oracle found a core above the certified bound")
    return NoCoreReport(passed, degenerate, worst, tuple(rows), oracle_checked, a, d)


def chain_scale(seed: int, count: int, bounds: Sequence[int], ideal=None) -> ScaleFamily:
    """Random family increasing pointwise on every coordinate outside ``ideal``'s largest member.

    Coordinates inside the largest ideal member are drawn freely; the rest
    are strictly increasing in the index, so the family is increasing
    modulo the ideal.
    """
    ideal = frozenset({frozenset()}) if ideal is None else frozenset(ideal)
    free = max(ideal, key=lambda e: (len(e), sorted(e)))
    rng = random.Random(seed)
    cols = []
    for n, b in enumerate(bounds):
        if n in free:
            cols.append([rng.randrange(b) for _ in range(count)])
        else:
            if count > b:
                raise InvalidArgument(f"bound {b} at coordinate {n} is too small for {count} functions")
            cols.append(sorted(rng.sample(range(b), count)))
    funcs = [tuple(cols[n][i] for n in range(len(bounds))) for i in range(count)]
    return ScaleFamily(tuple(bounds), tuple(funcs), ideal)
