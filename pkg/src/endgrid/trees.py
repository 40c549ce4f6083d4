"""Order trees of height at most omega+1, cut at a finite depth.

Finite nodes carry their height; limit nodes (tops) carry the marker
:data:`TOP`.  A tree is immutable once built.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping, Optional, Sequence

from ._ids import Top, sort_ids, vkey
from .errors import AntichainViolation, InvalidArgument

TOP = "TOP"

Node = Hashable


@dataclass(frozen=True)
class OrderTree:
    """Rooted tree order with optional tops and antichain partition.

    ``parent`` maps every non-root node to the node immediately below it in
    the tree order; for a top that is the last node of its branch.
    """

    root: Node
    parent: Mapping[Node, Node]
    tops: frozenset = frozenset()
    antichains: Optional[tuple] = None
    branching_profile: tuple = ()
    labels: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "parent", dict(self.parent))
        object.__setattr__(self, "tops", frozenset(self.tops))
        if self.antichains is not None:
            object.__setattr__(
                self, "antichains", tuple(frozenset(u) for u in self.antichains))
        self._validate()

    # -- structure -----------------------------------------------------

    @cached_property
    def nodes(self) -> frozenset:
        return frozenset(self.parent) | {self.root}

    @cached_property
    def children(self) -> dict:
        kids = {t: [] for t in self.nodes}
        for t in sort_ids(self.parent):
            kids[self.parent[t]].append(t)
        return {t: tuple(c) for t, c in kids.items()}

    @cached_property
    def height(self) -> dict:
        h = {self.root: 0}
        for t in self._topological():
            if t in self.tops:
                h[t] = TOP
            elif t != self.root:
                h[t] = h[self.parent[t]] + 1
        return h

    @cached_property
    def finite_nodes(self) -> frozenset:
        return self.nodes - self.tops

    @cached_property
    def finite_height(self) -> int:
        return max(self.height[t] for t in self.finite_nodes)

    @property
    def top_level(self) -> int:
        """Level index used for the tops (one past the finite part)."""
        return self.finite_height + 1

    def _topological(self) -> list:
        order, stack = [], [self.root]
        kids: dict = {}
        for t in self.parent:
            kids.setdefault(self.parent[t], []).append(t)
        while stack:
            t = stack.pop()
            order.append(t)
            stack.extend(kids.get(t, ()))
        return order

    def _validate(self):
        if self.root in self.parent:
            raise InvalidArgument("root must not have a parent")
        reached = set(self._topological())
        if reached != set(self.parent) | {self.root}:
            raise InvalidArgument("parent map does not form a tree rooted at root")
        if self.root in self.tops:
            raise InvalidArgument("the root cannot be a top")
        for x in self.tops:
            if x not in self.parent:
                raise InvalidArgument(f"top {x!r} is not in the tree")
        kids = {}
        for t, p in self.parent.items():
            kids.setdefault(p, []).append(t)
        for x in self.tops:
            if x in kids:
                raise InvalidArgument(f"top {x!r} has children")
            if self.parent[x] in self.tops:
                raise InvalidArgument(f"top {x!r} sits on another top")
            if any(c not in self.tops for c in kids.get(self.parent[x], ())):
                raise InvalidArgument(
                    f"top {x!r} does not sit above a maximal finite branch")
        if self.antichains is not None:
            seen = set()
            for i, u in enumerate(self.antichains):
                if u & seen:
                    raise InvalidArgument(f"antichain U_{i} overlaps an earlier one")
                seen |= u
                for s, t in itertools.combinations(sort_ids(u), 2):
                    if self.comparable(s, t):
                        raise InvalidArgument(
                            f"U_{i} is not an antichain: {s!r} and {t!r} are comparable")
            if seen != set(self.finite_nodes):
                raise InvalidArgument("antichains must cover exactly the non-top nodes")

    # -- order ---------------------------------------------------------

    def down_closure(self, t: Node) -> frozenset:
        """All t' <= t."""
        out = [t]
        while t != self.root:
            t = self.parent[t]
            out.append(t)
        return frozenset(out)

    def strict_down(self, t: Node) -> frozenset:
        return self.down_closure(t) - {t}

    def chain_below(self, t: Node) -> tuple:
        """Nodes strictly below ``t``, listed from the root upwards."""
        return tuple(sorted(self.strict_down(t), key=lambda s: self.height[s]))

    def up_closure(self, t: Node) -> frozenset:
        out, stack = [], [t]
        while stack:
            s = stack.pop()
            out.append(s)
            stack.extend(self.children[s])
        return frozenset(out)

    def less(self, s: Node, t: Node) -> bool:
        return s != t and s in self.down_closure(t)

    def comparable(self, s: Node, t: Node) -> bool:
        return s == t or self.less(s, t) or self.less(t, s)

    def level(self, i: int) -> frozenset:
        return frozenset(t for t in self.finite_nodes if self.height[t] == i)

    def below_level(self, i: int) -> frozenset:
        """Finite nodes of height < i."""
        return frozenset(t for t in self.finite_nodes if self.height[t] < i)

    def is_successor(self, t: Node) -> bool:
        return t != self.root and t not in self.tops

    def branches(self) -> list:
        """Maximal chains of the finite part, each as a root-to-leaf tuple."""
        leaves = [t for t in self.finite_nodes
                  if not any(c not in self.tops for c in self.children[t])]
        return [self.chain_below(t) + (t,) for t in sort_ids(leaves)]

    def with_antichains(self, antichains) -> "OrderTree":
        return OrderTree(self.root, self.parent, self.tops, tuple(antichains),
                         self.branching_profile, dict(self.labels))


@dataclass(frozen=True)
class SparseTGraph:
    """An order tree together with each node's down-neighbour sequence."""

    tree: OrderTree
    ladder: Mapping[Node, tuple]
    notices: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ladder", {t: tuple(v) for t, v in self.ladder.items()})
        tree = self.tree
        if set(self.ladder) != set(tree.nodes):
            raise InvalidArgument("ladder must be given for every node")
        for t, lad in self.ladder.items():
            if t == tree.root:
                if lad:
                    raise InvalidArgument("the root has no down-neighbours")
            elif tree.is_successor(t):
                if lad != (tree.parent[t],):
                    raise InvalidArgument(f"successor {t!r} must have ladder (parent,)")
            else:
                below = tree.strict_down(t)
                for s in lad:
                    if s not in below:
                        raise InvalidArgument(
                            f"ladder entry {s!r} of {t!r} is not strictly below it")
                for s, s2 in zip(lad, lad[1:]):
                    if not tree.less(s, s2):
                        raise InvalidArgument(f"ladder of {t!r} is not strictly increasing")


AttachmentMap = dict  # node -> frozenset of nodes strictly below it


# -- constructors -------------------------------------------------------


def build_regular_tree(branching_profile: Sequence[int], height: int) -> OrderTree:
    """Every node at level n < height gets ``branching_profile[n]`` children."""
    if height < 0:
        raise InvalidArgument("height must be nonnegative")
    profile = tuple(int(b) for b in branching_profile)
    if height > 0 and not profile:
        raise InvalidArgument("empty branching profile with positive height")
    if len(profile) < height:
        raise InvalidArgument("branching profile shorter than height")
    if any(b < 1 for b in profile[:height]):
        raise InvalidArgument("branching entries must be >= 1")
    parent = {}
    frontier = [()]
    for n in range(height):
        nxt = []
        for t in frontier:
            for c in range(profile[n]):
                child = t + (c,)
                parent[child] = t
                nxt.append(child)
        frontier = nxt
    return OrderTree((), parent, branching_profile=profile[:height])


def attach_tops(tree: OrderTree, branch_selectors: Iterable) -> OrderTree:
    """Add one top above each selected maximal branch.

    A selector is either the branch's leaf node or the full root-to-leaf
    tuple of nodes.
    """
    maximal = {b[-1]: b for b in tree.branches()}
    leaves = []
    for sel in branch_selectors:
        leaf = sel
        if isinstance(sel, tuple) and sel and sel not in tree.nodes and sel[-1] in maximal:
            if tuple(sel) != maximal[sel[-1]]:
                raise InvalidArgument(f"selector {sel!r} is not a maximal branch")
            leaf = sel[-1]
        if leaf not in maximal:
            raise InvalidArgument(f"selector {sel!r} is not a maximal branch")
        leaves.append(leaf)
    if len(set(leaves)) != len(leaves):
        raise InvalidArgument("duplicate branch selectors")
    if not leaves:
        return tree
    parent = dict(tree.parent)
    tops = set(tree.tops)
    for leaf in leaves:
        x = Top(leaf if isinstance(leaf, tuple) else (leaf,))
        if x in parent:
            raise InvalidArgument(f"a top already sits above {leaf!r}")
        parent[x] = leaf
        tops.add(x)
    return OrderTree(tree.root, parent, frozenset(tops), tree.antichains,
                     tree.branching_profile, dict(tree.labels))


def level_antichains(tree: OrderTree) -> tuple:
    """U_i := level i of the finite part."""
    return tuple(tree.level(i) for i in range(tree.finite_height + 1))


def branch_ladders(tree: OrderTree) -> SparseTGraph:
    """Every top's ladder is its whole finite branch."""
    ladder = {}
    for t in tree.nodes:
        if t == tree.root:
            ladder[t] = ()
        elif t in tree.tops:
            ladder[t] = tree.chain_below(t)
        else:
            ladder[t] = (tree.parent[t],)
    return SparseTGraph(tree, ladder)


def select_ladders(tree: OrderTree) -> SparseTGraph:
    """Pick each top's ladder by the least-antichain rule.

    Start at the root; from t_{n-1}, the next entry is the single point of
    the lowest-indexed antichain meeting the open interval (t_{n-1}, top).
    """
    if tree.antichains is None:
        raise InvalidArgument("tree carries no antichain partition")
    index = {}
    for i, u in enumerate(tree.antichains):
        for s in u:
            index[s] = i
    ladder = {}
    for t in tree.nodes:
        if t == tree.root:
            ladder[t] = ()
        elif t not in tree.tops:
            ladder[t] = (tree.parent[t],)
    for x in sort_ids(tree.tops):
        chain = tree.chain_below(x)
        if not chain:
            raise AntichainViolation(f"top {x!r} has nothing below it")
        steps = [tree.root]
        pos = 0  # position of steps[-1] in chain
        while True:
            interval = chain[pos + 1:]
            if not interval:
                break
            best = min(index[s] for s in interval)
            hits = [s for s in interval if index[s] == best]
            if len(hits) != 1:
                raise AntichainViolation(
                    f"U_{best} meets the interval below {x!r} in {len(hits)} points")
            pos = chain.index(hits[0])
            steps.append(hits[0])
        ladder[x] = tuple(steps)
    return SparseTGraph(tree, ladder)


# -- property (star) ------------------------------------------------------


@dataclass(frozen=True)
class StarPropertyReport:
    attachments: dict
    stable: Optional[dict]
    passed: bool


def attachment_sets(g: SparseTGraph) -> AttachmentMap:
    """S_t := union over t' > t of ladder(t') intersected with the strict down-closure of t."""
    tree = g.tree
    out = {}
    for t in tree.finite_nodes:
        below = tree.strict_down(t)
        acc = set()
        for t2 in tree.up_closure(t) - {t}:
            acc.update(s for s in g.ladder[t2] if s in below)
        out[t] = frozenset(acc)
    return out


def check_star_property(g: SparseTGraph, shallower: Optional[SparseTGraph] = None,
                        bound: Optional[int] = None) -> StarPropertyReport:
    """Compute the attachment map and, optionally, compare with a shallower cut.

    ``stable[t]`` is True when |S_t| agrees with the shallower truncation for
    every node present in both and of height below that truncation's leaves.
    With ``bound``, the report fails if some |S_t| exceeds it.
    """
    s = attachment_sets(g)
    stable = None
    if shallower is not None:
        s_old = attachment_sets(shallower)
        cut = shallower.tree.finite_height
        stable = {t: len(s[t]) == len(s_old[t])
                  for t in s_old if t in s and shallower.tree.height[t] <= cut - 1}
    passed = bound is None or all(len(v) <= bound for v in s.values())
    return StarPropertyReport(s, stable, passed)


# -- queries --------------------------------------------------------------


def tree_query(tree: OrderTree, kind: str, *args):
    """Dispatch ``down_closure(t)``, ``level(i)``, ``interval(t, t2)``, ``classify(t)``."""
    if kind == "down_closure":
        (t,) = args
        _require(tree, t)
        return tree.down_closure(t)
    if kind == "level":
        (i,) = args
        return tree.level(i)
    if kind == "interval":
        t, t2 = args
        _require(tree, t)
        _require(tree, t2)
        if not tree.less(t, t2):
            raise InvalidArgument(f"{t!r} is not strictly below {t2!r}")
        return tree.strict_down(t2) - tree.down_closure(t)
    if kind == "classify":
        (t,) = args
        _require(tree, t)
        if t == tree.root:
            return "root"
        return "top" if t in tree.tops else "successor"
    raise InvalidArgument(f"unknown query {kind!r}")


def _require(tree, t):
    if t not in tree.nodes:
        raise InvalidArgument(f"unknown node {t!r}")
