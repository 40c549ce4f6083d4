"""Seeded instance families.

Every generator is a pure function of its arguments, so its parameters
and a depth are enough to regenerate any truncation.
"""
from __future__ import annotations

import random

from ._ids import sort_ids
from .inflation import horizontal_ray, inflate
from .trees import (OrderTree, SparseTGraph, attach_tops, branch_ladders,
                    build_regular_tree, select_ladders)


def _grow(rng_for, height, max_branching, max_nodes):
    """Random tree with every leaf at ``height`` and at most ``max_nodes`` nodes
    (unless unary growth alone already exceeds it)."""
    parent, frontier, count = {}, [()], 1
    for _ in range(height):
        nxt = []
        for j, t in enumerate(frontier):
            b = rng_for(t).randint(1, max_branching)
            later = len(frontier) - j - 1
            b = max(1, min(b, max_nodes - count - later))
            for c in range(b):
                parent[t + (c,)] = t
                nxt.append(t + (c,))
            count += b
        frontier = nxt
    return parent


def _antichain_labels(tree: OrderTree, rng_for, spread: int) -> tuple:
    label = {}
    for t in sorted(tree.finite_nodes, key=lambda s: (tree.height[s], s)):
        taken = {label[s] for s in tree.strict_down(t)}
        rng = rng_for(("label",) + t)
        choices = [i for i in range(spread) if i not in taken]
        label[t] = rng.choice(choices)
    used = sorted(set(label.values()))
    return tuple(frozenset(t for t in label if label[t] == i) for i in used)


def random_sparse_tgraph(seed: int, max_height: int = 4, max_branching: int = 3,
                         max_tops: int = 10, max_nodes: int = 24,
                         ladder_rule: str = "random", min_height: int = 1,
                         min_ladder: int = 0, tries: int = 50) -> SparseTGraph:
    """Random finite surrogate: all leaves at one height, tops over some branches.

    ``ladder_rule`` is ``"antichain"``, ``"branch"`` or ``"random"`` (coin flip).
    With ``min_ladder``, antichain labels are redrawn until every top has at
    least that many ladder entries; after ``tries`` failed draws the branch
    rule is used instead and a notice is recorded.
    """
    rng = random.Random(seed)
    height = rng.randint(min_height, max_height)
    parent = _grow(lambda t: rng, height, max_branching, max_nodes)
    tree = OrderTree((), parent)
    leaves = [b[-1] for b in tree.branches()]
    n_tops = rng.randint(0, min(max_tops, len(leaves)))
    chosen = sorted(rng.sample(leaves, n_tops))
    tree = attach_tops(tree, chosen)
    if ladder_rule == "random":
        ladder_rule = rng.choice(["antichain", "branch"])
    for _ in range(tries):
        labelled = tree.with_antichains(_antichain_labels(tree, lambda t: rng, spread=height + 3))
        if ladder_rule == "branch":
            return branch_ladders(labelled)
        g = select_ladders(labelled)
        if all(len(g.ladder[x]) >= min_ladder for x in g.tree.tops):
            return g
    g = branch_ladders(labelled)
    return SparseTGraph(g.tree, g.ladder, (f"antichain ladders shorter than {min_ladder}; "
                                           "fell back to branch ladders",))


def corpus(n: int = 25, seed: int = 0, **kw) -> list:
    """``n`` seeded random sparse T-graphs with their generator parameters.

    Defaults give heights 2..4 and at least three ladder entries per top, so
    every top has three rungs once rays reach index 2.
    """
    kw = {"min_height": 2, "min_ladder": 3, **kw}
    out = []
    for i in range(n):
        s = seed * 1000 + i
        out.append(({"kind": "random_sparse", "seed": s, **kw}, random_sparse_tgraph(s, **kw)))
    return out


def stable_tgraph(seed: int, height: int, max_branching: int = 2) -> SparseTGraph:
    """Prefix-consistent family: the tree at ``height`` extends the one at ``height - 1``.

    Branching and antichain labels of a node depend only on the seed and
    the node, so antichains do not depend on the truncation height.  Tops
    sit over every maximal branch; ladders follow the antichain rule.
    """
    def rng_for(t):
        return random.Random(f"{seed}:{t!r}")

    parent = _grow(rng_for, height, max_branching, max_nodes=10**9)
    tree = OrderTree((), parent)
    tree = attach_tops(tree, [b[-1] for b in tree.branches()])
    label = {}
    for t in sorted(tree.finite_nodes, key=lambda s: (len(s), s)):
        taken = {label[s] for s in tree.strict_down(t)}
        # fixed, height-independent range keeps labels stable across truncations
        pool = [i for i in range(64) if i not in taken]
        label[t] = rng_for(("label",) + t).choice(pool)
    used = sorted(set(label.values()))
    tree = tree.with_antichains(tuple(frozenset(t for t in label if label[t] == i) for i in used))
    return select_ladders(tree)


def star_ray_product(leaves: int, depth: int):
    """Cartesian product of a star with ``leaves`` leaves and a ray, cut at ``depth``.

    Returns ``(graph, centre_ray, leaf_rays)``; the product is the inflation of
    a height-one tree.
    """
    tree = build_regular_tree([leaves], 1)
    g = branch_ladders(tree)
    h = inflate(g, depth, generator={"kind": "star_ray", "leaves": leaves})
    centre = horizontal_ray(h, ())
    leaf_rays = [horizontal_ray(h, (i,)) for i in range(leaves)]
    return h, centre, leaf_rays


def parallel_ladder(rays: int, depth: int):
    """``rays`` parallel rays with rungs between consecutive ones at every index."""
    tree = build_regular_tree([1] * (rays - 1), rays - 1)
    h = inflate(branch_ladders(tree), depth, generator={"kind": "ladder", "rays": rays})
    return h, [horizontal_ray(h, t) for t in sort_ids(tree.nodes)]


def attachment_surrogate(seed: int, max_nodes: int = 8, max_tops: int = 4) -> SparseTGraph:
    """Small antichain-laddered tree for the attachment-bound experiments.

    Heights 2 or 3, random antichain labels, tops over random branches.
    """
    rng = random.Random(10_000 + seed)
    height = rng.choice([2, 3])
    parent = _grow(lambda t: rng, height, 2, max_nodes - max_tops)
    tree = OrderTree((), parent)
    leaves = [b[-1] for b in tree.branches()]
    k = rng.randint(1, min(max_tops, len(leaves)))
    tree = attach_tops(tree, sorted(rng.sample(leaves, k)))
    tree = tree.with_antichains(_antichain_labels(tree, lambda t: rng, spread=height + 2))
    return select_ladders(tree)
