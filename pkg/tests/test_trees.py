import pytest
from hypothesis import given, strategies as st

from endgrid import (TOP, AntichainViolation, InvalidArgument, OrderTree, Top, attach_tops,
                     attachment_sets, branch_ladders, build_regular_tree, check_star_property,
                     level_antichains, select_ladders, tree_query)
from endgrid.generators import random_sparse_tgraph, stable_tgraph

from oracles import attachment_sets_bruteforce


def path_rab():
    tree = OrderTree("r", {"a": "r", "b": "a"})
    return attach_tops(tree, ["b"])


def level_sizes(tree):
    return [len(tree.level(i)) for i in range(tree.finite_height + 1)]


@pytest.mark.parametrize("profile,height,sizes", [
    ([2, 2, 2], 3, [1, 2, 4, 8]),
    ([1, 1, 1, 1, 1], 5, [1] * 6),
    ([1, 2, 3], 3, [1, 1, 2, 6]),
])
def test_regular_tree_level_sizes(profile, height, sizes):
    tree = build_regular_tree(profile, height)
    assert level_sizes(tree) == sizes
    assert len(tree.nodes) == sum(sizes)
    assert not tree.tops


def test_regular_tree_rejects_empty_profile():
    with pytest.raises(InvalidArgument):
        build_regular_tree([], 2)


def test_attach_tops_on_binary_tree():
    tree = build_regular_tree([2, 2, 2], 3)
    out = attach_tops(tree, [(0, 0, 0), (0, 1, 1), (1, 1, 0)])
    assert len(out.nodes) == 18 and len(out.tops) == 3
    for x in out.tops:
        assert out.height[x] == TOP
        assert out.strict_down(x) == frozenset(out.chain_below(x))
        assert len(out.strict_down(x)) == 4


def test_attach_tops_identity_and_errors():
    tree = build_regular_tree([2, 2], 2)
    assert attach_tops(tree, []) is tree
    with pytest.raises(InvalidArgument):
        attach_tops(tree, [(0,)])
    with pytest.raises(InvalidArgument):
        attach_tops(tree, [(0, 1), (0, 1)])


def test_attach_top_to_path_accepts_branch_tuple():
    tree = build_regular_tree([1, 1, 1], 3)
    branch = ((), (0,), (0, 0), (0, 0, 0))
    out = attach_tops(tree, [branch])
    (x,) = out.tops
    assert len(out.strict_down(x)) == 4


def test_select_ladders_hand_example():
    tree = path_rab().with_antichains([{"b"}, {"a"}, {"r"}])
    g = select_ladders(tree)
    assert g.ladder[Top(("b",))] == ("r", "b")
    assert g.ladder["a"] == ("r",) and g.ladder["b"] == ("a",)


def test_select_ladders_single_node_below_tops():
    tree = OrderTree("r", {})
    tree = attach_tops(tree, ["r"]).with_antichains([{"r"}])
    g = select_ladders(tree)
    assert all(g.ladder[x] == ("r",) for x in g.tree.tops)


def test_level_antichains_give_full_branch_ladders():
    tree = build_regular_tree([2, 2, 2], 3)
    tree = attach_tops(tree, [b[-1] for b in tree.branches()])
    g = select_ladders(tree.with_antichains(level_antichains(tree)))
    for x in g.tree.tops:
        # the whole finite branch, root included: four entries at height 3
        assert g.ladder[x] == g.tree.chain_below(x)
        assert len(g.ladder[x]) == 4


def test_select_ladders_reports_antichain_violation():
    tree = OrderTree("r", {"a": "r", "b": "a"})
    tree = attach_tops(tree, ["b"])
    with pytest.raises((AntichainViolation, InvalidArgument)):
        select_ladders(tree.with_antichains([{"a", "b"}, {"r"}]))


def test_star_property_branch_ladders():
    tree = build_regular_tree([2, 2], 2)
    tree = attach_tops(tree, [b[-1] for b in tree.branches()])
    rep = check_star_property(branch_ladders(tree))
    for t in tree.finite_nodes:
        assert rep.attachments[t] == tree.strict_down(t)


def test_star_property_path_example_matches_bruteforce():
    g = select_ladders(path_rab().with_antichains([{"b"}, {"a"}, {"r"}]))
    s = attachment_sets(g)
    assert s == attachment_sets_bruteforce(g)
    assert s["r"] == frozenset() and s["a"] == {"r"} and s["b"] == {"r"}


def test_star_property_without_tops_is_empty():
    g = branch_ladders(build_regular_tree([2, 3], 2))
    assert all(not v for v in attachment_sets(g).values())


def test_tree_queries():
    tree = path_rab()
    assert tree_query(tree, "down_closure", "r") == {"r"}
    assert tree_query(tree, "interval", "r", "b") == {"a"}
    assert tree_query(tree, "classify", Top(("b",))) == "top"
    assert tree_query(tree, "classify", "a") == "successor"
    assert tree_query(tree, "classify", "r") == "root"
    with pytest.raises(InvalidArgument):
        tree_query(tree, "interval", "b", "a")


@given(st.integers(0, 10_000))
def test_parent_chain_length_is_height(seed):
    tree = random_sparse_tgraph(seed).tree
    for t in tree.finite_nodes:
        steps, v = 0, t
        while v != tree.root:
            v = tree.parent[v]
            steps += 1
        assert steps == tree.height[t]


@given(st.integers(0, 10_000))
def test_ladders_strictly_increasing_and_below(seed):
    g = random_sparse_tgraph(seed)
    tree = g.tree
    for t, lad in g.ladder.items():
        assert all(tree.less(s, t) for s in lad)
        assert all(tree.less(a, b) for a, b in zip(lad, lad[1:]))


@given(st.integers(0, 10_000))
def test_attachment_sets_are_sound(seed):
    g = random_sparse_tgraph(seed)
    assert attachment_sets(g) == attachment_sets_bruteforce(g)


@given(st.integers(0, 500), st.integers(2, 4))
def test_attachment_sets_shrink_or_stay_under_deepening(seed, height):
    # deeper ladders can only skip entries below t, never add new ones
    shallow = stable_tgraph(seed, height)
    deep = stable_tgraph(seed, height + 1)
    s_old, s_new = attachment_sets(shallow), attachment_sets(deep)
    for t in s_old:
        if shallow.tree.height[t] <= height - 1:
            assert s_new[t] <= s_old[t]
    rep = check_star_property(deep, shallower=shallow)
    assert set(rep.stable) <= set(s_old)
