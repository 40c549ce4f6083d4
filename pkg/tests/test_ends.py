import itertools
import random

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from endgrid import (Comb, EndSurrogate, InvalidArgument, Ray, TruncatedGraph, assemble_star,
                     branch_ladders, build_regular_tree, disjoint_paths, dominators,
                     equivalence_check, find_combs, frayed_decompose, greedy_core,
                     horizontal_ray, horizontal_rays, inflate, normal_tree, ray_graph,
                     separates, star_problems)
from endgrid.ends import StarNotFound, StarOfRays, comb_problems
from endgrid.generators import corpus, parallel_ladder, star_ray_product

from oracles import max_disjoint_paths


def from_nx(G, depth=None):
    return TruncatedGraph.from_edges(G.nodes, G.edges, depth=depth)


def random_graph(seed, n_max=60):
    rng = random.Random(seed)
    n = rng.randint(2, n_max)
    G = nx.gnp_random_graph(n, rng.uniform(0.03, 0.2), seed=seed)
    verts = list(G.nodes)
    a = set(rng.sample(verts, rng.randint(1, max(1, n // 4))))
    b = set(rng.sample(verts, rng.randint(1, max(1, n // 4))))
    return from_nx(G), a, b


# -- Menger ---------------------------------------------------------------


def test_k33_paths_and_cut():
    G = nx.complete_bipartite_graph(3, 3)
    g = from_nx(G)
    pk = disjoint_paths(g, {0, 1, 2}, {3, 4, 5}, 5)
    assert pk.count == 3 and len(pk.cut) == 3
    assert separates(g, pk.cut, {0, 1, 2}, {3, 4, 5})


def test_path_graph_single_path_and_interior_cut():
    g = from_nx(nx.path_graph(5))
    pk = disjoint_paths(g, {0}, {4}, 2)
    assert pk.count == 1 and len(pk.cut) == 1
    assert separates(g, pk.cut, {0}, {4})


def test_shared_vertices_are_trivial_paths():
    g = from_nx(nx.cycle_graph(4))
    pk = disjoint_paths(g, {0, 1}, {1, 2}, 2)
    assert (1,) in pk.paths and pk.count == 2


def test_inflation_root_to_child_three_paths():
    h = inflate(branch_ladders(build_regular_tree([2, 2], 2)), 4)
    a, b = horizontal_ray(h, ()), horizontal_ray(h, (0,))
    pk = disjoint_paths(h, a, b, 3)
    assert pk.count == 3
    assert max_disjoint_paths(h, a, b) >= 3


@given(st.integers(0, 10**6))
def test_menger_certificate_against_networkx(seed):
    g, a, b = random_graph(seed, 40)
    pk = disjoint_paths(g, a, b, len(g))
    assert pk.count == max_disjoint_paths(g, a, b)
    assert len(pk.cut) == pk.count
    assert separates(g, pk.cut, a, b)
    seen = set()
    for p in pk.paths:
        assert p[0] in a and p[-1] in b
        assert not set(p[1:]) & a and not set(p[:-1]) & b
        assert not seen & set(p)
        seen |= set(p)


# -- equivalence ----------------------------------------------------------


def test_equivalence_horizontal_rays_connected():
    g = corpus(1)[0][1]
    e = EndSurrogate(lambda d: inflate(g, d), (1, 2, 4))
    rays = horizontal_rays(e.deepest)
    assert equivalence_check(e, rays[0], rays[-1], 1).found


def test_equivalence_disconnected_rays_not_found():
    G = nx.disjoint_union(nx.path_graph(5), nx.path_graph(5))
    g = from_nx(G, depth={v: v % 5 for v in G.nodes})
    e = EndSurrogate(lambda d: g.induced([v for v in g.adj if g.depth[v] <= d]), (2, 4))
    r1, r2 = Ray(tuple(range(5))), Ray(tuple(range(5, 10)))
    res = equivalence_check(e, r1, r2, 1)
    assert not res.found and [c for _, c in res.tried] == [0, 0]


def test_equivalence_star_ray_centre_and_leaf():
    e = EndSurrogate(lambda d: star_ray_product(4, d)[0], (2, 4, 6))
    _, centre, leaves = star_ray_product(4, 6)
    res = equivalence_check(e, centre, leaves[0], 4)
    assert res.found and res.depth == 4


def test_schedule_must_increase():
    with pytest.raises(InvalidArgument):
        EndSurrogate(lambda d: None, (3, 3))


# -- combs ----------------------------------------------------------------


def test_star_ray_combs_pack_every_leaf():
    h, centre, leaves = star_ray_product(5, 6)
    combs = find_combs(h, centre.vertex_set, leaves, 3)
    assert len(combs) == 5
    assert not comb_problems(h, centre.vertex_set, combs)
    for c in combs:
        assert len(c.paths) >= 3 and all(len(p) == 2 for p in c.paths)


def test_combs_through_one_cut_vertex():
    # two spines reach U only through vertex "c"
    edges = [("s0", "s1"), ("t0", "t1"), ("s1", "c"), ("t1", "c"), ("c", "u")]
    g = TruncatedGraph.from_edges(["s0", "s1", "t0", "t1", "c", "u"], edges)
    combs = find_combs(g, {"u"}, [Ray(("s0", "s1")), Ray(("t0", "t1"))], 1)
    assert len(combs) == 1


def test_combs_edge_cases():
    h, centre, leaves = star_ray_product(2, 3)
    assert find_combs(h, centre.vertex_set, [], 2) == []
    with pytest.raises(InvalidArgument):
        find_combs(h, centre.vertex_set, leaves, 0)


@given(st.integers(0, 60), st.integers(1, 3))
def test_comb_families_are_valid(seed, m):
    _, g = corpus(1, seed=seed)[0]
    h = inflate(g, 4)
    rays = horizontal_rays(h)
    combs = find_combs(h, rays[0].vertex_set, rays[1:], m)
    assert not comb_problems(h, rays[0].vertex_set, combs)


# -- greedy core ----------------------------------------------------------


def test_greedy_core_star_ray_one_round():
    h, centre, leaves = star_ray_product(4, 6)
    gc = greedy_core(h, [centre] + leaves, 3)
    assert gc.trace[0] == 4 and gc.stabilized
    assert len([t for t in gc.trace if t]) == 1


def test_greedy_core_single_ray():
    h, centre, _ = star_ray_product(2, 3)
    gc = greedy_core(h, [centre], 2)
    assert gc.core == centre.vertex_set and not gc.combs and len(gc.trace) == 1


def test_greedy_core_binary_tree_two_rounds():
    h = inflate(branch_ladders(build_regular_tree([2, 2], 2)), 6)
    rays = horizontal_rays(h)
    gc = greedy_core(h, rays, 2)
    assert {c.spine.owner for c in gc.combs} == {r.owner for r in rays[1:]}
    assert len([t for t in gc.trace if t]) <= 2


def test_greedy_core_cap_flags_partial_result():
    h = inflate(branch_ladders(build_regular_tree([2, 2], 2)), 6)
    gc = greedy_core(h, horizontal_rays(h), 2, rounds_cap=1)
    assert not gc.stabilized


@given(st.integers(0, 200))
def test_greedy_core_monotone(seed):
    g = corpus(1, seed=seed)[0][1]
    h = inflate(g, 4)
    gc = greedy_core(h, horizontal_rays(h), 2)
    sizes, trace = gc.core_sizes, gc.trace
    for i, packed in enumerate(trace):
        assert sizes[i + 1] >= sizes[i]
        if packed:
            assert sizes[i + 1] > sizes[i]


# -- normal trees and stars -----------------------------------------------


def tree_edges(t):
    return {frozenset((v, p)) for v, p in t.parent.items()}


def test_normal_tree_k4_is_path():
    g = from_nx(nx.complete_graph(4))
    t = normal_tree(g, {0})
    assert len(t.order) == 4
    assert nx.is_isomorphic(nx.Graph([tuple(e) for e in tree_edges(t)]), nx.path_graph(4))


def test_normal_tree_of_tree_is_itself():
    G = nx.balanced_tree(2, 3)
    t = normal_tree(from_nx(G), {5})
    assert t.root == 5 and tree_edges(t) == {frozenset(e) for e in G.edges}


def test_normal_tree_cycle():
    g = from_nx(nx.cycle_graph(5))
    t = normal_tree(g, {0})
    assert nx.is_isomorphic(nx.Graph([tuple(e) for e in tree_edges(t)]), nx.path_graph(5))
    (extra,) = [e for e in g.edges if frozenset(e) not in tree_edges(t)]
    assert t.comparable(*extra)


def test_normal_tree_rejects_split_u():
    g = from_nx(nx.disjoint_union(nx.path_graph(2), nx.path_graph(2)))
    with pytest.raises(InvalidArgument):
        normal_tree(g, {0, 2})


@given(st.integers(0, 10**6))
def test_normal_tree_is_normal(seed):
    g, a, _ = random_graph(seed, 30)
    u = {min(a)}
    t = normal_tree(g, u)
    comp = t.vertices
    for x, y in g.edges:
        if x in comp and y in comp:
            assert t.comparable(x, y)


def test_assemble_star_on_star_ray():
    h, centre, leaves = star_ray_product(5, 6)
    combs = find_combs(h, centre.vertex_set, leaves, 3)
    star = assemble_star(h, centre.vertex_set, combs, 5)
    assert star.centre.vertices == centre.vertices and len(star) == 5
    assert not star_problems(h, star)


def test_assemble_star_k0():
    h, centre, _ = star_ray_product(2, 4)
    star = assemble_star(h, centre.vertex_set, [], 0)
    assert len(star) == 0 and star.centre.reaches_frontier(h)
    assert set(star.centre.vertices) & centre.vertex_set


def test_assemble_star_shared_tooth():
    # centre path c0..c3; two leaf paths meeting the centre only at c0
    edges = [("c0", "c1"), ("c1", "c2"), ("c2", "c3"),
             ("a0", "a1"), ("a1", "a2"), ("a2", "a3"),
             ("b0", "b1"), ("b1", "b2"), ("b2", "b3"),
             ("a0", "c0"), ("b0", "c0")]
    depth = {v: int(v[1]) for e in edges for v in e}
    g = TruncatedGraph.from_edges(sorted(depth), edges, depth=depth)
    u = {"c0", "c1", "c2", "c3"}
    spines = [Ray(("a0", "a1", "a2", "a3")), Ray(("b0", "b1", "b2", "b3"))]
    combs = find_combs(g, u, spines, 1)
    assert len(combs) == 2 and combs[0].teeth == combs[1].teeth == ("c0",)
    star = assemble_star(g, u, combs, 2)
    assert len(star) == 2 and not star_problems(g, star)


def test_assemble_star_too_few_survivors():
    h, centre, leaves = star_ray_product(2, 4)
    combs = find_combs(h, centre.vertex_set, leaves, 2)
    with pytest.raises(StarNotFound) as exc:
        assemble_star(h, centre.vertex_set, combs, 3)
    assert exc.value.counts["survivors"] == 2


def test_star_checker_catches_broken_families():
    h, centre, leaves = star_ray_product(2, 3)
    star = StarOfRays(centre, (leaves[0],), (((leaves[0].vertices[0], leaves[1].vertices[0]),),))
    assert star_problems(h, star)


# -- dominators -----------------------------------------------------------


def test_dominators_fan_apex():
    G = nx.path_graph(6)
    G.add_edges_from(("x", i) for i in range(6))
    g = from_nx(G)
    assert dominators(g, Ray(tuple(range(6))), 3) == {"x"}


def test_dominators_other_component():
    G = nx.disjoint_union(nx.path_graph(4), nx.path_graph(3))
    assert dominators(from_nx(G), Ray((0, 1, 2, 3)), 1) == set()


@pytest.mark.parametrize("k", [3, 4])
def test_dominators_star_ray_against_connectivity(k):
    h, centre, _ = star_ray_product(3, 5)
    got = dominators(h, centre, k)
    G = nx.Graph(list(h.edges))
    want = set()
    for v in h.adj:
        if v in centre.vertex_set:
            continue
        H = G.copy()
        H.add_edges_from(("__r", c) for c in centre.vertices)
        if nx.algorithms.connectivity.local_node_connectivity(H, v, "__r") >= k:
            want.add(v)
    assert got == want
    # leaf vertices have degree at most three, so nothing 4-dominates
    if k == 4:
        assert got == set()


# -- frayed decomposition -------------------------------------------------


def test_frayed_star_of_ten_leaves():
    fr = frayed_decompose(nx.to_dict_of_lists(nx.star_graph(10)), 0, 10)
    assert fr.kind == "star" and fr.count == 10 and fr.meets_threshold


def test_frayed_caterpillar():
    G = nx.path_graph(10)
    for i in range(10):
        G.add_edges_from((i, (i, j)) for j in range(3))
    adj = {v: set(G[v]) for v in G}
    fr = frayed_decompose(adj, 0, 30)
    assert fr.kind == "frayed_comb" and fr.count == 30
    assert {frozenset(e) for e in fr.edges} <= {frozenset(e) for e in G.edges}


def test_frayed_spider():
    G = nx.Graph()
    for i in range(5):
        G.add_edges_from([("c", ("a", i)), (("a", i), ("b", i))])
    fr = frayed_decompose({v: set(G[v]) for v in G}, "c", 5)
    assert fr.kind == "frayed_star" and fr.count == 5


def test_frayed_rejects_small_tree():
    with pytest.raises(InvalidArgument):
        frayed_decompose({0: {1}, 1: {0}}, 0, 3)


@given(st.integers(0, 10**6), st.integers(1, 8))
def test_frayed_output_is_subgraph(seed, threshold):
    rng = random.Random(seed)
    n = rng.randint(threshold, 60)
    T = nx.random_labeled_tree(n, seed=seed) if hasattr(nx, "random_labeled_tree") else nx.random_tree(n, seed=seed)
    fr = frayed_decompose({v: set(T[v]) for v in T}, 0, threshold)
    assert {frozenset(e) for e in fr.edges} <= {frozenset(e) for e in T.edges}
    assert len(set(fr.leaves)) == fr.count
    if fr.kind != "frayed_comb":
        assert fr.meets_threshold


# -- ray graphs -----------------------------------------------------------


def test_ray_graph_star_ray():
    h, centre, leaves = star_ray_product(4, 6)
    rg = ray_graph(h, [centre] + leaves, 3)
    assert rg.classification == {"type": "star", "centre": 0}
    assert rg.edge_list == [(0, i) for i in range(1, 5)]


def test_ray_graph_two_isolated_rays():
    G = nx.disjoint_union(nx.path_graph(3), nx.path_graph(3))
    rg = ray_graph(from_nx(G), [Ray((0, 1, 2)), Ray((3, 4, 5))], 1)
    assert rg.edge_list == [] and rg.classification["type"] == "components"


def test_ray_graph_parallel_ladder_is_path():
    h, rays = parallel_ladder(4, 6)
    rg = ray_graph(h, rays, 3)
    assert rg.edge_list == [(0, 1), (1, 2), (2, 3)]


def test_ray_graph_witnesses_independent():
    h, rays = parallel_ladder(4, 6)
    rg = ray_graph(h, rays, 3)
    interiors = [set(v for p in ps for v in p[1:-1]) for ps in rg.edges.values()]
    for x, y in itertools.combinations(interiors, 2):
        assert not x & y
    with pytest.raises(InvalidArgument):
        ray_graph(h, rays, 0)
