import json

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from endgrid import (EndSurrogate, InvalidArgument, Ray, ScaleFamily, TruncatedGraph,
                     affirmative_pipeline, attach_tops, attachment_sets, branch_ladders,
                     build_regular_tree, build_scale_tree, certify_attachment_bound,
                     certify_scale_obstruction, downward_closure, horizontal_rays, inflate,
                     normal_tree, search_star, star_problems)
from endgrid.bipartite import chain_scale
from endgrid.certify import Certificate, horizontal_leaf_rays
from endgrid.generators import attachment_surrogate, star_ray_product

from oracles import max_disjoint_paths, to_nx


def binary_with_tops():
    t = attach_tops(build_regular_tree([2, 2, 2], 3), [(0, 0, 0), (0, 1, 1), (1, 1, 0), (0, 0, 1)])
    return branch_ladders(t)


def low_centres(h, g, sigma):
    low = g.tree.below_level(sigma)
    cen = horizontal_leaf_rays(h, low)
    sub = h.induced([v for v in h.adj if h.provenance[v][0] in low])
    nt = normal_tree(sub, [(g.tree.root, 0)])
    return cen + [Ray(nt.branch_to(v)) for v in nt.order if v in sub.frontier]


# -- attachment bound -----------------------------------------------------


def test_attachment_bound_passes_on_surrogate():
    g = next(g for g in map(attachment_surrogate, range(50))
             if max(len(v) for v in attachment_sets(g).values()) == 2
             and g.tree.finite_height >= 2)
    h = inflate(g, 4)
    cert = certify_attachment_bound(h, g, sigma=2)
    assert cert.verdict == "pass"
    assert all(r["max_paths"] <= r["bound"] <= 4 for r in cert.witnesses["nodes"])


def test_attachment_flows_match_networkx():
    g = binary_with_tops()
    h = inflate(g, 4)
    cert = certify_attachment_bound(h, g, sigma=1)
    col = {}
    for v in h.adj:
        col.setdefault(h.provenance[v][0], set()).add(v)
    for row in cert.witnesses["nodes"]:
        t = tuple(row["node"])
        below = {v for x in g.tree.strict_down(t) for v in col[x]}
        region = {v for x in g.tree.up_closure(t) if x != t for v in col[x]}
        comps = list(nx.connected_components(to_nx(h).subgraph(region)))
        assert len(comps) == len(row["components"])
        want = sorted(max_disjoint_paths(h.induced(c | below), c, below) for c in comps)
        assert sorted(c["paths"] for c in row["components"]) == want


def test_attachment_successor_only_is_vacuous():
    g = branch_ladders(build_regular_tree([2, 2], 2))
    cert = certify_attachment_bound(inflate(g, 4), g, sigma=1)
    assert cert.verdict == "pass"
    assert [r["max_paths"] for r in cert.witnesses["nodes"]] == [0, 0]


def test_attachment_fails_with_deficient_map():
    g = binary_with_tops()
    h = inflate(g, 4)
    cert = certify_attachment_bound(h, g, sigma=1, s={x: set() for x in g.tree.finite_nodes})
    assert cert.verdict == "fail" and not cert.ok
    rows = [c for r in cert.witnesses["nodes"] for c in r["components"] if "witness_paths" in c]
    assert rows and all(len(c["witness_paths"]) > 0 for c in rows)


def test_attachment_errors():
    g = binary_with_tops()
    h = inflate(g, 4)
    with pytest.raises(InvalidArgument):
        certify_attachment_bound(h, g, sigma=7)
    with pytest.raises(InvalidArgument):
        certify_attachment_bound(inflate(g, 0), g, sigma=2)
    with pytest.raises(InvalidArgument):
        certify_attachment_bound(h, g, sigma=1, s={})


def test_attachment_budget_agrees_with_search():
    checked = 0
    for seed in range(40):
        g = attachment_surrogate(seed)
        if max(len(v) for v in attachment_sets(g).values()) > 2:
            continue
        depth = max(1, 40 // len(g.tree.nodes) - 1)
        h = inflate(g, depth)
        sigma = g.tree.finite_height // 2
        cert = certify_attachment_bound(h, g, sigma=sigma, m=5)
        ss = search_star(h, horizontal_rays(h), cert.payload + 1, 5,
                         centres=low_centres(h, g, sigma))
        assert ss.verdict == "not-found"
        checked += 1
        if checked == 5:
            break
    assert checked == 5


# -- star search ----------------------------------------------------------


def test_search_star_finds_star_ray():
    h, centre, leaves = star_ray_product(4, 6)
    cert = search_star(h, [centre] + leaves, 4, 3)
    assert cert.kind == "star-found" and cert.verdict == "found"
    assert not star_problems(h, cert.payload, 3)
    assert len(cert.payload) == 4


def test_search_star_two_disjoint_rays():
    g = TruncatedGraph.from_edges(range(6), [(0, 1), (1, 2), (3, 4), (4, 5)],
                                  depth={i: i % 3 for i in range(6)})
    cert = search_star(g, [Ray((0, 1, 2)), Ray((3, 4, 5))], 1, 1)
    assert cert.kind == "star-not-found" and cert.verdict == "not-found"
    assert cert.witnesses["undecided_sets"] == 0


def test_search_star_budget_gives_inconclusive():
    h, centre, leaves = star_ray_product(4, 6)
    cert = search_star(h, leaves, 4, 3, centres=[centre], budget=0)
    assert cert.verdict in ("found", "inconclusive")
    cert = search_star(h, [centre] + leaves, 2, 3, centres=[leaves[0]], budget=1)
    assert cert.verdict == "inconclusive"
    assert search_star(h, [centre] + leaves, 2, 3, centres=[leaves[0]]).verdict == "found"


def test_search_star_rejects_overlapping_rays():
    h, centre, leaves = star_ray_product(2, 3)
    with pytest.raises(InvalidArgument):
        search_star(h, [centre, centre], 1, 1)
    with pytest.raises(InvalidArgument):
        search_star(h, [centre], 0, 1)


# -- scale obstruction ----------------------------------------------------


def test_scale_obstruction_chain():
    s = ScaleFamily((3, 4), ((0, 0), (1, 1), (2, 2)))
    g = build_scale_tree(s, 2)
    h = inflate(g, 2)
    cert = certify_scale_obstruction(h, g, s, 2, 2)
    assert cert.verdict == "pass" and not cert.witnesses["degenerate"]
    assert cert.payload <= 1
    for row in cert.witnesses["subtrees"]:
        missing = [i for i, c in enumerate(row["rungs_inside"]) if c < 2]
        assert len(missing) >= 2


def test_scale_obstruction_single_top_degenerate():
    s = ScaleFamily((2, 3), ((1, 2),))
    g = build_scale_tree(s, 2)
    cert = certify_scale_obstruction(inflate(g, 2), g, s, 2, 2)
    assert cert.witnesses["degenerate"]


def test_scale_obstruction_five_functions():
    s = chain_scale(0, 5, (3, 5, 7), downward_closure([(0,)]))
    g = build_scale_tree(s, 3)
    cert = certify_scale_obstruction(inflate(g, 3), g, s, 3, 3)
    assert cert.verdict == "pass"
    rows = cert.witnesses["subtrees"]
    assert rows and all(len(r["rungs_inside"]) == 5 for r in rows)


def test_scale_obstruction_rejects_non_increasing():
    s = ScaleFamily((3,), ((2,), (1,)))
    g = build_scale_tree(s, 1)
    with pytest.raises(InvalidArgument):
        certify_scale_obstruction(inflate(g, 1), g, s, 2, 2)


# -- pipeline -------------------------------------------------------------


@pytest.mark.parametrize("s", [3, 5])
def test_pipeline_star_ray(s):
    h, centre, leaves = star_ray_product(s, 8)
    cert = affirmative_pipeline(h, [centre] + leaves, 3, 9, s)
    assert cert.verdict == "pass" and len(cert.payload) == s
    assert not star_problems(h, cert.payload)


def test_pipeline_binary_inflation():
    g = branch_ladders(build_regular_tree([2, 2], 2))
    e = EndSurrogate(lambda d: inflate(g, d), (4, 8))
    cert = affirmative_pipeline(e, horizontal_rays(e.deepest), 2, 9, 2)
    assert cert.verdict == "pass" and len(cert.payload) >= 2
    assert {"greedy_core", "small_core", "assemble_star"} <= set(cert.witnesses)


def test_pipeline_single_ray_fails_at_assembly():
    h, centre, _ = star_ray_product(2, 4)
    cert = affirmative_pipeline(h, [centre], 2, 4, 1)
    assert cert.verdict == "fail"
    assert cert.witnesses["failed_stage"] == "assemble_star"


def test_pipeline_small_budget_fails_at_core():
    h, centre, leaves = star_ray_product(3, 6)
    cert = affirmative_pipeline(h, [centre] + leaves, 3, 2, 3)
    assert cert.witnesses["failed_stage"] == "small_core"


def test_pipeline_needs_k_rays():
    h, centre, _ = star_ray_product(2, 4)
    with pytest.raises(InvalidArgument):
        affirmative_pipeline(h, [centre], 2, 4, 2)


# -- properties -----------------------------------------------------------


@settings(max_examples=15)
@given(st.integers(2, 4), st.integers(2, 5), st.integers(1, 3), st.integers(1, 4))
def test_pipeline_consistent_with_search(leaves, depth, m, k):
    h, centre, rays = star_ray_product(leaves, depth)
    all_rays = [centre] + rays
    ss = search_star(h, all_rays, k, m)
    pipe = affirmative_pipeline(h, all_rays, m, 2 * depth + 2, k)
    if ss.verdict == "not-found":
        assert pipe.verdict != "pass"
    if pipe.verdict == "pass":
        assert not star_problems(h, pipe.payload)


@settings(max_examples=10)
@given(st.integers(2, 4), st.integers(1, 3), st.integers(1, 4))
def test_star_found_is_monotone_in_depth(leaves, m, k):
    rays_at = {}
    found_at = None
    for d in range(1, 7):
        h, centre, rays = star_ray_product(leaves, d)
        rays_at[d] = search_star(h, [centre] + rays, k, m).verdict
        if rays_at[d] == "found" and found_at is None:
            found_at = d
    if found_at is not None:
        assert all(rays_at[d] == "found" for d in range(found_at, 7))


def test_certificate_serialization():
    h, centre, leaves = star_ray_product(3, 4)
    cert = search_star(h, [centre] + leaves, 3, 2)
    doc = json.loads(cert.dumps())
    assert doc["type"] == "certificate" and doc["kind"] == "star-found"
    assert doc["schema_version"] == 1
    assert "star-found: found" in cert.summary()
    with pytest.raises(InvalidArgument):
        Certificate("bogus", {}, {}, "pass")


def test_found_star_paths_exist_in_networkx():
    h, centre, leaves = star_ray_product(3, 5)
    star = search_star(h, [centre] + leaves, 3, 3).payload
    G = to_nx(h)
    for fam in star.path_families:
        for p in fam:
            assert nx.is_path(G, list(p))
