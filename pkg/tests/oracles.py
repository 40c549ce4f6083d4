"""Independent reference computations built on networkx and brute force."""
import itertools

import networkx as nx


def to_nx(g):
    G = nx.Graph()
    G.add_nodes_from(g.adj)
    G.add_edges_from(g.edges)
    return G


def max_disjoint_paths(g, source, target, blocked=()):
    """Maximum number of vertex-disjoint source-target paths (shared vertices count once)."""
    G = to_nx(g)
    G.remove_nodes_from(blocked)
    a = set(source) - set(blocked)
    b = set(target) - set(blocked)
    shared = a & b
    G.remove_nodes_from(shared)
    a -= shared
    b -= shared
    if not a or not b:
        return len(shared)
    G.add_node("__s")
    G.add_node("__t")
    G.add_edges_from(("__s", v) for v in a)
    G.add_edges_from((v, "__t") for v in b)
    if G.has_edge("__s", "__t"):
        G.remove_edge("__s", "__t")
    return len(shared) + nx.algorithms.connectivity.local_node_connectivity(G, "__s", "__t")


def attachment_sets_bruteforce(g):
    tree = g.tree
    out = {}
    for t in tree.finite_nodes:
        below = {s for s in tree.nodes if tree.less(s, t)}
        acc = set()
        for t2 in tree.nodes:
            if tree.less(t, t2):
                acc |= set(g.ladder[t2]) & below
        out[t] = frozenset(acc)
    return out


def best_capture(bp, a):
    """Largest number of large-side vertices captured by any a-subset of the small side."""
    best = 0
    for sub in itertools.combinations(bp.side_a, min(a, len(bp.side_a))):
        s = set(sub)
        best = max(best, sum(1 for b in bp.side_b if set(bp.nbrs[b][: bp.d]) <= s))
    return best
