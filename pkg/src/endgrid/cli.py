"""Command-line entry point.

Exit codes: 0 success or pass, 1 failed verdict or nothing found, 2 usage
or input error, 3 internal error.  Diagnostics go to stderr; artifacts go
to ``--out`` (stdout by default).  Set ENDGRID_LOG=DEBUG for progress logs.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import io as eio
from ._ids import decode_id, encode_id, sort_ids
from .bipartite import ScaleFamily, build_scale_tree
from .certify import (affirmative_pipeline, certify_attachment_bound,
                      certify_scale_obstruction, search_star)
from .ends import (EndSurrogate, find_combs, frayed_decompose, greedy_core,
                   ray_graph)
from .errors import EndgridError, InternalError, InvalidArgument, SchemaError
from .flow import disjoint_paths
from .generators import random_sparse_tgraph
from .graph import TruncatedGraph
from .inflation import horizontal_rays, inflate, lift_with_stars
from .trees import (OrderTree, SparseTGraph, attach_tops, branch_ladders,
                    build_regular_tree, level_antichains, select_ladders)

log = logging.getLogger("endgrid")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _schedule(text: str) -> tuple:
    vals = _ints(text)
    if not vals or any(a >= b for a, b in zip(vals, vals[1:])):
        raise argparse.ArgumentTypeError("depth schedule must be nonempty and strictly increasing")
    return tuple(vals)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=None, help="truncation depth")
    common.add_argument("--schedule", type=_schedule, default=None,
                        help="strictly increasing depths, e.g. 2,4,8")
    common.add_argument("--m", type=int, default=2, help="paths per comb or leaf")
    common.add_argument("--d", type=int, default=2, help="neighbours needed for capture")
    common.add_argument("--k", type=int, default=2, help="leaves or paths requested")
    common.add_argument("--core-budget", type=int, default=None, help="core size a")
    common.add_argument("--mode", choices=["exact", "greedy", "sampled"], default="exact")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=["json", "dot", "text"], default="json")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    p = argparse.ArgumentParser(prog="endgrid", description="Ends of graphs at truncation scale.")
    sub = p.add_subparsers(dest="command", required=True)

    bt = sub.add_parser("build-tree", parents=[common], help="regular or random order tree")
    bt.add_argument("--profile", type=_ints, default=[2], help="branching per level")
    bt.add_argument("--height", type=int, default=2)
    bt.add_argument("--tops", choices=["none", "all"], default="all")
    bt.add_argument("--random", action="store_true", help="seeded random sparse tree instead")

    sl = sub.add_parser("select-ladders", parents=[common], help="tree -> sparse T-graph")
    sl.add_argument("input")
    sl.add_argument("--rule", choices=["antichain", "branch"], default="antichain")

    inf = sub.add_parser("inflate", parents=[common], help="sparse T-graph -> truncated inflation")
    inf.add_argument("input")

    lf = sub.add_parser("lift", parents=[common], help="attach parallel rays to horizontal rays")
    lf.add_argument("input")
    lf.add_argument("--sizes", type=_ints, required=True,
                    help="rays to attach to each of the first horizontal rays")

    an = sub.add_parser("analyze", help="end-analysis operations")
    asub = an.add_subparsers(dest="op", required=True)
    for name in ("disjoint-paths", "combs", "greedy-core", "ray-graph", "frayed"):
        a = asub.add_parser(name, parents=[common])
        a.add_argument("input")
        if name == "disjoint-paths":
            a.add_argument("--source", default=None, help="JSON list of vertex ids")
            a.add_argument("--target", default=None, help="JSON list of vertex ids")
        if name == "frayed":
            a.add_argument("--root", default=None, help="JSON vertex id")

    ce = sub.add_parser("certify", help="certificates")
    csub = ce.add_subparsers(dest="op", required=True)
    for name in ("attachment", "scale", "star-search", "pipeline"):
        c = csub.add_parser(name, parents=[common])
        c.add_argument("input")
        if name == "attachment":
            c.add_argument("--sigma", type=int, default=None)

    ed = sub.add_parser("export-dot", parents=[common], help="graph JSON -> DOT")
    ed.add_argument("input")
    return p


# -- helpers --------------------------------------------------------------


def _load(path: str, *kinds):
    obj = eio.parse(sys.stdin if path == "-" else path)
    if kinds and not isinstance(obj, kinds):
        names = "/".join(k.__name__ for k in kinds)
        raise UsageError(f"{path}: expected a {names} document, got {type(obj).__name__}")
    return obj


def _graph(args, obj) -> TruncatedGraph:
    if isinstance(obj, TruncatedGraph):
        return obj
    depth = args.depth if args.depth is not None else 4
    return inflate(obj, depth, generator={"kind": "file", "depth": depth})


def _surrogate(args, obj):
    if isinstance(obj, TruncatedGraph):
        return obj
    schedule = args.schedule or (args.depth if args.depth is not None else 4,)
    return EndSurrogate(lambda d: inflate(obj, d), schedule)


def _write(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(args, obj, ok: bool = True) -> int:
    if args.format == "dot":
        if not isinstance(obj, TruncatedGraph):
            raise UsageError("DOT output is only available for graphs")
        _write(args, eio.to_dot(obj))
    elif args.format == "text" and hasattr(obj, "summary"):
        _write(args, obj.summary() + "\n")
    elif isinstance(obj, dict):
        _write(args, eio.dumps(obj))
    else:
        _write(args, eio.emit(obj))
    return EXIT_OK if ok else EXIT_FAIL


def _report(kind: str, params: dict, body: dict) -> dict:
    return {"schema_version": eio.SCHEMA_VERSION, "type": "report", "kind": kind,
            "parameters": params, **body}


def _paths(paths) -> list:
    return [[encode_id(v) for v in p] for p in paths]


# -- subcommands ----------------------------------------------------------


def cmd_build_tree(args) -> int:
    if args.random:
        g = random_sparse_tgraph(args.seed)
        return _emit(args, g.tree)
    tree = build_regular_tree(args.profile * args.height if len(args.profile) == 1 else args.profile,
                              args.height)
    if args.tops == "all":
        tree = attach_tops(tree, [b[-1] for b in tree.branches()])
    tree = tree.with_antichains(level_antichains(tree))
    return _emit(args, tree)


def cmd_select_ladders(args) -> int:
    tree = _load(args.input, OrderTree)
    if args.rule == "branch":
        return _emit(args, branch_ladders(tree))
    if tree.antichains is None:
        tree = tree.with_antichains(level_antichains(tree))
    return _emit(args, select_ladders(tree))


def cmd_inflate(args) -> int:
    g = _load(args.input, SparseTGraph)
    depth = args.depth if args.depth is not None else 4
    return _emit(args, inflate(g, depth, generator={"kind": "file", "source": os.path.basename(args.input)}))


def cmd_lift(args) -> int:
    h = _graph(args, _load(args.input, TruncatedGraph, SparseTGraph))
    rays = horizontal_rays(h)
    if len(args.sizes) > len(rays):
        raise UsageError(f"{len(args.sizes)} sizes but only {len(rays)} horizontal rays")
    return _emit(args, lift_with_stars(h, rays[: len(args.sizes)], args.sizes))


def cmd_analyze(args) -> int:
    obj = _load(args.input, TruncatedGraph, SparseTGraph)
    params = {"m": args.m, "k": args.k}
    if args.op == "greedy-core":
        e = _surrogate(args, obj)
        h = e.deepest if isinstance(e, EndSurrogate) else e
        gc = greedy_core(h, horizontal_rays(h), args.m)
        body = {"core_size": len(gc.core), "combs_per_round": list(gc.trace),
                "core_sizes": list(gc.core_sizes), "stabilized": gc.stabilized,
                "combs": [{"spine_start": encode_id(c.spine.vertices[0]), "paths": _paths(c.paths)}
                          for c in gc.combs]}
        params["depth"] = h.max_depth
        return _emit(args, _report("greedy-core", params, body), gc.stabilized)
    h = _graph(args, obj)
    params["depth"] = h.max_depth
    if args.op == "disjoint-paths":
        src = ([decode_id(x) for x in json.loads(args.source)] if args.source
               else [v for v in h.vertices if h.depth[v] == 0])
        dst = [decode_id(x) for x in json.loads(args.target)] if args.target else sort_ids(h.frontier)
        pk = disjoint_paths(h, src, dst, args.k)
        body = {"count": pk.count, "paths": _paths(pk.paths),
                "cut": None if pk.cut is None else [encode_id(v) for v in sort_ids(pk.cut)]}
        return _emit(args, _report("disjoint-paths", params, body), pk.count >= args.k)
    if args.op == "combs":
        rays = horizontal_rays(h)
        combs = find_combs(h, rays[0].vertex_set, rays[1:], args.m)
        body = {"count": len(combs),
                "combs": [{"spine_start": encode_id(c.spine.vertices[0]), "paths": _paths(c.paths)}
                          for c in combs]}
        return _emit(args, _report("combs", params, body), bool(combs))
    if args.op == "ray-graph":
        rg = ray_graph(h, horizontal_rays(h), args.m)
        body = {"rays": [encode_id(r.owner) for r in rg.rays],
                "edges": [[i, j] for i, j in rg.edge_list],
                "classification": json.loads(json.dumps(rg.classification, default=encode_id))}
        return _emit(args, _report("ray-graph", params, body))
    if args.op == "frayed":
        root = decode_id(json.loads(args.root)) if args.root else h.vertices[0]
        fr = frayed_decompose(h, root, args.k)
        body = {"shape": fr.kind, "count": fr.count, "meets_threshold": fr.meets_threshold,
                "edges": [[encode_id(u), encode_id(v)] for u, v in fr.edges]}
        return _emit(args, _report("frayed", params, body), fr.meets_threshold)
    raise UsageError(f"unknown analysis {args.op!r}")


def cmd_certify(args) -> int:
    if args.op == "scale":
        s = _load(args.input, ScaleFamily)
        depth = args.depth if args.depth is not None else s.index_length
        a = args.core_budget if args.core_budget is not None else args.d
        g = build_scale_tree(s, depth)
        h = inflate(g, depth, generator={"kind": "scale", "depth": depth})
        mode = "exact" if args.mode == "exact" else "sampled"
        cert = certify_scale_obstruction(h, g, s, a, args.d, mode=mode, seed=args.seed)
        return _emit(args, cert, cert.ok)
    obj = _load(args.input, TruncatedGraph, SparseTGraph)
    if args.op == "attachment":
        if not isinstance(obj, SparseTGraph):
            raise UsageError("attachment certificates need a sparse T-graph document")
        cert = certify_attachment_bound(_graph(args, obj), obj, args.sigma, m=args.m)
        return _emit(args, cert, cert.ok)
    if args.op == "star-search":
        h = _graph(args, obj)
        cert = search_star(h, horizontal_rays(h), args.k, args.m)
        return _emit(args, cert, cert.ok)
    if args.op == "pipeline":
        e = _surrogate(args, obj)
        h = e.deepest if isinstance(e, EndSurrogate) else e
        rays = horizontal_rays(h)
        a = args.core_budget if args.core_budget is not None else len(rays[0])
        cert = affirmative_pipeline(e, rays, args.m, a, args.k)
        return _emit(args, cert, cert.ok)
    raise UsageError(f"unknown certificate {args.op!r}")


def cmd_export_dot(args) -> int:
    h = _graph(args, _load(args.input, TruncatedGraph, SparseTGraph))
    args.format = "dot"
    return _emit(args, h)


COMMANDS = {"build-tree": cmd_build_tree, "select-ladders": cmd_select_ladders,
            "inflate": cmd_inflate, "lift": cmd_lift, "analyze": cmd_analyze,
            "certify": cmd_certify, "export-dot": cmd_export_dot}


def main(argv=None) -> int:
    level = os.environ.get("ENDGRID_LOG", "WARNING").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidArgument, SchemaError, FileNotFoundError, EndgridError) as exc:
        if isinstance(exc, InternalError):
            print(f"internal error: {exc}", file=sys.stderr)
            return EXIT_INTERNAL
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        log.debug("unhandled", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
