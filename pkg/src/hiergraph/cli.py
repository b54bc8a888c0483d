"""Command line: build a store, audit it, query it, serve it.

Exit codes: 0 ok, 2 invariant failure, 3 bad input, 4 I/O trouble.
"""

from __future__ import annotations

import argparse
import sys

from .audit import audit_store
from .connectivity import connectivity, external_neighbors
from .errors import (
    AuditFailure,
    BadInputError,
    GraphFormatError,
    HierGraphError,
    LoopEdgeError,
    PartitionError,
    StoreError,
)
from .graph import format_weight, load_graph
from .partition import HierarchySpec, build_hierarchy
from .tree import assemble_tree, fill_graph_tree, load_tree, save_tree

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_BAD_INPUT = 3
EXIT_IO = 4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hiergraph", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="partition a graph and write its store")
    b.add_argument("--input", required=True, help="edge-list file (src<TAB>dst[<TAB>weight])")
    b.add_argument("--labels", default=None, help="optional id<TAB>label file")
    b.add_argument("--k", type=int, required=True, help="fanout per level")
    b.add_argument("--levels", type=int, required=True, help="hierarchy levels incl. the root")
    b.add_argument("--epsilon", type=float, default=0.10, help="balance tolerance")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--min-leaf-size", type=int, default=None)
    b.add_argument("--unweighted-cut", action="store_true", help="minimize edge counts, not weights")
    b.add_argument("--out", required=True, help="store directory to create")

    a = sub.add_parser("audit", help="re-check every invariant from the store files")
    a.add_argument("--store", required=True)

    q = sub.add_parser("query", help="query a built store")
    q.add_argument("kind", choices=["closure", "conn", "external", "search"])
    q.add_argument("--store", required=True)
    q.add_argument("args", nargs="*", help="closure <id|root>; conn <a> <b>; external <v>; search <text>")

    s = sub.add_parser("serve", help="serve the HTTP API for a store")
    s.add_argument("--store", required=True)
    s.add_argument("--port", type=int, default=8100)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--cache-leaves", type=int, default=32)
    return p


def cmd_build(args) -> int:
    g = load_graph(args.input, args.labels)
    spec = HierarchySpec(
        k=args.k,
        h=args.levels,
        epsilon=args.epsilon,
        min_leaf_size=args.min_leaf_size,
        use_edge_weights=not args.unweighted_cut,
    )
    print(f"loaded {g.node_count()} nodes, {g.edge_count()} edges", flush=True)
    plan = build_hierarchy(g, spec, seed=args.seed)
    print(f"hierarchy: {len(plan.leaves())} leaves", flush=True)
    tree = assemble_tree(g, plan, args.out)
    fill_graph_tree(tree)
    save_tree(tree)
    report = audit_store(args.out)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.ok else EXIT_INVARIANT


def cmd_audit(args) -> int:
    report = audit_store(args.store)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.ok else EXIT_INVARIANT


def cmd_query(args) -> int:
    tree = load_tree(args.store, verify=False)
    kind = args.kind
    if kind == "closure":
        if len(args.args) != 1:
            raise BadInputError("closure needs one tree node id (or 'root')")
        nid = tree.root if args.args[0] == "root" else int(args.args[0])
        for node in sorted(tree.closure(nid)):
            print(node)
    elif kind == "conn":
        if len(args.args) != 2:
            raise BadInputError("conn needs two tree node ids")
        result = connectivity(tree, int(args.args[0]), int(args.args[1]))
        print(f"weight {result.weight}")
        for e in result.edges:
            print(f"{e.source}\t{e.target}\t{format_weight(e.weight)}")
    elif kind == "external":
        if len(args.args) != 1:
            raise BadInputError("external needs one graph node id")
        hood = external_neighbors(tree, int(args.args[0]))
        for entry in hood.entries:
            print(
                f"{entry.neighbor}\tleaf={entry.neighbor_leaf}\t"
                f"resolved_at={entry.resolved_at}\tweight={format_weight(entry.edge.weight)}"
            )
    elif kind == "search":
        if len(args.args) != 1:
            raise BadInputError("search needs one query string")
        from .service import _search_labels

        for hit in _search_labels(tree, args.args[0]):
            path = ".".join(str(x) for x in hit["path"])
            print(f"{hit['node']}\t{hit['label']}\t{path}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.store, cache_leaves=args.cache_leaves)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as err:
        print(f"cannot serve: {err}", file=sys.stderr)
        return EXIT_IO
    except SystemExit:  # uvicorn startup failure (port busy and friends)
        print("cannot serve: startup failed", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _hoist_store_flag(argv: list[str]) -> list[str]:
    """Let ``query <kind> --store X <args...>`` parse: move --store first."""
    if not argv or argv[0] != "query":
        return argv
    hoisted: list[str] = []
    rest: list[str] = []
    i = 1
    while i < len(argv):
        if argv[i] == "--store" and i + 1 < len(argv):
            hoisted.extend(argv[i: i + 2])
            i += 2
        elif argv[i].startswith("--store="):
            hoisted.append(argv[i])
            i += 1
        else:
            rest.append(argv[i])
            i += 1
    return ["query", *hoisted, *rest]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = _parser().parse_args(_hoist_store_flag(argv))
    handlers = {"build": cmd_build, "audit": cmd_audit, "query": cmd_query, "serve": cmd_serve}
    try:
        return handlers[args.command](args)
    except (GraphFormatError, LoopEdgeError, BadInputError, PartitionError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except AuditFailure as err:
        print(f"invariant failure: {err}", file=sys.stderr)
        return EXIT_INVARIANT
    except (StoreError, OSError) as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    except HierGraphError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
