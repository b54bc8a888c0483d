"""HTTP+JSON API over a built store, feeding the explorer client.

All state is read-only except the leaf cache (expand/collapse) and a
small layout memo, so restarting the service never changes an answer.
Every error is reported as ``{"error": {"code", "message"}}`` with a
matching status: 404 unknown ids, 409 nested-pair connectivity or
not-yet-loaded leaves, 422 malformed requests.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .audit import _parse_manifest
from .connectivity import connectivity, external_neighbors
from .errors import (
    AncestorPairError,
    AuditFailure,
    BadInputError,
    DegeneratePairError,
    HierGraphError,
    LeafNotLoadedError,
    NotALeafError,
    StoreError,
    UnknownNodeError,
    UnknownSuperNodeError,
)
from .graph import metrics_report
from .layout import layout_hierarchy, layout_leaf
from .tree import GraphTree, LeafSuperNode, load_tree, verify_store

__all__ = ["create_app", "quick_store_check"]

_STATUS = {
    UnknownNodeError: (404, "unknown-node"),
    UnknownSuperNodeError: (404, "unknown-supernode"),
    AncestorPairError: (409, "ancestor-pair"),
    LeafNotLoadedError: (409, "leaf-not-loaded"),
    DegeneratePairError: (422, "same-node-pair"),
    NotALeafError: (422, "not-a-leaf"),
    BadInputError: (422, "bad-request"),
    StoreError: (500, "store-error"),
}


def _error_response(exc: HierGraphError) -> JSONResponse:
    for klass, (status, code) in _STATUS.items():
        if isinstance(exc, klass):
            return JSONResponse(
                status_code=status, content={"error": {"code": code, "message": str(exc)}}
            )
    return JSONResponse(
        status_code=500, content={"error": {"code": "internal", "message": str(exc)}}
    )


def quick_store_check(store_dir: str | Path) -> None:
    """Startup gate: checksums plus the membership invariants.

    Cheap compared to a full audit (no edge re-scan) but still refuses
    to serve a store whose files or membership structure are broken.
    """
    verify_store(store_dir)
    header, kind, parent, children, members, opens = _parse_manifest(Path(store_dir))
    seen: set[int] = set()
    total = 0
    for nid, k in kind.items():
        if k == "L":
            total += len(members[nid])
            seen.update(members[nid])
    if total != header["n_nodes"] or len(seen) != header["n_nodes"]:
        raise AuditFailure("store failed the startup membership check")


def create_app(store_dir: str | Path, cache_leaves: int = 32) -> FastAPI:
    quick_store_check(store_dir)
    tree: GraphTree = load_tree(store_dir, cache_leaves=cache_leaves, verify=False)

    app = FastAPI(title="hiergraph", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.tree = tree
    layout_memo: dict[tuple[int, int, int], dict] = {}
    memo_lock = threading.Lock()

    @app.exception_handler(HierGraphError)
    async def on_engine_error(request: Request, exc: HierGraphError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"error": {"code": "malformed", "message": str(exc.errors()[:3])}},
        )

    def node_json(nid: int) -> dict:
        node = tree.require(nid)
        base = {
            "id": nid,
            "kind": node.kind,
            "parent": node.parent,
            "depth": tree.depth[nid],
            "open_count": len(node.open_nodes),
        }
        if isinstance(node, LeafSuperNode):
            base["member_count"] = len(node.member_nodes)
            base["loaded"] = node.loaded
        else:
            base["children"] = list(node.children)
            base["member_count"] = tree.closure_size(nid)
            base["superedges"] = [
                {"a": a, "b": b, "weight": se.weight}
                for (a, b), se in sorted(node.superedges.items())
            ]
        return base

    @app.get("/api/tree")
    def api_tree():
        leaves = tree.leaf_ids()
        return {
            "version": tree.meta.version,
            "k": tree.meta.k,
            "h": tree.meta.h,
            "node_count": tree.meta.n_nodes,
            "edge_count": tree.meta.n_edges,
            "root": tree.root,
            "leaf_count": len(leaves),
            "nodes": [node_json(nid) for nid in sorted(tree.nodes)],
        }

    @app.get("/api/supernode/{nid}")
    def api_supernode(nid: int):
        detail = node_json(nid)
        node = tree.require(nid)
        detail["open_nodes"] = sorted(node.open_nodes)
        if isinstance(node, LeafSuperNode):
            detail["members"] = sorted(node.member_nodes)
        return detail

    @app.get("/api/supernode/{nid}/closure")
    def api_closure(nid: int):
        return {"id": nid, "closure": sorted(tree.closure(nid))}

    @app.get("/api/connectivity")
    def api_connectivity(a: int, b: int):
        result = connectivity(tree, a, b)
        return {
            "a": a,
            "b": b,
            "meeting_point": result.meeting_point,
            "weight": result.weight,
            "edges": [[e.source, e.target, e.weight] for e in result.edges],
        }

    @app.get("/api/node/{node_id}/external")
    def api_external(node_id: int):
        hood = external_neighbors(tree, node_id)
        return {
            "node": node_id,
            "entries": [
                {
                    "edge": [e.edge.source, e.edge.target, e.edge.weight],
                    "neighbor": e.neighbor,
                    "neighbor_leaf": e.neighbor_leaf,
                    "resolved_at": e.resolved_at,
                }
                for e in hood.entries
            ],
        }

    @app.get("/api/search")
    def api_search(label: str):
        return {"query": label, "hits": _search_labels(tree, label)}

    @app.post("/api/leaf/{nid}/expand")
    def api_expand(nid: int):
        sub = tree.expand_leaf(nid)
        return {
            "leaf": nid,
            "loaded": True,
            "members": [int(x) for x in sub.ids],
            "edges": [[int(u), int(v), float(w)] for u, v, w in zip(sub.eu, sub.ev, sub.ew)],
            "labels": {str(k): v for k, v in sorted(sub.labels.items())},
        }

    @app.post("/api/leaf/{nid}/collapse")
    def api_collapse(nid: int):
        tree.collapse_leaf(nid)
        return {"leaf": nid, "loaded": False}

    @app.get("/api/leaf/{nid}/layout")
    def api_layout(nid: int, seed: int = 0, iterations: int = 300):
        sub = tree.leaf_subgraph(nid)  # requires a prior expand
        key = (nid, seed, iterations)
        with memo_lock:
            cached = layout_memo.get(key)
        if cached is not None:
            return cached
        result = layout_leaf(sub, seed=seed, iterations=iterations, leaf_id=nid).to_json()
        with memo_lock:
            if len(layout_memo) > 64:
                layout_memo.clear()
            layout_memo[key] = result
        return result

    @app.get("/api/leaf/{nid}/metrics")
    def api_metrics(nid: int):
        sub = tree.expand_leaf(nid)
        report = metrics_report(sub)
        payload = report.to_json()
        payload["leaf"] = nid
        return payload

    @app.get("/api/layout/hierarchy")
    def api_layout_hierarchy():
        return layout_hierarchy(tree).to_json()

    @app.get("/api/cache")
    def api_cache():
        return {
            "cap": tree.cache.cap,
            "resident": tree.cache.resident(),
            "loads": tree.cache.loads,
            "evictions": tree.cache.evictions,
            "peak_resident": tree.cache.peak_resident,
        }

    return app


def _search_labels(tree: GraphTree, query: str, limit: int = 1000) -> list[dict]:
    """Case-insensitive substring scan over the leaf files' label lines."""
    needle = query.lower()
    hits: list[dict] = []
    for nid in tree.leaf_ids():
        node = tree.nodes[nid]
        path = tree.store_dir / node.leaf_file
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if not line.startswith("N "):
                    continue
                rest = line.rstrip("\n")[2:]
                if " " not in rest:
                    continue
                sid, label = rest.split(" ", 1)
                if needle in label.lower():
                    root_path = [*reversed(tree.parents(nid)), nid]
                    hits.append({"node": int(sid), "label": label, "path": root_path})
                    if len(hits) >= limit:
                        return hits
    return hits
