"""Store auditing: re-derive every structural invariant from the files.

The audit deliberately re-parses the on-disk store (manifest, leaf
files, SuperEdge files) with its own lightweight reader instead of
trusting any in-memory tree, so a builder bug that corrupts the store
cannot hide behind consistent in-memory state. Checks:

* leaf member sets are pairwise disjoint and cover the recorded node set
* every edge appears exactly once across all leaf and SuperEdge files,
  and the total matches the recorded edge count
* each SuperEdge row joins two different children of its owning node,
  i.e. every cross edge is stored at the first common parent
* open-node sets in the manifest equal the sets implied by the edges
* the worst sibling-size imbalance, reported as an epsilon-like ratio
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import StoreError
from .tree import CHECKSUMS, LEAF_DIR, MANIFEST, SEDGE_DIR, verify_store

__all__ = ["AuditReport", "audit_store"]


@dataclass
class AuditReport:
    eq_disjoint_ok: bool = False          # no node in two leaves
    eq_cover_ok: bool = False             # leaves cover the full node set
    eq_edges_once_ok: bool = False        # disjoint union of bundles = E
    placement_ok: bool = False            # cross edges sit at the meeting node
    open_nodes_ok: bool = False
    balance_achieved: float = 0.0
    residual_at_root: int = 0
    leaf_count: int = 0
    node_count: int = 0
    edge_count: int = 0
    details: list[str] = field(default_factory=list)

    # names aligned with the structural equations the checks realize
    @property
    def eq1_ok(self) -> bool:
        return self.eq_disjoint_ok

    @property
    def eq2_ok(self) -> bool:
        return self.eq_cover_ok

    @property
    def eq6_ok(self) -> bool:
        return self.eq_edges_once_ok

    @property
    def ok(self) -> bool:
        return (
            self.eq_disjoint_ok
            and self.eq_cover_ok
            and self.eq_edges_once_ok
            and self.placement_ok
            and self.open_nodes_ok
            and self.residual_at_root == 0
        )

    def lines(self) -> list[str]:
        out = [
            f"leaves-disjoint {'ok' if self.eq_disjoint_ok else 'FAIL'}",
            f"leaves-cover-v {'ok' if self.eq_cover_ok else 'FAIL'}",
            f"edges-exactly-once {'ok' if self.eq_edges_once_ok else 'FAIL'}",
            f"superedge-placement {'ok' if self.placement_ok else 'FAIL'}",
            f"open-nodes {'ok' if self.open_nodes_ok else 'FAIL'}",
            f"residual-at-root {self.residual_at_root}",
            f"balance-achieved {self.balance_achieved:.4f}",
            f"counts leaves={self.leaf_count} nodes={self.node_count} edges={self.edge_count}",
        ]
        out.extend(self.details)
        return out

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "leaves_disjoint": self.eq_disjoint_ok,
            "leaves_cover_v": self.eq_cover_ok,
            "edges_exactly_once": self.eq_edges_once_ok,
            "superedge_placement": self.placement_ok,
            "open_nodes": self.open_nodes_ok,
            "residual_at_root": self.residual_at_root,
            "balance_achieved": self.balance_achieved,
            "leaf_count": self.leaf_count,
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "details": self.details,
        }


def _parse_manifest(store: Path):
    manifest = store / MANIFEST
    if not manifest.exists():
        raise StoreError(f"missing {MANIFEST} in {store}")
    header = None
    kind: dict[int, str] = {}
    parent: dict[int, int | None] = {}
    children: dict[int, list[int]] = {}
    members: dict[int, list[int]] = {}
    opens: dict[int, set[int]] = {}
    with open(manifest, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split(" ")
            if line_no == 1:
                if parts[0] != "graphtree" or len(parts) != 6:
                    raise StoreError(f"{manifest}:1: bad header")
                header = {
                    "version": parts[1],
                    "k": int(parts[2]),
                    "h": int(parts[3]),
                    "n_nodes": int(parts[4]),
                    "n_edges": int(parts[5]),
                }
                continue
            nid = int(parts[1])
            kind[nid] = parts[2]
            parent[nid] = None if parts[3] == "-" else int(parts[3])
            payload = [] if parts[4] == "-" else [int(x) for x in parts[4].split(",")]
            if parts[2] == "L":
                members[nid] = payload
                children[nid] = []
            else:
                children[nid] = payload
                members[nid] = []
            opens[nid] = set() if parts[5] == "-" else {int(x) for x in parts[5].split(",")}
    if header is None:
        raise StoreError(f"{manifest}: empty manifest")
    return header, kind, parent, children, members, opens


def audit_store(store_dir: str | Path, verify_checksums: bool = True) -> AuditReport:
    store = Path(store_dir)
    report = AuditReport()
    if verify_checksums:
        verify_store(store)
        report.details.append(f"checksums ok ({CHECKSUMS})")

    header, kind, parent, children, members, opens = _parse_manifest(store)
    leaf_ids = sorted(n for n, k in kind.items() if k == "L")
    report.leaf_count = len(leaf_ids)
    report.node_count = header["n_nodes"]
    report.edge_count = header["n_edges"]

    # depth map for placement / open-node walks
    roots = [n for n, p in parent.items() if p is None]
    depth: dict[int, int] = {}
    stack = [(r, 0) for r in roots]
    while stack:
        nid, d = stack.pop()
        depth[nid] = d
        stack.extend((c, d + 1) for c in children.get(nid, []))

    # membership: disjointness and cover
    all_members = np.sort(np.concatenate([np.asarray(members[l], dtype=np.int64) for l in leaf_ids])) if leaf_ids else np.empty(0, np.int64)
    n_unique = len(np.unique(all_members))
    report.eq_disjoint_ok = n_unique == len(all_members)
    report.eq_cover_ok = len(all_members) == header["n_nodes"] and report.eq_disjoint_ok
    leaf_of: dict[int, int] = {}
    for l in leaf_ids:
        for m in members[l]:
            leaf_of[m] = l

    # leaf files: members match, internal edge endpoints stay inside
    edges_seen: set[tuple[int, int]] = set()
    duplicate = 0
    internal_bad = 0
    leaf_file_mismatch = 0
    for l in leaf_ids:
        path = store / LEAF_DIR / f"leaf_{l}.tsv"
        if not path.exists():
            raise StoreError(f"missing file {LEAF_DIR}/leaf_{l}.tsv")
        mset = set(members[l])
        fset = set()
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("N "):
                    fset.add(int(line[2:].split(" ", 1)[0]))
                elif line.startswith("E "):
                    parts = line.split()
                    a, b = int(parts[1]), int(parts[2])
                    if a not in mset or b not in mset:
                        internal_bad += 1
                    key = (a, b) if a < b else (b, a)
                    if key in edges_seen:
                        duplicate += 1
                    edges_seen.add(key)
        if fset != mset:
            leaf_file_mismatch += 1
    if leaf_file_mismatch:
        report.details.append(f"leaf files disagreeing with manifest members: {leaf_file_mismatch}")
        report.eq_cover_ok = False

    # SuperEdge files: placement at the owning node, uniqueness, opens
    implied_open: dict[int, set[int]] = {n: set() for n in kind}
    placement_bad = 0
    sdir = store / SEDGE_DIR
    for path in sorted(sdir.glob("sn_*.tsv")):
        owner = int(path.stem.split("_")[1])
        own_children = set(children.get(owner, []))
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                ca, cb, a, b = int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3])
                key = (a, b) if a < b else (b, a)
                if key in edges_seen:
                    duplicate += 1
                edges_seen.add(key)
                if ca == cb or ca not in own_children or cb not in own_children:
                    placement_bad += 1
                    continue
                sides = []
                for endpoint in (a, b):
                    cur = leaf_of.get(endpoint)
                    if cur is None:
                        break
                    while cur is not None and depth[cur] > depth[owner] + 1:
                        implied_open[cur].add(endpoint)
                        cur = parent[cur]
                    if cur in (ca, cb):
                        implied_open[cur].add(endpoint)
                        sides.append(cur)
                if sorted(sides) != sorted((ca, cb)):
                    placement_bad += 1

    report.placement_ok = placement_bad == 0 and internal_bad == 0
    if internal_bad:
        report.details.append(f"leaf-internal edges with outside endpoints: {internal_bad}")
    if placement_bad:
        report.details.append(f"superedge rows at the wrong node: {placement_bad}")

    total_edges = len(edges_seen)
    report.eq_edges_once_ok = duplicate == 0 and total_edges == header["n_edges"]
    if duplicate:
        report.details.append(f"duplicate edges across bundles: {duplicate}")
    if total_edges != header["n_edges"]:
        report.details.append(f"edge files hold {total_edges} edges, manifest says {header['n_edges']}")
    report.residual_at_root = max(0, header["n_edges"] - total_edges)

    open_bad = [n for n in kind if implied_open[n] != opens[n]]
    report.open_nodes_ok = not open_bad
    if open_bad:
        report.details.append(f"open-node sets disagreeing with edges: {sorted(open_bad)[:10]}")

    # sibling balance, worst over all groups of >= 2 children
    sizes: dict[int, int] = {}

    def size_of(nid: int) -> int:
        if nid not in sizes:
            sizes[nid] = len(members[nid]) if kind[nid] == "L" else sum(size_of(c) for c in children[nid])
        return sizes[nid]

    worst = 0.0
    for nid, kids in children.items():
        if len(kids) < 2:
            continue
        ks = [size_of(c) for c in kids]
        worst = max(worst, max(ks) * len(ks) / sum(ks) - 1.0)
    report.balance_achieved = worst
    return report
