"""The partition hierarchy as a concrete, file-backed tree.

A ``GraphTree`` mirrors a hierarchy plan: internal ``SuperNode``s hold
the bundles of original edges (``SuperEdge``) crossing each pair of
their children, leaf nodes own a block of graph nodes whose induced
subgraph lives in one file per leaf. Leaf subgraphs are loaded and
released through a bounded LRU cache, so arbitrarily large graphs can
be assembled, filled and queried without ever holding all edges in
memory.

Filling works bottom-up: each leaf contributes records for its
boundary-crossing edges, an inner node matches records coming from
different children (those edges land in the SuperEdge of that child
pair) and forwards the rest upward. A record dies exactly at the first
common parent of its two endpoints' leaves, so every edge is stored
exactly once tree-wide and the root is left with nothing pending.
Open-node sets fall out of the same pass: a node is open at every
ancestor whose boundary one of its edges still crosses.
"""

from __future__ import annotations

import hashlib
import shutil
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ChecksumError,
    LeafNotLoadedError,
    NotALeafError,
    ResidualEdgeError,
    StoreError,
    StoreVersionError,
    TreeError,
    UnknownNodeError,
    UnknownSuperNodeError,
)
from .graph import Graph, format_weight
from .partition import HierarchyPlan

__all__ = [
    "SuperEdge",
    "SuperNode",
    "LeafSuperNode",
    "GraphTree",
    "TreeMeta",
    "assemble_tree",
    "fill_graph_tree",
    "save_tree",
    "load_tree",
]

MANIFEST = "manifest.tsv"
CHECKSUMS = "checksums.tsv"
LEAF_DIR = "leaves"
SEDGE_DIR = "superedges"
STAGING_DIR = "staging"
FORMAT_VERSION = "v1"


class SuperEdge:
    """Bundle of original edges between two sibling communities.

    ``weight`` is the number of bundled edges, not a weight sum; the
    original per-edge weights ride along untouched.
    """

    __slots__ = ("side_a", "side_b", "u", "v", "w")

    def __init__(self, side_a: int, side_b: int, u=None, v=None, w=None):
        self.side_a = side_a
        self.side_b = side_b
        self.u = np.asarray(u if u is not None else [], dtype=np.int64)
        self.v = np.asarray(v if v is not None else [], dtype=np.int64)
        self.w = np.asarray(w if w is not None else [], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.u)

    @property
    def weight(self) -> int:
        return len(self.u)

    @property
    def edges(self):
        from .graph import Edge

        return [Edge(int(a), int(b), float(c)) for a, b, c in zip(self.u, self.v, self.w)]

    def edge_keys(self) -> set[tuple[int, int]]:
        return set(zip(self.u.tolist(), self.v.tolist()))

    def touching(self, node: int):
        """Rows incident to one graph node: (u, v, w) arrays."""
        mask = (self.u == node) | (self.v == node)
        return self.u[mask], self.v[mask], self.w[mask]

    def __repr__(self):
        return f"SuperEdge({self.side_a},{self.side_b}, |e|={len(self)})"


@dataclass
class LeafSuperNode:
    """Bottom-level community: a block of graph nodes plus a subgraph file."""

    id: int
    parent: int
    member_nodes: frozenset[int]
    leaf_file: str
    open_nodes: frozenset[int] = frozenset()
    loaded: bool = False
    internal_edge_count: int | None = None

    kind = "L"

    @property
    def children(self) -> list[int]:
        return []


@dataclass
class SuperNode:
    """Inner tree node: ordered children plus their pairwise SuperEdges."""

    id: int
    parent: int | None
    children: list[int] = field(default_factory=list)
    superedges: dict[tuple[int, int], SuperEdge] = field(default_factory=dict)
    open_nodes: frozenset[int] = frozenset()

    kind = "S"

    def superedge(self, a: int, b: int) -> SuperEdge:
        key = (a, b) if a < b else (b, a)
        return self.superedges.get(key) or SuperEdge(key[0], key[1])


@dataclass
class TreeMeta:
    k: int
    h: int
    n_nodes: int
    n_edges: int
    version: str = FORMAT_VERSION


class _LeafCache:
    """LRU map leaf id -> subgraph; all mutation behind one lock."""

    def __init__(self, cap: int):
        self.cap = max(1, cap)
        self._map: OrderedDict[int, Graph] = OrderedDict()
        self._lock = threading.Lock()
        self.loads = 0
        self.evictions = 0
        self.peak_resident = 0

    def get(self, leaf_id: int):
        with self._lock:
            g = self._map.get(leaf_id)
            if g is not None:
                self._map.move_to_end(leaf_id)
            return g

    def put(self, leaf_id: int, g: Graph) -> list[int]:
        """Insert and return the leaf ids evicted to make room."""
        evicted = []
        with self._lock:
            if leaf_id not in self._map:
                self._map[leaf_id] = g
                self.loads += 1
            self._map.move_to_end(leaf_id)
            while len(self._map) > self.cap:
                old, _ = self._map.popitem(last=False)
                self.evictions += 1
                evicted.append(old)
            self.peak_resident = max(self.peak_resident, len(self._map))
        return evicted

    def drop(self, leaf_id: int) -> bool:
        with self._lock:
            return self._map.pop(leaf_id, None) is not None

    def resident(self) -> int:
        with self._lock:
            return len(self._map)


class GraphTree:
    """The assembled hierarchy with its on-disk store directory."""

    def __init__(
        self,
        root: int,
        nodes: dict[int, SuperNode | LeafSuperNode],
        node_index: dict[int, int],
        store_dir: Path,
        meta: TreeMeta,
        cache_leaves: int = 32,
        filled: bool = False,
    ):
        self.root = root
        self.nodes = nodes
        self.node_index = node_index
        self.store_dir = Path(store_dir)
        self.meta = meta
        self.cache = _LeafCache(cache_leaves)
        self.filled = filled
        self._load_lock = threading.Lock()
        self._rebuild_indexes()

    def _rebuild_indexes(self):
        self.depth = {self.root: 0}
        order = [self.root]
        for nid in order:
            node = self.nodes[nid]
            for c in node.children:
                self.depth[c] = self.depth[nid] + 1
                order.append(c)
        self._bfs_order = order
        # vectorized lookup tables for bulk fills and audits
        max_id = max(self.nodes) if self.nodes else 0
        self._parent_arr = np.full(max_id + 1, -1, dtype=np.int64)
        self._depth_arr = np.full(max_id + 1, -1, dtype=np.int64)
        for nid, node in self.nodes.items():
            self._parent_arr[nid] = -1 if node.parent is None else node.parent
            self._depth_arr[nid] = self.depth[nid]
        self._gid = np.fromiter(sorted(self.node_index), dtype=np.int64, count=len(self.node_index))
        self._gleaf = np.fromiter((self.node_index[int(i)] for i in self._gid), dtype=np.int64, count=len(self._gid))

    # -- structure queries --------------------------------------------------

    def require(self, nid: int) -> SuperNode | LeafSuperNode:
        try:
            return self.nodes[nid]
        except KeyError:
            raise UnknownSuperNodeError(nid) from None

    def is_leaf(self, nid: int) -> bool:
        return isinstance(self.require(nid), LeafSuperNode)

    def leaf_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes.values() if isinstance(n, LeafSuperNode))

    def supernode_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes.values() if isinstance(n, SuperNode))

    def leaf_of(self, graph_node: int) -> int:
        try:
            return self.node_index[graph_node]
        except KeyError:
            raise UnknownNodeError(graph_node) from None

    def closure(self, nid: int) -> frozenset[int]:
        """All graph nodes ultimately contained in the subtree of nid."""
        node = self.require(nid)
        if isinstance(node, LeafSuperNode):
            return node.member_nodes
        out: set[int] = set()
        stack = [nid]
        while stack:
            cur = self.nodes[stack.pop()]
            if isinstance(cur, LeafSuperNode):
                out.update(cur.member_nodes)
            else:
                stack.extend(cur.children)
        return frozenset(out)

    def closure_size(self, nid: int) -> int:
        node = self.require(nid)
        if isinstance(node, LeafSuperNode):
            return len(node.member_nodes)
        return sum(self.closure_size(c) for c in node.children)

    def parents(self, nid: int) -> list[int]:
        """Ancestors, immediate parent first, root last."""
        self.require(nid)
        out = []
        cur = self.nodes[nid].parent
        while cur is not None:
            out.append(cur)
            cur = self.nodes[cur].parent
        return out

    def contains(self, nid: int, graph_node: int) -> bool:
        """Closure membership in O(depth) via the leaf index."""
        self.require(nid)
        cur = self.leaf_of(graph_node)
        target = self.depth[nid]
        while self.depth[cur] > target:
            cur = self.nodes[cur].parent
        return cur == nid

    def child_under(self, nid: int, graph_node: int) -> int | None:
        """The child of nid whose subtree holds graph_node, if any."""
        cur = self.leaf_of(graph_node)
        target = self.depth[nid] + 1
        while self.depth[cur] > target:
            cur = self.nodes[cur].parent
        if self.depth[cur] == target and self.nodes[cur].parent == nid:
            return cur
        return None

    # -- leaf subgraphs -----------------------------------------------------

    def expand_leaf(self, nid: int) -> Graph:
        """Load (or re-touch) a leaf subgraph through the LRU cache."""
        node = self.require(nid)
        if not isinstance(node, LeafSuperNode):
            raise NotALeafError(nid)
        cached = self.cache.get(nid)
        if cached is not None:
            return cached
        with self._load_lock:
            cached = self.cache.get(nid)
            if cached is not None:
                return cached
            g = self._read_leaf_file(node)
            node.loaded = True
            node.internal_edge_count = g.edge_count()
            for evicted in self.cache.put(nid, g):
                self.nodes[evicted].loaded = False
            return g

    def collapse_leaf(self, nid: int) -> None:
        node = self.require(nid)
        if not isinstance(node, LeafSuperNode):
            raise NotALeafError(nid)
        if self.cache.drop(nid):
            node.loaded = False

    def leaf_subgraph(self, nid: int) -> Graph:
        """The loaded subgraph of a leaf; requires a prior expand."""
        node = self.require(nid)
        if not isinstance(node, LeafSuperNode):
            raise NotALeafError(nid)
        g = self.cache.get(nid)
        if g is None:
            raise LeafNotLoadedError(nid)
        return g

    def internal_superedge(self, nid: int) -> SuperEdge:
        """The leaf's own edge bundle (both sides the leaf itself)."""
        g = self.expand_leaf(nid)
        return SuperEdge(nid, nid, g.eu, g.ev, g.ew)

    def internal_edge_count(self, nid: int) -> int:
        node = self.require(nid)
        if not isinstance(node, LeafSuperNode):
            raise NotALeafError(nid)
        if node.internal_edge_count is None:
            node.internal_edge_count = _count_leaf_edges(self.store_dir / node.leaf_file)
        return node.internal_edge_count

    def _read_leaf_file(self, node: LeafSuperNode) -> Graph:
        path = self.store_dir / node.leaf_file
        if not path.exists():
            raise StoreError(f"missing leaf file {node.leaf_file} for leaf {node.id}")
        ids, labels, eu, ev, ew = _parse_leaf_file(path)
        if set(ids.tolist()) != set(node.member_nodes):
            raise StoreError(f"leaf file {node.leaf_file} does not match manifest members")
        return Graph(ids, eu, ev, ew, labels)

    # -- bulk helpers shared by fill / audit / connectivity -------------------

    def leaf_of_many(self, nodes: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self._gid, nodes)
        bad = (pos >= len(self._gid)) | (self._gid[np.minimum(pos, len(self._gid) - 1)] != nodes)
        if bad.any():
            raise UnknownNodeError(int(nodes[np.argmax(bad)]))
        return self._gleaf[pos]

    def lift_to_depth(self, tree_ids: np.ndarray, depth: int) -> np.ndarray:
        out = tree_ids.copy()
        while True:
            mask = self._depth_arr[out] > depth
            if not mask.any():
                return out
            out[mask] = self._parent_arr[out[mask]]

    def descends_from(self, nodes: np.ndarray, ancestor: int) -> np.ndarray:
        """Vectorized closure membership for an array of graph nodes."""
        lifted = self.lift_to_depth(self.leaf_of_many(nodes), self.depth[ancestor])
        return lifted == ancestor


def _count_leaf_edges(path: Path) -> int:
    count = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("E "):
                count += 1
    return count


def _parse_leaf_file(path: Path):
    ids: list[int] = []
    labels: dict[int, str] = {}
    eu: list[int] = []
    ev: list[int] = []
    ew: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            if line.startswith("N "):
                rest = line[2:]
                if " " in rest:
                    sid, label = rest.split(" ", 1)
                    node = int(sid)
                    labels[node] = label
                else:
                    node = int(rest)
                ids.append(node)
            elif line.startswith("E "):
                parts = line.split()
                eu.append(int(parts[1]))
                ev.append(int(parts[2]))
                ew.append(float(parts[3]))
            else:
                raise StoreError(f"{path}:{line_no}: unrecognized leaf line {line!r}")
    return (
        np.asarray(ids, dtype=np.int64),
        labels,
        np.asarray(eu, dtype=np.int64),
        np.asarray(ev, dtype=np.int64),
        np.asarray(ew, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------


def assemble_tree(
    g: Graph,
    plan: HierarchyPlan,
    store_dir: str | Path,
    cache_leaves: int = 32,
) -> GraphTree:
    """Create the unfilled tree skeleton and write its store files.

    Each leaf's induced subgraph goes to one file; every edge crossing
    two leaves is recorded from both endpoints' sides into the staging
    file of the respective leaf's parent, ready for the bottom-up fill.
    """
    store_dir = Path(store_dir)
    plan_leaves = plan.leaves()
    member_concat = np.concatenate([leaf.members for leaf in plan_leaves]) if plan_leaves else np.empty(0, np.int64)
    if len(member_concat) != g.node_count() or not np.array_equal(np.sort(member_concat), g.ids):
        raise TreeError("plan leaves do not partition the graph's node set")

    store_dir.mkdir(parents=True, exist_ok=True)
    (store_dir / LEAF_DIR).mkdir(exist_ok=True)
    (store_dir / SEDGE_DIR).mkdir(exist_ok=True)
    staging = store_dir / STAGING_DIR
    if staging.exists():
        shutil.rmtree(staging)
    staging.mkdir()

    # breadth-first numbering; a leaf plan root still gets a super root
    nodes: dict[int, SuperNode | LeafSuperNode] = {}
    node_index: dict[int, int] = {}
    nodes[0] = SuperNode(id=0, parent=None)
    next_id = 1
    if plan.root.is_leaf:
        pending: list[tuple] = [(plan.root, 0)]
    else:
        pending = [(child, 0) for child in plan.root.children]
    while pending:
        nxt: list[tuple] = []
        for plan_node, parent_id in pending:
            nid = next_id
            next_id += 1
            if plan_node.is_leaf:
                leaf = LeafSuperNode(
                    id=nid,
                    parent=parent_id,
                    member_nodes=frozenset(int(x) for x in plan_node.members),
                    leaf_file=f"{LEAF_DIR}/leaf_{nid}.tsv",
                )
                nodes[nid] = leaf
                nodes[parent_id].children.append(nid)
                for m in plan_node.members.tolist():
                    node_index[m] = nid
            else:
                sn = SuperNode(id=nid, parent=parent_id)
                nodes[nid] = sn
                nodes[parent_id].children.append(nid)
                nxt.extend((child, nid) for child in plan_node.children)
        pending = nxt

    kind_mix = {
        nid
        for nid, n in nodes.items()
        if isinstance(n, SuperNode) and len({nodes[c].kind for c in n.children}) > 1
    }
    if kind_mix:
        raise TreeError(f"mixed child kinds under tree nodes {sorted(kind_mix)}")

    meta = TreeMeta(k=plan.spec.k, h=plan.spec.h, n_nodes=g.node_count(), n_edges=g.edge_count())
    tree = GraphTree(0, nodes, node_index, store_dir, meta, cache_leaves=cache_leaves, filled=False)

    _write_leaf_and_staging_files(g, tree)
    return tree


def _write_leaf_and_staging_files(g: Graph, tree: GraphTree) -> None:
    leaf_by_pos = np.empty(g.node_count(), dtype=np.int64)
    for nid in tree.leaf_ids():
        members = np.fromiter(tree.nodes[nid].member_nodes, dtype=np.int64, count=len(tree.nodes[nid].member_nodes))
        leaf_by_pos[np.searchsorted(g.ids, np.sort(members))] = nid

    lu = leaf_by_pos[g._eu_d]
    lv = leaf_by_pos[g._ev_d]
    internal = lu == lv

    # leaf files: N lines (sorted members, labels attached), then E lines
    iu, iv, iw = g.eu[internal], g.ev[internal], g.ew[internal]
    il = lu[internal]
    order = np.argsort(il, kind="stable")
    iu, iv, iw, il = iu[order], iv[order], iw[order], il[order]
    bounds = np.searchsorted(il, np.asarray(tree.leaf_ids()))
    bounds = np.append(bounds, len(il))
    for slot, nid in enumerate(tree.leaf_ids()):
        node = tree.nodes[nid]
        lines: list[str] = []
        for m in sorted(node.member_nodes):
            label = g.labels.get(m)
            lines.append(f"N {m} {label}" if label is not None else f"N {m}")
        lo, hi = bounds[slot], bounds[slot + 1]
        for a, b, c in zip(iu[lo:hi].tolist(), iv[lo:hi].tolist(), iw[lo:hi].tolist()):
            lines.append(f"E {a} {b} {format_weight(c)}")
        _write_lines(tree.store_dir / node.leaf_file, lines)

    # staging: records (child leaf, inside endpoint, edge) per leaf parent
    cu, cv, cw = g.eu[~internal], g.ev[~internal], g.ew[~internal]
    clu, clv = lu[~internal], lv[~internal]
    if len(cu):
        parent_arr = tree._parent_arr
        rec_parent = np.concatenate([parent_arr[clu], parent_arr[clv]])
        rec_child = np.concatenate([clu, clv])
        rec_inside = np.concatenate([cu, cv])
        rec_u = np.concatenate([cu, cu])
        rec_v = np.concatenate([cv, cv])
        rec_w = np.concatenate([cw, cw])
        order = np.lexsort((rec_v, rec_u, rec_inside, rec_child, rec_parent))
        rec_parent = rec_parent[order]
        rec_child, rec_inside = rec_child[order], rec_inside[order]
        rec_u, rec_v, rec_w = rec_u[order], rec_v[order], rec_w[order]
        uniq_parents, starts = np.unique(rec_parent, return_index=True)
        starts = np.append(starts, len(rec_parent))
        for i, p in enumerate(uniq_parents.tolist()):
            lo, hi = starts[i], starts[i + 1]
            lines = [
                f"{c} {ins} {a} {b} {format_weight(wt)}"
                for c, ins, a, b, wt in zip(
                    rec_child[lo:hi].tolist(),
                    rec_inside[lo:hi].tolist(),
                    rec_u[lo:hi].tolist(),
                    rec_v[lo:hi].tolist(),
                    rec_w[lo:hi].tolist(),
                )
            ]
            _write_lines(tree.store_dir / STAGING_DIR / f"stage_{p}.tsv", lines)


def _write_lines(path: Path, lines: list[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if lines:
            fh.write("\n".join(lines))
            fh.write("\n")


# ---------------------------------------------------------------------------
# bottom-up fill
# ---------------------------------------------------------------------------


class _Batch:
    """Pending boundary-edge records flowing up during the fill."""

    __slots__ = ("child", "inside", "u", "v", "w")

    def __init__(self, child, inside, u, v, w):
        self.child = child
        self.inside = inside
        self.u = u
        self.v = v
        self.w = w

    @classmethod
    def empty(cls):
        z = np.empty(0, np.int64)
        return cls(z, z, z, z, np.empty(0, np.float64))

    @classmethod
    def concat(cls, batches):
        if not batches:
            return cls.empty()
        return cls(
            np.concatenate([b.child for b in batches]),
            np.concatenate([b.inside for b in batches]),
            np.concatenate([b.u for b in batches]),
            np.concatenate([b.v for b in batches]),
            np.concatenate([b.w for b in batches]),
        )

    def __len__(self):
        return len(self.inside)

    def take(self, mask):
        return _Batch(self.child[mask], self.inside[mask], self.u[mask], self.v[mask], self.w[mask])


def fill_graph_tree(tree: GraphTree) -> GraphTree:
    """Bottom-up fill: resolve SuperEdges, open-node sets, and verify
    that nothing is left pending at the root."""
    if tree.filled:
        return tree
    staging = tree.store_dir / STAGING_DIR

    def fill(nid: int) -> _Batch:
        node = tree.nodes[nid]
        assert isinstance(node, SuperNode)
        child_nodes = [tree.nodes[c] for c in node.children]
        if child_nodes and all(isinstance(c, LeafSuperNode) for c in child_nodes):
            batch = _read_staging(staging / f"stage_{nid}.tsv")
            if len(batch):
                tree.leaf_of_many(batch.u)  # endpoint validity
                tree.leaf_of_many(batch.v)
            for leaf in child_nodes:
                mask = batch.child == leaf.id
                leaf.open_nodes = frozenset(np.unique(batch.inside[mask]).tolist())
                n_count, e_count = _scan_leaf_file(tree.store_dir / leaf.leaf_file)
                if n_count != len(leaf.member_nodes):
                    raise StoreError(
                        f"leaf file {leaf.leaf_file} lists {n_count} nodes, expected {len(leaf.member_nodes)}"
                    )
                leaf.internal_edge_count = e_count
        else:
            parts = []
            for c in node.children:
                sub = fill(c)
                sub.child = np.full(len(sub), c, dtype=np.int64)
                parts.append(sub)
            batch = _Batch.concat(parts)

        if not len(batch):
            node.open_nodes = frozenset()
            return batch

        outside = np.where(batch.inside == batch.u, batch.v, batch.u)
        lifted = tree.lift_to_depth(tree.leaf_of_many(outside), tree.depth[nid] + 1)
        matched = tree._parent_arr[lifted] == nid

        keep = matched & (batch.inside == batch.u)  # one record per matched edge
        if keep.any():
            ca = np.minimum(batch.child[keep], lifted[keep])
            cb = np.maximum(batch.child[keep], lifted[keep])
            mu, mv, mw = batch.u[keep], batch.v[keep], batch.w[keep]
            order = np.lexsort((mv, mu, cb, ca))
            ca, cb, mu, mv, mw = ca[order], cb[order], mu[order], mv[order], mw[order]
            pair_key = ca * np.int64(len(tree._parent_arr)) + cb
            uniq, starts = np.unique(pair_key, return_index=True)
            starts = np.append(starts, len(pair_key))
            for i in range(len(uniq)):
                lo, hi = starts[i], starts[i + 1]
                key = (int(ca[lo]), int(cb[lo]))
                node.superedges[key] = SuperEdge(key[0], key[1], mu[lo:hi], mv[lo:hi], mw[lo:hi])

        pending = batch.take(~matched)
        node.open_nodes = frozenset(np.unique(pending.inside).tolist())
        return pending

    residual = fill(tree.root)
    if len(residual):
        raise ResidualEdgeError(
            f"{len(residual)} edge records left unresolved at the root; input is inconsistent"
        )
    tree.filled = True
    if staging.exists():
        shutil.rmtree(staging)
    return tree


def _scan_leaf_file(path: Path) -> tuple[int, int]:
    n_count = 0
    e_count = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("N "):
                n_count += 1
            elif line.startswith("E "):
                e_count += 1
    return n_count, e_count


def _read_staging(path: Path) -> _Batch:
    if not path.exists():
        return _Batch.empty()
    child: list[int] = []
    inside: list[int] = []
    u: list[int] = []
    v: list[int] = []
    w: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            child.append(int(parts[0]))
            inside.append(int(parts[1]))
            u.append(int(parts[2]))
            v.append(int(parts[3]))
            w.append(float(parts[4]))
    return _Batch(
        np.asarray(child, dtype=np.int64),
        np.asarray(inside, dtype=np.int64),
        np.asarray(u, dtype=np.int64),
        np.asarray(v, dtype=np.int64),
        np.asarray(w, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# save / load
# ---------------------------------------------------------------------------


def save_tree(tree: GraphTree) -> Path:
    """Write manifest, SuperEdge files and per-file checksums.

    Leaf files were already written at assembly; everything is sorted so
    identical builds produce byte-identical stores.
    """
    if not tree.filled:
        raise TreeError("refusing to save an unfilled tree")
    store = tree.store_dir
    m = tree.meta
    lines = [f"graphtree {m.version} {m.k} {m.h} {m.n_nodes} {m.n_edges}"]
    for nid in sorted(tree.nodes):
        node = tree.nodes[nid]
        parent = "-" if node.parent is None else str(node.parent)
        if isinstance(node, LeafSuperNode):
            kids = ",".join(str(x) for x in sorted(node.member_nodes)) or "-"
        else:
            kids = ",".join(str(c) for c in node.children) or "-"
        opens = ",".join(str(x) for x in sorted(node.open_nodes)) or "-"
        lines.append(f"node {nid} {node.kind} {parent} {kids} {opens}")
    _write_lines(store / MANIFEST, lines)

    for f in (store / SEDGE_DIR).glob("sn_*.tsv"):
        f.unlink()
    for nid in tree.supernode_ids():
        node = tree.nodes[nid]
        if not node.superedges:
            continue
        rows: list[str] = []
        for (ca, cb) in sorted(node.superedges):
            se = node.superedges[(ca, cb)]
            rows.extend(
                f"{ca} {cb} {a} {b} {format_weight(c)}"
                for a, b, c in zip(se.u.tolist(), se.v.tolist(), se.w.tolist())
            )
        _write_lines(store / SEDGE_DIR / f"sn_{nid}.tsv", rows)

    checks = []
    tracked = [store / MANIFEST]
    tracked += sorted((store / LEAF_DIR).glob("leaf_*.tsv"))
    tracked += sorted((store / SEDGE_DIR).glob("sn_*.tsv"))
    for f in tracked:
        rel = f.relative_to(store).as_posix()
        checks.append(f"{_sha256(f)} {rel}")
    _write_lines(store / CHECKSUMS, sorted(checks, key=lambda s: s.split(" ", 1)[1]))
    return store


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def verify_store(store_dir: str | Path) -> list[str]:
    """Check every tracked file exists and hashes as recorded.

    Returns the list of tracked relative paths.
    """
    store = Path(store_dir)
    cs = store / CHECKSUMS
    if not cs.exists():
        raise StoreError(f"missing {CHECKSUMS} in {store}")
    tracked = []
    with open(cs, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            digest, rel = line.split(" ", 1)
            f = store / rel
            if not f.exists():
                raise StoreError(f"missing file {rel}")
            if _sha256(f) != digest:
                raise ChecksumError(rel)
            tracked.append(rel)
    return tracked


def load_tree(store_dir: str | Path, cache_leaves: int = 32, verify: bool = True) -> GraphTree:
    """Rebuild a tree from its store; leaf subgraphs stay on disk."""
    store = Path(store_dir)
    manifest = store / MANIFEST
    if not manifest.exists():
        raise StoreError(f"missing {MANIFEST} in {store}")
    if verify:
        verify_store(store)

    nodes: dict[int, SuperNode | LeafSuperNode] = {}
    node_index: dict[int, int] = {}
    meta: TreeMeta | None = None
    root_id: int | None = None
    with open(manifest, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            parts = line.split(" ")
            if line_no == 1:
                if len(parts) != 6 or parts[0] != "graphtree":
                    raise StoreError(f"{manifest}:1: bad header")
                if parts[1] != FORMAT_VERSION:
                    raise StoreVersionError(
                        f"store format {parts[1]} unsupported, expected {FORMAT_VERSION}"
                    )
                meta = TreeMeta(
                    k=int(parts[2]), h=int(parts[3]), n_nodes=int(parts[4]), n_edges=int(parts[5])
                )
                continue
            if parts[0] != "node" or len(parts) != 6:
                raise StoreError(f"{manifest}:{line_no}: bad node line")
            nid = int(parts[1])
            kind = parts[2]
            parent = None if parts[3] == "-" else int(parts[3])
            kids = [] if parts[4] == "-" else [int(x) for x in parts[4].split(",")]
            opens = frozenset() if parts[5] == "-" else frozenset(int(x) for x in parts[5].split(","))
            if kind == "L":
                leaf = LeafSuperNode(
                    id=nid,
                    parent=parent,
                    member_nodes=frozenset(kids),
                    leaf_file=f"{LEAF_DIR}/leaf_{nid}.tsv",
                    open_nodes=opens,
                )
                nodes[nid] = leaf
                for m in kids:
                    node_index[m] = nid
            elif kind == "S":
                nodes[nid] = SuperNode(id=nid, parent=parent, children=kids, open_nodes=opens)
                if parent is None:
                    root_id = nid
            else:
                raise StoreError(f"{manifest}:{line_no}: unknown node kind {kind!r}")
    if meta is None or root_id is None:
        raise StoreError(f"{manifest}: incomplete manifest")

    tree = GraphTree(root_id, nodes, node_index, store, meta, cache_leaves=cache_leaves, filled=True)
    for nid in tree.supernode_ids():
        sf = store / SEDGE_DIR / f"sn_{nid}.tsv"
        if sf.exists():
            _load_superedges(sf, tree.nodes[nid])
    return tree


def _load_superedges(path: Path, node: SuperNode) -> None:
    ca: list[int] = []
    cb: list[int] = []
    u: list[int] = []
    v: list[int] = []
    w: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            ca.append(int(parts[0]))
            cb.append(int(parts[1]))
            u.append(int(parts[2]))
            v.append(int(parts[3]))
            w.append(float(parts[4]))
    if not ca:
        return
    ca_a = np.asarray(ca, dtype=np.int64)
    cb_a = np.asarray(cb, dtype=np.int64)
    u_a = np.asarray(u, dtype=np.int64)
    v_a = np.asarray(v, dtype=np.int64)
    w_a = np.asarray(w, dtype=np.float64)
    key = ca_a * np.int64(1 + max(cb)) + cb_a
    uniq, starts = np.unique(key, return_index=True)
    starts = np.append(starts, len(key))
    for i in range(len(uniq)):
        lo, hi = starts[i], starts[i + 1]
        pair = (int(ca_a[lo]), int(cb_a[lo]))
        node.superedges[pair] = SuperEdge(pair[0], pair[1], u_a[lo:hi], v_a[lo:hi], w_a[lo:hi])
