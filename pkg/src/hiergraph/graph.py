"""Flat undirected weighted graph: model, text I/O and per-subgraph metrics.

The graph is immutable after construction. Node ids are arbitrary
non-negative integers (sparse ids are fine); edges are kept in canonical
orientation (smaller endpoint first), deduplicated, and sorted, so two
graphs over the same data always serialize to identical bytes.

Internally endpoints are held both as original ids and as dense indices
into the sorted id array, with a CSR adjacency over the dense indices.
All bulk work (dedup, degrees, components) is vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import GraphFormatError, LoopEdgeError, UnknownNodeError

__all__ = [
    "Edge",
    "Graph",
    "MetricsReport",
    "load_graph",
    "write_graph",
    "degree_distribution",
    "connected_components",
    "hops",
    "metrics_report",
]


@dataclass(frozen=True, slots=True)
class Edge:
    """One undirected edge in canonical orientation (source < target)."""

    source: int
    target: int
    weight: float = 1.0

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError(f"loop edge at node {self.source}")
        if self.source > self.target:
            s, t = self.source, self.target
            object.__setattr__(self, "source", t)
            object.__setattr__(self, "target", s)

    def key(self) -> tuple[int, int]:
        return (self.source, self.target)


def format_weight(w: float) -> str:
    """Shortest decimal form: 2.0 -> '2', 0.5 -> '0.5'."""
    return f"{w:g}"


class Graph:
    """Immutable undirected weighted graph over integer node ids."""

    __slots__ = (
        "ids",
        "labels",
        "eu",
        "ev",
        "ew",
        "_pos",
        "_eu_d",
        "_ev_d",
        "_indptr",
        "_adj_nodes",
        "_adj_edges",
        "_csr",
    )

    def __init__(
        self,
        ids: np.ndarray,
        eu: np.ndarray,
        ev: np.ndarray,
        ew: np.ndarray,
        labels: dict[int, str] | None = None,
    ):
        """Build from already-canonical arrays (use ``from_edges`` otherwise).

        ``ids`` must be sorted unique non-negative ints; ``eu < ev``
        elementwise, rows sorted by (eu, ev) and unique.
        """
        self.ids = np.asarray(ids, dtype=np.int64)
        self.eu = np.asarray(eu, dtype=np.int64)
        self.ev = np.asarray(ev, dtype=np.int64)
        self.ew = np.asarray(ew, dtype=np.float64)
        self.labels = labels or {}
        self._pos = {int(i): p for p, i in enumerate(self.ids)}
        self._eu_d = np.searchsorted(self.ids, self.eu)
        self._ev_d = np.searchsorted(self.ids, self.ev)
        self._build_adjacency()
        self._csr = None

    # -- construction -----------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int, float] | tuple[int, int] | Edge],
        nodes: Iterable[int] | None = None,
        labels: Mapping[int, str] | None = None,
    ) -> "Graph":
        """Canonicalize an edge collection; duplicates merge by weight sum."""
        us, vs, ws = [], [], []
        for e in edges:
            if isinstance(e, Edge):
                u, v, w = e.source, e.target, e.weight
            elif len(e) == 2:
                u, v = e
                w = 1.0
            else:
                u, v, w = e
            if u == v:
                raise ValueError(f"loop edge at node {u}")
            us.append(u)
            vs.append(v)
            ws.append(w)
        eu = np.asarray(us, dtype=np.int64)
        ev = np.asarray(vs, dtype=np.int64)
        ew = np.asarray(ws, dtype=np.float64)
        eu, ev, ew = _canonicalize(eu, ev, ew)
        if nodes is None:
            ids = np.unique(np.concatenate([eu, ev])) if len(eu) else np.empty(0, np.int64)
        else:
            ids = np.unique(np.asarray(list(nodes), dtype=np.int64))
            missing = np.setdiff1d(np.unique(np.concatenate([eu, ev])), ids) if len(eu) else []
            if len(missing):
                raise UnknownNodeError(int(missing[0]))
        lab = {int(k): v for k, v in (labels or {}).items() if int(k) in set(ids.tolist())}
        return cls(ids, eu, ev, ew, lab)

    def _build_adjacency(self):
        n, m = len(self.ids), len(self.eu)
        ends = np.concatenate([self._eu_d, self._ev_d])
        deg = np.bincount(ends, minlength=n).astype(np.int64) if m else np.zeros(n, np.int64)
        self._indptr = np.concatenate([[0], np.cumsum(deg)])
        order = np.argsort(ends, kind="stable")
        both_other = np.concatenate([self._ev_d, self._eu_d])
        both_edge = np.concatenate([np.arange(m), np.arange(m)])
        self._adj_nodes = both_other[order]
        self._adj_edges = both_edge[order]

    # -- basic accessors ---------------------------------------------------

    @property
    def nodes(self) -> np.ndarray:
        return self.ids

    def node_count(self) -> int:
        return len(self.ids)

    def edge_count(self) -> int:
        return len(self.eu)

    def total_weight(self) -> float:
        return float(self.ew.sum())

    def has_node(self, node: int) -> bool:
        return node in self._pos

    def require_node(self, node: int) -> int:
        try:
            return self._pos[node]
        except KeyError:
            raise UnknownNodeError(node) from None

    def label(self, node: int) -> str | None:
        return self.labels.get(node)

    def degree(self, node: int) -> int:
        p = self.require_node(node)
        return int(self._indptr[p + 1] - self._indptr[p])

    def neighbors(self, node: int) -> list[int]:
        p = self.require_node(node)
        dense = self._adj_nodes[self._indptr[p]: self._indptr[p + 1]]
        return sorted(int(self.ids[d]) for d in dense)

    def incident(self, node: int) -> list[Edge]:
        p = self.require_node(node)
        eidx = self._adj_edges[self._indptr[p]: self._indptr[p + 1]]
        return [self.edge_at(int(i)) for i in sorted(eidx.tolist())]

    def edge_at(self, i: int) -> Edge:
        return Edge(int(self.eu[i]), int(self.ev[i]), float(self.ew[i]))

    def edges(self) -> Iterator[Edge]:
        for i in range(len(self.eu)):
            yield self.edge_at(i)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.eu, self.ev, self.ew

    def edge_set(self) -> set[tuple[int, int]]:
        return set(zip(self.eu.tolist(), self.ev.tolist()))

    # -- derived structures -------------------------------------------------

    def sparse(self) -> csr_matrix:
        """Symmetric weighted adjacency over dense indices (cached)."""
        if self._csr is None:
            n = len(self.ids)
            u, v, w = self._eu_d, self._ev_d, self.ew
            self._csr = csr_matrix(
                (np.concatenate([w, w]), (np.concatenate([u, v]), np.concatenate([v, u]))),
                shape=(n, n),
            )
        return self._csr

    def subgraph(self, members: Iterable[int]) -> "Graph":
        """Induced subgraph; labels restricted to the members."""
        sub_ids = np.unique(np.asarray(list(members), dtype=np.int64))
        for i in sub_ids:
            if int(i) not in self._pos:
                raise UnknownNodeError(int(i))
        if len(self.eu):
            dense = np.searchsorted(self.ids, sub_ids)
            mask = np.zeros(len(self.ids), dtype=bool)
            mask[dense] = True
            keep = mask[self._eu_d] & mask[self._ev_d]
            eu, ev, ew = self.eu[keep], self.ev[keep], self.ew[keep]
        else:
            eu = ev = np.empty(0, np.int64)
            ew = np.empty(0, np.float64)
        lab = {int(i): self.labels[int(i)] for i in sub_ids if int(i) in self.labels}
        return Graph(sub_ids, eu, ev, ew, lab)

    def __repr__(self) -> str:
        return f"Graph(|V|={self.node_count()}, |E|={self.edge_count()})"


def _canonicalize(eu, ev, ew):
    """Orient min-first, sort by (u, v), merge duplicates by weight sum."""
    if len(eu) == 0:
        return eu, ev, ew
    lo = np.minimum(eu, ev)
    hi = np.maximum(eu, ev)
    order = np.lexsort((hi, lo))
    lo, hi, ew = lo[order], hi[order], ew[order]
    same = np.zeros(len(lo), dtype=bool)
    same[1:] = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
    group = np.cumsum(~same) - 1
    n_groups = int(group[-1]) + 1
    w = np.bincount(group, weights=ew, minlength=n_groups)
    first = np.flatnonzero(~same)
    return lo[first], hi[first], w


# -- text I/O ---------------------------------------------------------------


def load_graph(edge_path: str | Path, labels_path: str | Path | None = None) -> Graph:
    """Parse an edge-list file: ``src<TAB>dst[<TAB>weight]`` per line.

    ``#``-prefixed and blank lines are ignored; duplicate pairs merge by
    summing weights; loops are rejected naming the node.
    """
    edge_path = Path(edge_path)
    us, vs, ws = [], [], []
    with open(edge_path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(str(edge_path), line_no, f"expected 2 or 3 fields, got {len(parts)}")
            try:
                u = int(parts[0])
                v = int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise GraphFormatError(str(edge_path), line_no, f"unparseable edge {line!r}") from None
            if u < 0 or v < 0:
                raise GraphFormatError(str(edge_path), line_no, "node ids must be non-negative")
            if w <= 0:
                raise GraphFormatError(str(edge_path), line_no, f"weight must be positive, got {parts[2]}")
            if u == v:
                raise LoopEdgeError(str(edge_path), line_no, u)
            us.append(u)
            vs.append(v)
            ws.append(w)
    eu, ev, ew = _canonicalize(
        np.asarray(us, dtype=np.int64),
        np.asarray(vs, dtype=np.int64),
        np.asarray(ws, dtype=np.float64),
    )
    ids = np.unique(np.concatenate([eu, ev])) if len(eu) else np.empty(0, np.int64)
    labels = _load_labels(labels_path, set(ids.tolist())) if labels_path else {}
    return Graph(ids, eu, ev, ew, labels)


def _load_labels(labels_path: str | Path, known: set[int]) -> dict[int, str]:
    labels: dict[int, str] = {}
    labels_path = Path(labels_path)
    with open(labels_path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t", 1)
            if len(parts) != 2:
                raise GraphFormatError(str(labels_path), line_no, "expected id<TAB>label")
            try:
                node = int(parts[0])
            except ValueError:
                raise GraphFormatError(str(labels_path), line_no, f"bad node id {parts[0]!r}") from None
            if node in known:
                labels[node] = parts[1]
    return labels


def write_graph(g: Graph, path: str | Path) -> None:
    """Canonical edge-list output: sorted edges, weight only when != 1."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v, w in zip(g.eu.tolist(), g.ev.tolist(), g.ew.tolist()):
            if w == 1.0:
                fh.write(f"{u}\t{v}\n")
            else:
                fh.write(f"{u}\t{v}\t{format_weight(w)}\n")


# -- metrics ----------------------------------------------------------------


@dataclass
class MetricsReport:
    """Per-subgraph summary: degrees, components, and a diameter sample."""

    degree_histogram: dict[int, int] = field(default_factory=dict)
    component_count: int = 0
    component_sizes: list[int] = field(default_factory=list)
    diameter_sample: int | None = None

    def to_json(self) -> dict:
        return {
            "degree_histogram": {str(k): v for k, v in sorted(self.degree_histogram.items())},
            "component_count": self.component_count,
            "component_sizes": self.component_sizes,
            "diameter_sample": self.diameter_sample,
        }


def degree_distribution(g: Graph) -> dict[int, int]:
    """Histogram degree -> node count; isolated nodes count at degree 0."""
    if g.node_count() == 0:
        return {}
    deg = np.diff(g._indptr)
    hist = np.bincount(deg)
    return {int(d): int(c) for d, c in enumerate(hist) if c > 0}


def connected_components(g: Graph) -> tuple[dict[int, int], list[int]]:
    """Component id per node plus component sizes (largest first)."""
    n = g.node_count()
    if n == 0:
        return {}, []
    _, comp = _cc(g.sparse(), directed=False)
    sizes = np.bincount(comp)
    comp_of = {int(g.ids[i]): int(comp[i]) for i in range(n)}
    return comp_of, sorted((int(s) for s in sizes), reverse=True)


def _bfs_dists(g: Graph, src_dense: int) -> np.ndarray:
    n = g.node_count()
    dist = np.full(n, -1, dtype=np.int64)
    dist[src_dense] = 0
    frontier = [src_dense]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for p in frontier:
            for q in g._adj_nodes[g._indptr[p]: g._indptr[p + 1]]:
                if dist[q] < 0:
                    dist[q] = d
                    nxt.append(int(q))
        frontier = nxt
    return dist


def hops(g: Graph, a: int, b: int) -> int | None:
    """Unweighted shortest-path length; None when disconnected."""
    pa = g.require_node(a)
    pb = g.require_node(b)
    if pa == pb:
        return 0
    dist = _bfs_dists(g, pa)
    return int(dist[pb]) if dist[pb] >= 0 else None


def metrics_report(g: Graph, with_diameter: bool = True) -> MetricsReport:
    comp_of, sizes = connected_components(g)
    report = MetricsReport(
        degree_histogram=degree_distribution(g),
        component_count=len(sizes),
        component_sizes=sizes,
    )
    if with_diameter and g.node_count() > 0:
        # pseudo-diameter: double BFS from a max-degree node
        deg = np.diff(g._indptr)
        start = int(np.argmax(deg))
        d1 = _bfs_dists(g, start)
        far = int(np.argmax(d1))
        d2 = _bfs_dists(g, far)
        report.diameter_sample = int(d2.max())
    return report
