"""Cross-community query algebra over a filled tree.

Two query families:

* community vs. community: the exact set of original edges joining two
  tree nodes' closures. The edges can only live in the single SuperEdge
  stored at the pair's first common parent, between the two child
  branches, so the query filters that one bundle by closure membership
  instead of scanning the graph.
* one graph node: all of its edges that leave its own leaf, found by
  walking up the ancestor chain while the node stays in the open set,
  collecting incident edges from each ancestor's SuperEdges.

Open-node Cartesian products are exposed separately as the diagnostic
superset they are; they are never used to compute results.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AncestorPairError, DegeneratePairError
from .graph import Edge
from .tree import GraphTree, LeafSuperNode

__all__ = [
    "ConnectivityResult",
    "ExternalNeighborhood",
    "NeighborEntry",
    "first_common_parent",
    "connectivity",
    "candidate_pairs",
    "external_neighbors",
]


@dataclass
class ConnectivityResult:
    """Exact edge set joining two communities, with where it was found."""

    side_a: int
    side_b: int
    edges: list[Edge]
    meeting_point: int

    @property
    def weight(self) -> int:
        return len(self.edges)

    def edge_keys(self) -> set[tuple[int, int]]:
        return {(e.source, e.target) for e in self.edges}


@dataclass
class NeighborEntry:
    edge: Edge
    neighbor: int
    neighbor_leaf: int
    resolved_at: int


@dataclass
class ExternalNeighborhood:
    """Every edge of one graph node that crosses its leaf boundary."""

    node: int
    entries: list[NeighborEntry]

    def neighbor_ids(self) -> list[int]:
        return sorted(e.neighbor for e in self.entries)


def first_common_parent(tree: GraphTree, a: int, b: int) -> tuple[int, int, int]:
    """Deepest node holding a and b under two distinct children.

    Returns (parent, child whose subtree holds a, child holding b).
    Pairs on one root-to-leaf line have no such node and are rejected.
    """
    tree.require(a)
    tree.require(b)
    if a == b:
        raise DegeneratePairError(f"connectivity of {a} with itself is undefined")
    chain_a = [a] + tree.parents(a)
    chain_b = [b] + tree.parents(b)
    if b in chain_a or a in chain_b:
        raise AncestorPairError(f"{a} and {b} are on one ancestor line; closures are nested")
    set_b = set(chain_b)
    child_a = a
    for anc in chain_a[1:]:
        if anc in set_b:
            parent = anc
            child_b = chain_b[chain_b.index(parent) - 1]
            return parent, child_a, child_b
        child_a = anc
    raise AncestorPairError(f"{a} and {b} share no common parent")  # disjoint forests cannot happen


def connectivity(tree: GraphTree, a: int, b: int) -> ConnectivityResult:
    """Exactly the original edges with one endpoint in each closure."""
    parent, ca, cb = first_common_parent(tree, a, b)
    se = tree.nodes[parent].superedge(ca, cb)
    if len(se) == 0:
        return ConnectivityResult(a, b, [], parent)
    if ca == a and cb == b:
        # sibling fast path: the stored bundle is the answer verbatim
        return ConnectivityResult(a, b, se.edges, parent)
    under_a = tree.descends_from(se.u, a) | tree.descends_from(se.v, a)
    under_b = tree.descends_from(se.u, b) | tree.descends_from(se.v, b)
    keep = under_a & under_b
    edges = [
        Edge(int(u), int(v), float(w))
        for u, v, w in zip(se.u[keep], se.v[keep], se.w[keep])
    ]
    return ConnectivityResult(a, b, edges, parent)


def candidate_pairs(tree: GraphTree, a: int, b: int) -> set[tuple[int, int]]:
    """All conceivable endpoint pairs: open(a) x open(b), unordered.

    A superset of the actual connectivity; quadratic, diagnostics only.
    """
    first_common_parent(tree, a, b)  # same validity rules
    open_a = tree.nodes[a].open_nodes
    open_b = tree.nodes[b].open_nodes
    return {(x, y) if x < y else (y, x) for x in open_a for y in open_b}


def external_neighbors(tree: GraphTree, v: int) -> ExternalNeighborhood:
    """Trace every edge of v leaving its leaf by walking the open sets.

    At each ancestor, v's remaining external edges are in that
    ancestor's SuperEdges incident to the branch v came from; the walk
    stops as soon as v is no longer open, at which point nothing above
    can touch it.
    """
    leaf_id = tree.leaf_of(v)
    entries: list[NeighborEntry] = []
    child = leaf_id
    while v in tree.nodes[child].open_nodes:
        parent = tree.nodes[child].parent
        if parent is None:
            break
        pn = tree.nodes[parent]
        for (ca, cb) in sorted(pn.superedges):
            if child != ca and child != cb:
                continue
            se = pn.superedges[(ca, cb)]
            su, sv, sw = se.touching(v)
            for x, y, w in zip(su.tolist(), sv.tolist(), sw.tolist()):
                neighbor = y if x == v else x
                entries.append(
                    NeighborEntry(
                        edge=Edge(x, y, float(w)),
                        neighbor=neighbor,
                        neighbor_leaf=tree.leaf_of(neighbor),
                        resolved_at=parent,
                    )
                )
        child = parent
    entries.sort(key=lambda e: (e.neighbor, e.resolved_at))
    return ExternalNeighborhood(node=v, entries=entries)


def leaf_internal_degree(tree: GraphTree, v: int) -> int:
    """Degree of v inside its own leaf subgraph (loads the leaf)."""
    leaf = tree.nodes[tree.leaf_of(v)]
    assert isinstance(leaf, LeafSuperNode)
    sub = tree.expand_leaf(leaf.id)
    return sub.degree(v)
