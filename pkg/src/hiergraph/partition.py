"""Balanced k-way min-edge-cut partitioning and recursive hierarchies.

The single-level partitioner is a multilevel scheme: coarsen by
heavy-edge matching, bisect the coarsest graph by greedy graph growing,
then refine each uncoarsening step with boundary Fiduccia-Mattheyses
passes. General k comes from recursive bisection with proportional size
targets, so k does not have to be a power of two.

Balance uses a single global cap: every final part holds at most
``ceil((1+epsilon)*n/k)`` nodes. During recursion a side destined to
host ``j`` parts may hold at most ``j`` times that cap, which keeps
every intermediate bisection feasible and guarantees the final bound by
construction.

Deterministic for a fixed seed.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .errors import BalanceError, PartitionError
from .graph import Graph

__all__ = [
    "PartitionAssignment",
    "HierarchySpec",
    "PlanNode",
    "HierarchyPlan",
    "kway_partition",
    "build_hierarchy",
    "write_plan",
    "plan_from_nested",
]

_COARSEST_TARGET = 160
_MIN_SHRINK = 0.92


@dataclass
class PartitionAssignment:
    """One k-way split: part index per node plus the achieved cut."""

    part_of: dict[int, int]
    k: int
    cut_weight: float

    def sizes(self) -> list[int]:
        counts = [0] * self.k
        for p in self.part_of.values():
            counts[p] += 1
        return counts

    def achieved_epsilon(self) -> float:
        n = len(self.part_of)
        return max(self.sizes()) * self.k / n - 1.0 if n else 0.0

    def parts(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.k)]
        for node in sorted(self.part_of):
            groups[self.part_of[node]].append(node)
        return groups


@dataclass(frozen=True)
class HierarchySpec:
    """Fanout k, depth h (the root level counts), balance, leaf floor."""

    k: int
    h: int
    epsilon: float = 0.10
    min_leaf_size: int | None = None
    use_edge_weights: bool = True

    def __post_init__(self):
        if self.k < 2:
            raise PartitionError(f"k must be >= 2, got {self.k}")
        if self.h < 1:
            raise PartitionError(f"h must be >= 1, got {self.h}")
        if not (0 <= self.epsilon < 1):
            raise PartitionError(f"epsilon must be in [0, 1), got {self.epsilon}")

    @property
    def leaf_floor(self) -> int:
        """Parts smaller than this are never partitioned further."""
        return self.min_leaf_size if self.min_leaf_size is not None else 2 * self.k


@dataclass
class PlanNode:
    """A node of the hierarchy plan; leaves carry final communities."""

    path: tuple[int, ...]
    members: np.ndarray          # sorted original node ids
    children: list["PlanNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def path_str(self) -> str:
        return ".".join(str(p) for p in self.path)


@dataclass
class HierarchyPlan:
    """Tree of node-set splits produced by recursive partitioning."""

    spec: HierarchySpec
    root: PlanNode

    def leaves(self) -> list[PlanNode]:
        return [node for node in self.walk() if node.is_leaf]

    def walk(self) -> list[PlanNode]:
        out: list[PlanNode] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            out.append(node)
            stack.extend(reversed(node.children))
        return out


# ---------------------------------------------------------------------------
# single-level k-way
# ---------------------------------------------------------------------------


def kway_partition(
    g: Graph,
    k: int,
    epsilon: float = 0.10,
    seed: int = 0,
    use_edge_weights: bool = True,
) -> PartitionAssignment:
    """Split g into k balanced parts minimizing the (weighted) edge cut."""
    n = g.node_count()
    if k < 2:
        raise PartitionError(f"k must be >= 2, got {k}")
    if n < k:
        raise PartitionError(f"cannot split {n} nodes into {k} parts")
    if not (0 <= epsilon < 1):
        raise PartitionError(f"epsilon must be in [0, 1), got {epsilon}")

    cap = math.ceil((1 + epsilon) * n / k)
    A = g.sparse().astype(np.float64)
    if not use_edge_weights:
        A = A.copy()
        A.data[:] = 1.0

    labels = np.zeros(n, dtype=np.int64)
    ss = np.random.SeedSequence(seed & 0xFFFFFFFF)
    _kway_recursive(A.tocsr(), np.arange(n), k, cap, labels, 0, ss)

    sizes = np.bincount(labels, minlength=k)
    if sizes.max() > cap:
        raise BalanceError(epsilon, float(sizes.max()) * k / n - 1.0)

    eu_d = np.searchsorted(g.ids, g.eu)
    ev_d = np.searchsorted(g.ids, g.ev)
    cut = float(g.ew[labels[eu_d] != labels[ev_d]].sum())
    part_of = {int(g.ids[i]): int(labels[i]) for i in range(n)}
    return PartitionAssignment(part_of=part_of, k=k, cut_weight=cut)


def _kway_recursive(A, idx, k, cap, labels, base, seed_seq):
    """Assign labels[idx] to parts base..base+k-1 by recursive bisection."""
    n = len(idx)
    if k == 1:
        labels[idx] = base
        return
    k0 = k // 2
    k1 = k - k0
    max0 = min(k0 * cap, n - k1)
    min0 = max(k0, n - k1 * cap)
    target0 = min(max(int(round(n * k0 / k)), min0), max0)

    rng = np.random.default_rng(np.random.PCG64(seed_seq))
    side = _bisect(A, np.ones(n, dtype=np.int64), target0, min0, max0, rng)

    pos0 = np.flatnonzero(~side)
    pos1 = np.flatnonzero(side)
    child0, child1 = seed_seq.spawn(2)
    if k0 == 1:
        labels[idx[pos0]] = base
    else:
        _kway_recursive(A[pos0][:, pos0].tocsr(), idx[pos0], k0, cap, labels, base, child0)
    if k1 == 1:
        labels[idx[pos1]] = base + k0
    else:
        _kway_recursive(A[pos1][:, pos1].tocsr(), idx[pos1], k1, cap, labels, base + k0, child1)


# ---------------------------------------------------------------------------
# multilevel bisection
# ---------------------------------------------------------------------------


def _bisect(A: csr_matrix, vw: np.ndarray, target0: int, min0: int, max0: int, rng) -> np.ndarray:
    """Two-way split; returns a boolean side array (True = side 1).

    Side 0 must end with a vertex-weight total inside [min0, max0];
    target0 is the preferred total.
    """
    levels: list[tuple[csr_matrix, np.ndarray, np.ndarray]] = []
    cap_w = max(2, 2 * math.ceil(int(vw.sum()) / _COARSEST_TARGET))
    cur, cur_vw = A, vw
    while cur.shape[0] > _COARSEST_TARGET:
        cmap, nc = _heavy_edge_matching(cur, cur_vw, cap_w, rng)
        if nc > _MIN_SHRINK * cur.shape[0]:
            break
        levels.append((cur, cur_vw, cmap))
        cur, cur_vw = _contract(cur, cmap, nc, cur_vw)

    side = _initial_bisection(cur, cur_vw, target0, min0, max0, rng)
    side = _fm_refine(cur, cur_vw, side, min0, max0, rng, max_passes=10)

    for fine_A, fine_vw, cmap in reversed(levels):
        side = side[cmap]
        n_f = fine_A.shape[0]
        passes = 8 if n_f <= 10_000 else (3 if n_f <= 120_000 else 2)
        side = _fm_refine(fine_A, fine_vw, side, min0, max0, rng, max_passes=passes)
    return side


def _heavy_edge_matching(A: csr_matrix, vw: np.ndarray, cap_w: int, rng):
    """Greedy matching scanning edges by decreasing weight (random ties)."""
    n = A.shape[0]
    coo = A.tocoo()
    upper = coo.row < coo.col
    ei = coo.row[upper]
    ej = coo.col[upper]
    ew = coo.data[upper]
    if len(ei):
        order = np.lexsort((rng.permutation(len(ei)), -ew))
        ei = ei[order].tolist()
        ej = ej[order].tolist()
    else:
        ei, ej = [], []
    vw_l = vw.tolist()
    mate = [-1] * n
    for i, j in zip(ei, ej):
        if mate[i] < 0 and mate[j] < 0 and vw_l[i] + vw_l[j] <= cap_w:
            mate[i] = j
            mate[j] = i
    cmap = np.empty(n, dtype=np.int64)
    nc = 0
    seen = [False] * n
    for i in range(n):
        if seen[i]:
            continue
        cmap[i] = nc
        seen[i] = True
        m = mate[i]
        if m >= 0:
            cmap[m] = nc
            seen[m] = True
        nc += 1
    return cmap, nc


def _contract(A: csr_matrix, cmap: np.ndarray, nc: int, vw: np.ndarray):
    n = A.shape[0]
    P = csr_matrix((np.ones(n), (np.arange(n), cmap)), shape=(n, nc))
    Ac = (P.T @ A @ P).tocoo()
    off = Ac.row != Ac.col
    Ac = csr_matrix((Ac.data[off], (Ac.row[off], Ac.col[off])), shape=(nc, nc))
    vwc = np.bincount(cmap, weights=vw).astype(np.int64)
    return Ac, vwc


def _cut_weight(A: csr_matrix, side: np.ndarray) -> float:
    x = side.astype(np.float64)
    return float(x @ (A @ (1.0 - x)))


def _initial_bisection(A: csr_matrix, vw: np.ndarray, target0, min0, max0, rng) -> np.ndarray:
    """Greedy graph growing with restarts; components packed first."""
    n = A.shape[0]

    ncomp, comp = _cc(A, directed=False)
    if ncomp > 1:
        comp_w = np.bincount(comp, weights=vw)
        order = np.argsort(-comp_w, kind="stable")
        w0 = 0
        chosen = np.zeros(ncomp, dtype=bool)
        for c in order.tolist():
            if w0 >= target0:
                break
            if w0 + comp_w[c] <= max0:
                chosen[c] = True
                w0 += int(comp_w[c])
        if min0 <= w0 <= max0:
            return ~chosen[comp]  # zero cut and feasible: cannot be beaten

    indptr, indices, data = A.indptr, A.indices, A.data
    trials = 6 if n <= 64 else 4
    best_side = None
    best_key = None
    for _ in range(trials):
        side0 = np.zeros(n, dtype=bool)
        dead = np.zeros(n, dtype=bool)  # too heavy to ever fit side 0
        conn = np.zeros(n, dtype=np.float64)
        w0 = 0
        heap: list[tuple[float, int]] = []
        unassigned_order = rng.permutation(n).tolist()
        cursor = 0

        def add(v: int):
            nonlocal w0
            side0[v] = True
            w0 += int(vw[v])
            for t in range(indptr[v], indptr[v + 1]):
                u = int(indices[t])
                if not side0[u] and not dead[u]:
                    conn[u] += data[t]
                    heapq.heappush(heap, (-conn[u], u))

        while w0 < target0:
            v = -1
            while heap:
                negc, cand = heapq.heappop(heap)
                if side0[cand] or dead[cand] or -negc != conn[cand]:
                    continue
                v = cand
                break
            if v < 0:
                while cursor < n and (side0[unassigned_order[cursor]] or dead[unassigned_order[cursor]]):
                    cursor += 1
                if cursor == n:
                    break
                v = unassigned_order[cursor]
            if w0 + int(vw[v]) > max0:
                dead[v] = True
                continue
            add(v)
        side = ~side0
        w_side0 = int(vw[~side].sum())
        if w_side0 < min0 or w_side0 > max0:
            side = _force_balance(A, vw, side, min0, max0)
            w_side0 = int(vw[~side].sum())
        key = (_cut_weight(A, side), abs(w_side0 - target0))
        if best_key is None or key < best_key:
            best_key = key
            best_side = side
    return best_side


def _force_balance(A: csr_matrix, vw: np.ndarray, side: np.ndarray, min0, max0) -> np.ndarray:
    """Move best-gain nodes across until side 0's weight is in range."""
    side = side.copy()
    x = side.astype(np.float64)
    rowsum = np.asarray(A.sum(axis=1)).ravel()
    s1 = A @ x
    ext = np.where(side, rowsum - s1, s1)
    gain = 2 * ext - rowsum
    indptr, indices, data = A.indptr, A.indices, A.data
    for _ in range(A.shape[0]):
        w0 = int(vw[~side].sum())
        if min0 <= w0 <= max0:
            break
        from_side = w0 > max0  # True: shrink side0 (move False->True)
        cand = np.flatnonzero(side != from_side)
        if not len(cand):
            break
        v = int(cand[np.argmax(gain[cand])])
        side[v] = from_side
        for t in range(indptr[v], indptr[v + 1]):
            u = int(indices[t])
            if side[u] == side[v]:
                gain[u] -= 2 * data[t]
            else:
                gain[u] += 2 * data[t]
        gain[v] = -gain[v]
    return side


def _fm_refine(A: csr_matrix, vw: np.ndarray, side: np.ndarray, min0, max0, rng, max_passes=6) -> np.ndarray:
    """Boundary FM: pass-with-rollback, repeated while it helps."""
    n = A.shape[0]
    side = side.copy()
    indptr, indices, data = A.indptr, A.indices, A.data
    rowsum = np.asarray(A.sum(axis=1)).ravel()

    for _ in range(max_passes):
        x = side.astype(np.float64)
        s1 = A @ x
        ext = np.where(side, rowsum - s1, s1)
        gain = 2.0 * ext - rowsum
        boundary = np.flatnonzero(ext > 0)
        if not len(boundary):
            break
        tiebreak = rng.permutation(n)
        heap = [(-gain[v], int(tiebreak[v]), int(v)) for v in boundary.tolist()]
        heapq.heapify(heap)
        locked = np.zeros(n, dtype=bool)
        w0 = int(vw[~side].sum())
        cut = _cut_weight(A, side)
        best_cut = cut
        best_len = 0
        moves: list[int] = []
        stall = 0
        move_cap = 2 * len(boundary) + 32

        while heap and len(moves) < move_cap and stall < 200:
            ng, tb, v = heapq.heappop(heap)
            if locked[v]:
                continue
            if -ng != gain[v]:
                heapq.heappush(heap, (-gain[v], tb, v))
                continue
            new_w0 = w0 - int(vw[v]) if not side[v] else w0 + int(vw[v])
            if new_w0 < min0 or new_w0 > max0:
                continue
            # apply the move
            locked[v] = True
            cut -= gain[v]
            w0 = new_w0
            side[v] = ~side[v]
            moves.append(v)
            for t in range(indptr[v], indptr[v + 1]):
                u = int(indices[t])
                if locked[u]:
                    continue
                if side[u] == side[v]:
                    gain[u] -= 2 * data[t]
                else:
                    gain[u] += 2 * data[t]
                heapq.heappush(heap, (-gain[u], int(tiebreak[u]), int(u)))
            if cut < best_cut - 1e-12:
                best_cut = cut
                best_len = len(moves)
                stall = 0
            else:
                stall += 1

        for v in moves[best_len:]:
            side[v] = ~side[v]
        if best_len == 0:
            break
    return side


# ---------------------------------------------------------------------------
# hierarchy construction
# ---------------------------------------------------------------------------


def build_hierarchy(g: Graph, spec: HierarchySpec, seed: int = 0) -> HierarchyPlan:
    """Recursive k-way partitioning down to h levels (root is level 0).

    A part smaller than the leaf floor (or than k) becomes a leaf without
    reaching depth h-1. Whenever that leaves a node with both leaf and
    non-leaf children, each leaf child is wrapped in a single-child
    internal node so that every node's children are uniform in kind.
    """
    n = g.node_count()
    if n == 0:
        raise PartitionError("cannot build a hierarchy over an empty graph")
    root = _plan_recursive(g, np.sort(g.ids.copy()), (0,), 0, spec, seed)
    return HierarchyPlan(spec=spec, root=root)


def _plan_recursive(g: Graph, members: np.ndarray, path, depth, spec: HierarchySpec, seed) -> PlanNode:
    node = PlanNode(path=tuple(path), members=members)
    n = len(members)
    if depth >= spec.h - 1 or n < spec.leaf_floor or n < spec.k:
        return node

    sub = g if n == g.node_count() else g.subgraph(members)
    child_seed = int(np.random.SeedSequence(entropy=seed & 0xFFFFFFFF, spawn_key=tuple(path)).generate_state(1)[0])
    try:
        assignment = kway_partition(
            sub, spec.k, spec.epsilon, seed=child_seed, use_edge_weights=spec.use_edge_weights
        )
    except PartitionError as err:
        raise PartitionError(f"at plan node {node.path_str()}: {err}") from err

    children = []
    for j, part in enumerate(assignment.parts()):
        child = _plan_recursive(
            g, np.asarray(part, dtype=np.int64), (*path, j), depth + 1, spec, seed
        )
        children.append(child)
    kinds = {c.is_leaf for c in children}
    if kinds == {True, False}:
        for j, c in enumerate(children):
            if c.is_leaf:
                inner = PlanNode(path=(*c.path, 0), members=c.members)
                children[j] = PlanNode(path=c.path, members=c.members, children=[inner])
    node.children = children
    return node


def plan_from_nested(nested, spec: HierarchySpec | None = None) -> HierarchyPlan:
    """Hand-made hierarchy from nested lists of node ids.

    ``nested`` is either a flat collection of ints (a leaf) or a list of
    sub-structures. Useful for semantically chosen groupings that no
    partitioner would produce.
    """

    def build(node, path):
        if all(isinstance(x, (int, np.integer)) for x in node):
            return PlanNode(path=tuple(path), members=np.sort(np.asarray(list(node), dtype=np.int64)))
        children = [build(sub, (*path, j)) for j, sub in enumerate(node)]
        members = np.sort(np.concatenate([c.members for c in children]))
        return PlanNode(path=tuple(path), members=members, children=children)

    root = build(nested, (0,))

    def depth_of(n: PlanNode) -> int:
        return 1 if n.is_leaf else 1 + max(depth_of(c) for c in n.children)

    def max_fanout(n: PlanNode) -> int:
        return max([len(n.children)] + [max_fanout(c) for c in n.children]) if n.children else 0

    if spec is None:
        spec = HierarchySpec(k=max(2, max_fanout(root)), h=depth_of(root))
    return HierarchyPlan(spec=spec, root=root)


def write_plan(plan: HierarchyPlan, path) -> None:
    """Debug export: one line per leaf, ``leaf <path> : id,id,...``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for leaf in plan.leaves():
            ids = ",".join(str(int(i)) for i in leaf.members)
            fh.write(f"leaf {leaf.path_str()} : {ids}\n")
