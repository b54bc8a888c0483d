"""Synthetic graph generators used by the demos and the test suites.

Everything is seeded and deterministic. The community-structured
generators exist because real social-network snapshots are not
distributable; they reproduce the scale and the clustered texture such
datasets show, not any particular dataset.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .graph import Graph

__all__ = [
    "gnm_random_graph",
    "planted_partition_graph",
    "hierarchical_benchmark_graph",
    "email_network",
    "eight_node_example",
]


def gnm_random_graph(n: int, m: int, seed: int = 0, base_id: int = 0) -> Graph:
    """Uniform random graph with exactly n nodes and m distinct edges."""
    max_edges = n * (n - 1) // 2
    if m > max_edges:
        raise ValueError(f"m={m} exceeds the {max_edges} possible edges on {n} nodes")
    rng = np.random.default_rng(seed)
    chosen: set[tuple[int, int]] = set()
    while len(chosen) < m:
        need = m - len(chosen)
        u = rng.integers(0, n, size=2 * need + 8)
        v = rng.integers(0, n, size=2 * need + 8)
        for a, b in zip(u.tolist(), v.tolist()):
            if a == b:
                continue
            pair = (a, b) if a < b else (b, a)
            if pair not in chosen:
                chosen.add(pair)
                if len(chosen) == m:
                    break
    edges = [(base_id + a, base_id + b) for a, b in sorted(chosen)]
    return Graph.from_edges(edges, nodes=range(base_id, base_id + n))


def planted_partition_graph(
    n: int,
    communities: int,
    p_in: float,
    p_out: float,
    seed: int = 0,
) -> tuple[Graph, dict[int, int]]:
    """Planted-community graph; returns the graph and the ground truth."""
    rng = np.random.default_rng(seed)
    membership = np.repeat(np.arange(communities), -(-n // communities))[:n]
    iu, ju = np.triu_indices(n, k=1)
    same = membership[iu] == membership[ju]
    p = np.where(same, p_in, p_out)
    keep = rng.random(len(iu)) < p
    edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
    g = Graph.from_edges(edges, nodes=range(n))
    return g, {int(i): int(membership[i]) for i in range(n)}


def hierarchical_benchmark_graph(
    n_nodes: int,
    n_edges: int,
    fanout: int = 5,
    levels: int = 5,
    seed: int = 0,
    out_path: str | Path | None = None,
    cross_mix: tuple[float, ...] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Community-within-community benchmark graph with exact counts.

    Nodes are split into ``fanout**(levels-1)`` blocks of near-equal size
    arranged as a ``levels``-deep hierarchy (contiguous id ranges). Each
    block gets a path backbone so that no node is isolated; the remaining
    edges are sampled mostly inside blocks, with a decaying share crossing
    at each higher hierarchy level. Returns the edge endpoint arrays; when
    ``out_path`` is given the edge list is also written in the standard
    text format.
    """
    n_blocks = fanout ** (levels - 1)
    if n_nodes < 2 * n_blocks:
        raise ValueError("need at least two nodes per block")
    rng = np.random.default_rng(seed)

    base = n_nodes // n_blocks
    rem = n_nodes % n_blocks
    sizes = np.full(n_blocks, base, dtype=np.int64)
    sizes[:rem] += 1
    starts = np.concatenate([[0], np.cumsum(sizes)])  # block b covers [starts[b], starts[b+1])

    # backbone path inside every block
    bb_u = []
    bb_v = []
    for b in range(n_blocks):
        lo, hi = int(starts[b]), int(starts[b + 1])
        bb_u.append(np.arange(lo, hi - 1))
        bb_v.append(np.arange(lo + 1, hi))
    eu = np.concatenate(bb_u)
    ev = np.concatenate(bb_v)
    backbone = len(eu)
    if backbone > n_edges:
        raise ValueError("n_edges too small for the backbone")

    # share of extra edges resolved at each depth: 0 = inside a block,
    # d >= 1 crosses siblings at depth levels-1-d
    if cross_mix is None:
        cross_mix = (0.86, 0.07, 0.04, 0.02, 0.01)[: levels]
        cross_mix = tuple(x / sum(cross_mix) for x in cross_mix)

    def sample_level(kind: int, count: int) -> tuple[np.ndarray, np.ndarray]:
        """kind 0: intra-block; kind d: across two sibling subtrees whose
        first common parent sits d levels above the blocks."""
        if kind == 0:
            blocks = rng.integers(0, n_blocks, size=count)
            lo = starts[blocks]
            span = sizes[blocks]
            u = lo + rng.integers(0, 1 << 62, size=count) % span
            v = lo + rng.integers(0, 1 << 62, size=count) % span
            return u, v
        group = fanout**kind                      # blocks per child subtree
        n_parents = n_blocks // group             # distinct parents at that depth
        parents = rng.integers(0, n_parents, size=count)
        ca = rng.integers(0, fanout, size=count)
        shift = 1 + rng.integers(0, fanout - 1, size=count)
        cb = (ca + shift) % fanout
        sub = group // fanout                     # blocks per grandchild subtree
        ba = parents * group + ca * sub + rng.integers(0, sub, size=count)
        bb = parents * group + cb * sub + rng.integers(0, sub, size=count)
        u = starts[ba] + rng.integers(0, 1 << 62, size=count) % sizes[ba]
        v = starts[bb] + rng.integers(0, 1 << 62, size=count) % sizes[bb]
        return u, v

    extra = n_edges - backbone
    want = [int(round(extra * q)) for q in cross_mix]
    want[0] += extra - sum(want)

    pairs = {}
    for kind, cnt in enumerate(want):
        if cnt > 0:
            u, v = sample_level(kind, int(cnt * 1.15) + 16)
            pairs[kind] = (u, v)
    all_u = np.concatenate([eu] + [pairs[k][0] for k in sorted(pairs)])
    all_v = np.concatenate([ev] + [pairs[k][1] for k in sorted(pairs)])

    def dedup(u, v):
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        ok = lo != hi
        key = lo[ok] * np.int64(n_nodes) + hi[ok]
        _, first = np.unique(key, return_index=True)
        first.sort()
        return lo[ok][first], hi[ok][first]

    u, v = dedup(all_u, all_v)
    while len(u) < n_edges:
        add_u, add_v = sample_level(0, 2 * (n_edges - len(u)) + 64)
        u, v = dedup(np.concatenate([u, add_u]), np.concatenate([v, add_v]))
    if len(u) > n_edges:
        # never drop backbone edges: they are unique and listed first
        key = u * np.int64(n_nodes) + v
        bb_key = np.minimum(eu, ev) * np.int64(n_nodes) + np.maximum(eu, ev)
        is_bb = np.isin(key, bb_key)
        extra_idx = np.flatnonzero(~is_bb)
        keep_extra = rng.choice(extra_idx, size=n_edges - int(is_bb.sum()), replace=False)
        keep = np.concatenate([np.flatnonzero(is_bb), keep_extra])
        keep.sort()
        u, v = u[keep], v[keep]

    order = np.lexsort((v, u))
    u, v = u[order], v[order]
    if out_path is not None:
        _write_edge_lines(u, v, out_path)
    return u, v


def _write_edge_lines(u: np.ndarray, v: np.ndarray, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        chunk = 200_000
        for i in range(0, len(u), chunk):
            us = u[i: i + chunk].tolist()
            vs = v[i: i + chunk].tolist()
            fh.write("".join(f"{a}\t{b}\n" for a, b in zip(us, vs)))


def email_network(seed: int = 7) -> tuple[Graph, list]:
    """81-person message network over 3 companies x 3 departments x 9 people.

    Exactly 341 weighted edges (weights are message counts). Returns the
    graph and the nested company/department grouping for a hand-made
    hierarchy.
    """
    rng = np.random.default_rng(seed)
    n = 81
    dept_of = np.arange(n) // 9          # 0..8
    comp_of = dept_of // 3               # 0..2

    chosen: dict[tuple[int, int], int] = {}

    def add(u: int, v: int):
        if u == v:
            return
        pair = (u, v) if u < v else (v, u)
        if pair not in chosen:
            chosen[pair] = int(rng.integers(1, 10))

    # in-department backbone ring, then quota-driven sampling
    for d in range(9):
        lo = d * 9
        for i in range(9):
            add(lo + i, lo + (i + 1) % 9)

    stages = [
        (260, lambda: _pair_within(rng, dept_of)),             # same department
        (312, lambda: _pair_same_comp(rng, dept_of, comp_of)),  # same company, new dept
        (341, lambda: _pair_cross_comp(rng, comp_of)),         # different companies
    ]
    for cumulative, sampler in stages:
        guard = 0
        while len(chosen) < cumulative and guard < 200_000:
            add(*sampler())
            guard += 1
    while len(chosen) < 341:
        add(*_pair_within(rng, dept_of))

    labels = {i: f"person-{i:02d}.dept-{dept_of[i]}.co-{comp_of[i]}" for i in range(n)}
    edges = [(u, v, float(w)) for (u, v), w in sorted(chosen.items())]
    g = Graph.from_edges(edges, nodes=range(n), labels=labels)
    nested = [
        [[int(i) for i in range(c * 27 + d * 9, c * 27 + d * 9 + 9)] for d in range(3)]
        for c in range(3)
    ]
    return g, nested


def _pair_within(rng, dept_of):
    d = int(rng.integers(0, 9))
    a, b = rng.integers(0, 9, size=2)
    return d * 9 + int(a), d * 9 + int(b)


def _pair_same_comp(rng, dept_of, comp_of):
    c = int(rng.integers(0, 3))
    d1, d2 = rng.integers(0, 3, size=2)
    a, b = rng.integers(0, 9, size=2)
    return c * 27 + int(d1) * 9 + int(a), c * 27 + int(d2) * 9 + int(b)


def _pair_cross_comp(rng, comp_of):
    c1 = int(rng.integers(0, 3))
    c2 = (c1 + 1 + int(rng.integers(0, 2))) % 3
    a = int(rng.integers(0, 27))
    b = int(rng.integers(0, 27))
    return c1 * 27 + a, c2 * 27 + b


def eight_node_example() -> tuple[Graph, list]:
    """Tiny worked example: four two-node communities under two groups.

    Node 2 is the only member of its community with outside contacts
    (to 3 and to 4), which makes the example handy for tracing
    cross-community queries by hand.
    """
    edges = [
        (1, 2),  # community A
        (3, 4),  # community B
        (5, 6),  # community C
        (7, 8),  # community D
        (2, 3),  # A-B
        (2, 4),  # A-B
        (6, 7),  # C-D
        (4, 5),  # across the two groups
    ]
    labels = {
        1: "ada", 2: "bea", 3: "cyd", 4: "dan",
        5: "eli", 6: "fay", 7: "gus", 8: "hal",
    }
    g = Graph.from_edges(edges, nodes=range(1, 9), labels=labels)
    nested = [[[1, 2], [3, 4]], [[5, 6], [7, 8]]]
    return g, nested
