"""Deterministic coordinates for rendering.

Per-leaf positions come from a seeded spring embedder in the unit
square; the hierarchy itself is drawn as nested circles, children on a
ring inside their parent with radii proportional to the square root of
their community size. Both layouts are pure functions of their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TreeError
from .graph import Graph
from .tree import GraphTree, LeafSuperNode

__all__ = ["LeafLayout", "HierarchyLayout", "layout_leaf", "layout_hierarchy"]


@dataclass
class LeafLayout:
    leaf: int
    positions: dict[int, tuple[float, float]]
    iterations: int
    seed: int

    def to_json(self) -> dict:
        return {
            "leaf": self.leaf,
            "seed": self.seed,
            "iterations": self.iterations,
            "positions": {str(n): [x, y] for n, (x, y) in sorted(self.positions.items())},
        }


@dataclass
class HierarchyLayout:
    circles: dict[int, tuple[float, float, float]]
    level: dict[int, int]

    def to_json(self) -> dict:
        return {
            "circles": {str(i): [cx, cy, r] for i, (cx, cy, r) in sorted(self.circles.items())},
            "levels": {str(i): d for i, d in sorted(self.level.items())},
        }


def layout_leaf(subgraph: Graph, seed: int, iterations: int = 300, leaf_id: int = -1) -> LeafLayout:
    """Spring-embedder positions in [0,1]^2, deterministic for a seed.

    Nodes with neighbors relax under the usual attraction/repulsion
    pair (equilibrium distance k = 0.6*sqrt(1/n)); isolated nodes are
    placed on a ring just inside the square's boundary instead of
    drifting around the force field.
    """
    ids = subgraph.ids
    n = len(ids)
    if n == 0:
        return LeafLayout(leaf_id, {}, iterations, seed)
    if n == 1:
        return LeafLayout(leaf_id, {int(ids[0]): (0.5, 0.5)}, iterations, seed)

    deg = np.asarray([subgraph.degree(int(i)) for i in ids])
    isolated = np.flatnonzero(deg == 0)
    active = np.flatnonzero(deg > 0)

    positions = np.zeros((n, 2), dtype=np.float64)
    rng = np.random.default_rng(seed)

    if len(active):
        m = len(active)
        if m == 1:
            positions[active[0]] = (0.5, 0.5)
        else:
            pos = 0.5 + (rng.random((m, 2)) - 0.5) * 0.5
            k = 0.6 * math.sqrt(1.0 / m)
            pos_index = {int(ids[a]): j for j, a in enumerate(active)}
            pe_u = np.asarray([pos_index[int(u)] for u in subgraph.eu], dtype=np.int64)
            pe_v = np.asarray([pos_index[int(v)] for v in subgraph.ev], dtype=np.int64)
            temp = 0.12
            cooling = temp / (iterations + 1)
            for _ in range(iterations):
                delta = pos[:, None, :] - pos[None, :, :]
                dist = np.sqrt((delta**2).sum(axis=2))
                np.fill_diagonal(dist, 1.0)
                repulse = (k * k) / dist
                disp = (delta / dist[:, :, None] * repulse[:, :, None]).sum(axis=1)
                dvec = pos[pe_u] - pos[pe_v]
                dlen = np.sqrt((dvec**2).sum(axis=1))
                dlen[dlen < 1e-12] = 1e-12
                attract = (dlen**2) / k
                pull = dvec / dlen[:, None] * attract[:, None]
                np.add.at(disp, pe_u, -pull)
                np.add.at(disp, pe_v, pull)
                dnorm = np.sqrt((disp**2).sum(axis=1))
                dnorm[dnorm < 1e-12] = 1e-12
                step = np.minimum(dnorm, temp) / dnorm
                pos += disp * step[:, None]
                np.clip(pos, 0.02, 0.98, out=pos)
                temp = max(temp - cooling, 1e-4)
            # recenter the connected mass without rescaling distances
            shift = 0.5 - pos.mean(axis=0)
            pos += shift
            np.clip(pos, 0.02, 0.98, out=pos)
            positions[active] = pos

    for j, a in enumerate(isolated.tolist()):
        angle = 2 * math.pi * j / max(1, len(isolated))
        positions[a] = (0.5 + 0.46 * math.cos(angle), 0.5 + 0.46 * math.sin(angle))

    mapping = {int(ids[i]): (float(positions[i, 0]), float(positions[i, 1])) for i in range(n)}
    return LeafLayout(leaf_id, mapping, iterations, seed)


def layout_hierarchy(tree: GraphTree) -> HierarchyLayout:
    """Nested circles: children ride a ring inside their parent.

    Radii scale with sqrt(community size); the scale on each ring is
    chosen so sibling circles stay strictly disjoint and strictly inside
    the parent. Purely geometric, no randomness.
    """
    if not tree.filled:
        raise TreeError("layout requires a filled tree")
    circles: dict[int, tuple[float, float, float]] = {}
    level: dict[int, int] = {}

    sizes = {nid: tree.closure_size(nid) for nid in tree.nodes}

    def place(nid: int, cx: float, cy: float, radius: float):
        circles[nid] = (cx, cy, radius)
        level[nid] = tree.depth[nid]
        node = tree.nodes[nid]
        if isinstance(node, LeafSuperNode) or not node.children:
            return
        kids = node.children
        weights = [math.sqrt(max(1, sizes[c])) for c in kids]
        m = len(kids)
        if m == 1:
            place(kids[0], cx, cy, radius * 0.72)
            return
        ring = radius * 0.55
        top_two = sorted(weights, reverse=True)[:2]
        fit_gap = 2 * ring * math.sin(math.pi / m) * 0.92 / (top_two[0] + top_two[1])
        fit_radius = (radius - ring) * 0.92 / max(weights)
        scale = min(fit_gap, fit_radius)
        for j, c in enumerate(kids):
            angle = 2 * math.pi * j / m - math.pi / 2
            place(
                c,
                cx + ring * math.cos(angle),
                cy + ring * math.sin(angle),
                max(1e-4, scale * weights[j]),
            )

    place(tree.root, 0.5, 0.5, 0.48)
    return HierarchyLayout(circles=circles, level=level)
