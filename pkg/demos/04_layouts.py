"""Render the nested-circle hierarchy and one leaf's spring layout.

Saves two PNGs next to this script's temp store. Needs matplotlib.

Run:  python demos/04_layouts.py
"""

import tempfile
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from hiergraph.generate import gnm_random_graph
from hiergraph.layout import layout_hierarchy, layout_leaf
from hiergraph.partition import HierarchySpec, build_hierarchy
from hiergraph.tree import assemble_tree, fill_graph_tree

workdir = Path(tempfile.mkdtemp(prefix="hiergraph-layouts-"))

g = gnm_random_graph(180, 540, seed=4)
plan = build_hierarchy(g, HierarchySpec(k=3, h=3), seed=4)
tree = fill_graph_tree(assemble_tree(g, plan, workdir / "store"))

hier = layout_hierarchy(tree)
fig, ax = plt.subplots(figsize=(7, 7))
palette = ["#1f2a44", "#3c6e9f", "#74a8cf", "#b5d3e7"]
for nid, (cx, cy, r) in sorted(hier.circles.items(), key=lambda kv: hier.level[kv[0]]):
    depth = hier.level[nid]
    ax.add_patch(plt.Circle((cx, cy), r, fill=depth > 0, alpha=0.35 if depth else 1.0,
                            facecolor=palette[min(depth, 3)], edgecolor="#1f2a44"))
for nid in tree.supernode_ids():
    for (a, b), se in tree.nodes[nid].superedges.items():
        (ax_, ay_, _), (bx_, by_, _) = hier.circles[a], hier.circles[b]
        ax.plot([ax_, bx_], [ay_, by_], color="#c0392b", lw=0.5 + 0.1 * se.weight, alpha=0.6)
ax.set_xlim(0, 1), ax.set_ylim(0, 1), ax.set_aspect("equal"), ax.axis("off")
hier_png = workdir / "hierarchy.png"
fig.savefig(hier_png, dpi=140, bbox_inches="tight")
print(f"nested hierarchy with {len(hier.circles)} circles -> {hier_png}")

leaf = tree.leaf_ids()[0]
sub = tree.expand_leaf(leaf)
lay = layout_leaf(sub, seed=4)
fig, ax = plt.subplots(figsize=(6, 6))
for u, v in zip(sub.eu.tolist(), sub.ev.tolist()):
    (x1, y1), (x2, y2) = lay.positions[u], lay.positions[v]
    ax.plot([x1, x2], [y1, y2], color="#888", lw=0.7, zorder=1)
xs = [p[0] for p in lay.positions.values()]
ys = [p[1] for p in lay.positions.values()]
ax.scatter(xs, ys, s=40, color="#3c6e9f", zorder=2)
ax.set_xlim(0, 1), ax.set_ylim(0, 1), ax.set_aspect("equal"), ax.axis("off")
leaf_png = workdir / "leaf_layout.png"
fig.savefig(leaf_png, dpi=140, bbox_inches="tight")
print(f"spring layout of leaf {leaf} ({sub.node_count()} nodes) -> {leaf_png}")
