"""Walk through the core workflow on a hand-traceable 8-node graph.

Builds the hierarchy store from an edge-list file, then asks the three
canonical questions: what is inside a community, which exact edges join
two communities, and who are one node's contacts outside its community.

Run:  python demos/01_build_and_query.py
"""

import tempfile
from pathlib import Path

from hiergraph import load_graph, write_graph
from hiergraph.connectivity import connectivity, external_neighbors
from hiergraph.generate import eight_node_example
from hiergraph.partition import HierarchySpec, build_hierarchy
from hiergraph.tree import assemble_tree, fill_graph_tree, save_tree

workdir = Path(tempfile.mkdtemp(prefix="hiergraph-demo-"))

g, _ = eight_node_example()
write_graph(g, workdir / "edges.tsv")
print(f"wrote {g.edge_count()} edges for {g.node_count()} nodes to {workdir/'edges.tsv'}")

g = load_graph(workdir / "edges.tsv")

# two levels of 2-way splits under the root; strict balance keeps the
# 2-node communities intact
spec = HierarchySpec(k=2, h=3, epsilon=0.0)
plan = build_hierarchy(g, spec, seed=1)
tree = fill_graph_tree(assemble_tree(g, plan, workdir / "store"))
save_tree(tree)

print("\ntree shape:")
for nid in sorted(tree.nodes):
    node = tree.nodes[nid]
    indent = "  " * tree.depth[nid]
    if node.kind == "L":
        print(f"{indent}leaf {nid}: members {sorted(node.member_nodes)}")
    else:
        print(f"{indent}group {nid}: children {node.children}")

group = tree.nodes[tree.leaf_of(5)].parent
print(f"\nclosure of group {group}: {sorted(tree.closure(group))}")

la, lb = tree.leaf_of(1), tree.leaf_of(3)
result = connectivity(tree, la, lb)
print(f"edges between leaf {la} and leaf {lb} (found at node {result.meeting_point}):")
for e in result.edges:
    print(f"  {e.source} -- {e.target}")

hood = external_neighbors(tree, 2)
print("\nnode 2's contacts outside its own community:")
for entry in hood.entries:
    print(f"  neighbor {entry.neighbor} (leaf {entry.neighbor_leaf}), resolved at node {entry.resolved_at}")
