"""A hand-made hierarchy: 81 employees, 3 companies x 3 departments.

The grouping is semantic (org chart), not computed, showing that the
tree accepts any hierarchy of partitions. Edge weights count messages;
bundle weights count distinct communicating pairs.

Run:  python demos/02_email_network.py
"""

import tempfile
from pathlib import Path

from hiergraph.audit import audit_store
from hiergraph.connectivity import connectivity
from hiergraph.generate import email_network
from hiergraph.partition import plan_from_nested
from hiergraph.tree import assemble_tree, fill_graph_tree, save_tree

workdir = Path(tempfile.mkdtemp(prefix="hiergraph-email-"))

g, org_chart = email_network()
print(f"message network: {g.node_count()} people, {g.edge_count()} communicating pairs")

plan = plan_from_nested(org_chart)
tree = fill_graph_tree(assemble_tree(g, plan, workdir / "store"))
save_tree(tree)

companies = tree.nodes[tree.root].children
print(f"\ncompanies (tree nodes): {companies}")
for comp in companies:
    depts = tree.nodes[comp].children
    print(f"  company {comp}: departments {depts}")

root = tree.nodes[tree.root]
print("\ncompany-to-company contact (pairs of people who exchange messages):")
for (a, b), se in sorted(root.superedges.items()):
    messages = se.w.sum()
    print(f"  company {a} <-> company {b}: {se.weight} pairs, {messages:g} messages")

d0 = tree.nodes[companies[0]].children[0]
d1 = tree.nodes[companies[1]].children[0]
cross = connectivity(tree, d0, d1)
print(f"\ndepartments {d0} and {d1} in different companies share {cross.weight} pairs")

report = audit_store(workdir / "store")
internal = sum(tree.internal_edge_count(l) for l in tree.leaf_ids())
cross_total = sum(
    se.weight for nid in tree.supernode_ids() for se in tree.nodes[nid].superedges.values()
)
print(f"\naccounting: {internal} in-department pairs + {cross_total} cross pairs "
      f"= {internal + cross_total} of {g.edge_count()}")
print("audit:", "all green" if report.ok else "FAILED")
