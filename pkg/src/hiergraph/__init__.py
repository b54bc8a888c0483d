"""hiergraph: store, query and explore large graphs through a hierarchy
of balanced partitions with exact cross-community connectivity."""

from .graph import (
    Edge,
    Graph,
    MetricsReport,
    connected_components,
    degree_distribution,
    hops,
    load_graph,
    metrics_report,
    write_graph,
)
from .partition import (
    HierarchyPlan,
    HierarchySpec,
    PartitionAssignment,
    PlanNode,
    build_hierarchy,
    kway_partition,
    plan_from_nested,
    write_plan,
)
from .tree import (
    GraphTree,
    LeafSuperNode,
    SuperEdge,
    SuperNode,
    assemble_tree,
    fill_graph_tree,
    load_tree,
    save_tree,
)
from .connectivity import (
    ConnectivityResult,
    ExternalNeighborhood,
    candidate_pairs,
    connectivity,
    external_neighbors,
    first_common_parent,
)
from .layout import HierarchyLayout, LeafLayout, layout_hierarchy, layout_leaf
from .audit import AuditReport, audit_store

__version__ = "0.1.0"
