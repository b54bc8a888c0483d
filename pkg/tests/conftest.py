"""Shared fixtures: the 8-node worked example and random tree builders."""

from __future__ import annotations

import pytest

from hiergraph.generate import eight_node_example, gnm_random_graph
from hiergraph.partition import HierarchySpec, build_hierarchy, plan_from_nested
from hiergraph.tree import assemble_tree, fill_graph_tree, load_tree, save_tree


@pytest.fixture(scope="session")
def fixture_graph():
    g, nested = eight_node_example()
    return g, nested


@pytest.fixture(scope="session")
def fixture_store(tmp_path_factory, fixture_graph):
    """The canonical 4-leaf store for the worked example, saved once."""
    g, nested = fixture_graph
    store = tmp_path_factory.mktemp("fixture") / "store"
    tree = fill_graph_tree(assemble_tree(g, plan_from_nested(nested), store))
    save_tree(tree)
    return g, store


@pytest.fixture
def fixture_tree(fixture_store):
    """A freshly loaded fixture tree (leaf cache empty per test)."""
    g, store = fixture_store
    return g, load_tree(store)


def make_random_tree(tmp_path, n, m, k, h, seed, min_leaf_size=None, epsilon=0.10):
    """Random graph -> built+filled tree in a tmp store."""
    g = gnm_random_graph(n, m, seed=seed)
    spec = HierarchySpec(k=k, h=h, epsilon=epsilon, min_leaf_size=min_leaf_size)
    plan = build_hierarchy(g, spec, seed=seed)
    tree = fill_graph_tree(assemble_tree(g, plan, tmp_path / f"store_{n}_{m}_{k}_{h}_{seed}"))
    return g, tree


def closure_by_membership(tree, nid):
    """Closure computed by walking leaf member sets (test-side oracle)."""
    out = set()
    stack = [nid]
    while stack:
        node = tree.nodes[stack.pop()]
        if node.kind == "L":
            out.update(node.member_nodes)
        else:
            stack.extend(node.children)
    return out


def all_superedge_keys(tree):
    """Every (u, v) bundled in any cross SuperEdge, with multiplicity."""
    keys = []
    for nid in tree.supernode_ids():
        for se in tree.nodes[nid].superedges.values():
            keys.extend(se.edge_keys())
    return keys


def all_leaf_internal_keys(tree):
    keys = []
    for nid in tree.leaf_ids():
        sub = tree.expand_leaf(nid)
        keys.extend(zip(sub.eu.tolist(), sub.ev.tolist()))
        tree.collapse_leaf(nid)
    return keys
