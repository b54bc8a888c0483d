"""Graph model, text I/O and metrics, with independent recount oracles."""

import numpy as np
import pytest

from hiergraph.errors import GraphFormatError, LoopEdgeError, UnknownNodeError
from hiergraph.generate import gnm_random_graph
from hiergraph.graph import (
    Edge,
    Graph,
    connected_components,
    degree_distribution,
    hops,
    load_graph,
    metrics_report,
    write_graph,
)


def write(tmp_path, text, name="edges.tsv"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadGraph:
    def test_minimal_parse(self, tmp_path):
        g = load_graph(write(tmp_path, "1\t2\n2\t3\n"))
        assert sorted(g.ids.tolist()) == [1, 2, 3]
        assert g.edge_count() == 2

    def test_loop_rejected_with_node_id(self, tmp_path):
        with pytest.raises(LoopEdgeError) as err:
            load_graph(write(tmp_path, "5\t5\n"))
        assert err.value.node == 5
        assert "5" in str(err.value)

    def test_comments_and_blanks_ignored(self, tmp_path):
        g = load_graph(write(tmp_path, "# a comment\n\n1\t2\n"))
        assert g.edge_count() == 1

    def test_duplicates_merge_by_weight_sum(self, tmp_path):
        g = load_graph(write(tmp_path, "1\t2\t2\n2\t1\t3\n"))
        assert g.edge_count() == 1
        assert g.ew[0] == 5.0

    def test_malformed_line_reports_line_number(self, tmp_path):
        with pytest.raises(GraphFormatError) as err:
            load_graph(write(tmp_path, "1\t2\nbroken\n"))
        assert err.value.line_no == 2

    def test_single_field_line_rejected(self, tmp_path):
        with pytest.raises(GraphFormatError):
            load_graph(write(tmp_path, "1\n"))

    def test_nonpositive_weight_rejected(self, tmp_path):
        with pytest.raises(GraphFormatError):
            load_graph(write(tmp_path, "1\t2\t0\n"))

    def test_fixture_file_cross_edges_present(self, tmp_path, fixture_graph):
        g, _ = fixture_graph
        path = tmp_path / "fixture.tsv"
        write_graph(g, path)
        reloaded = load_graph(path)
        assert reloaded.node_count() == 8
        keys = reloaded.edge_set()
        assert (2, 3) in keys and (2, 4) in keys

    def test_labels_loaded(self, tmp_path):
        edges = write(tmp_path, "1\t2\n")
        labels = write(tmp_path, "1\tAlice Smith\n2\tBob\n9\tGhost\n", "labels.tsv")
        g = load_graph(edges, labels)
        assert g.label(1) == "Alice Smith"
        assert g.label(9) is None


class TestCanonical:
    def test_round_trip_byte_identical(self, tmp_path):
        g = gnm_random_graph(25, 60, seed=3)
        p1 = tmp_path / "a.tsv"
        p2 = tmp_path / "b.tsv"
        write_graph(g, p1)
        write_graph(load_graph(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_edges_sorted_min_endpoint_first(self):
        g = Graph.from_edges([(9, 1), (3, 2)])
        assert g.eu.tolist() == [1, 2]
        assert g.ev.tolist() == [9, 3]

    def test_weight_one_omitted_in_output(self, tmp_path):
        g = Graph.from_edges([(1, 2, 1.0), (2, 3, 2.5)])
        p = tmp_path / "w.tsv"
        write_graph(g, p)
        assert p.read_text() == "1\t2\n2\t3\t2.5\n"

    def test_edge_orientation_normalized(self):
        e = Edge(7, 3)
        assert (e.source, e.target) == (3, 7)

    def test_loop_edge_object_rejected(self):
        with pytest.raises(ValueError):
            Edge(4, 4)


class TestMetrics:
    def test_empty_graph_histogram(self):
        g = Graph.from_edges([], nodes=[])
        assert degree_distribution(g) == {}

    def test_triangle_all_degree_two(self):
        g = Graph.from_edges([(0, 1), (1, 2), (0, 2)])
        assert degree_distribution(g) == {2: 3}

    def test_isolated_nodes_count_at_zero(self):
        g = Graph.from_edges([(0, 1)], nodes=[0, 1, 2, 3])
        assert degree_distribution(g) == {0: 2, 1: 2}

    def test_degree_histogram_matches_edge_scan(self):
        g = gnm_random_graph(20, 40, seed=7)
        counts = {int(n): 0 for n in g.ids}
        for u, v in zip(g.eu.tolist(), g.ev.tolist()):
            counts[u] += 1
            counts[v] += 1
        expected = {}
        for deg in counts.values():
            expected[deg] = expected.get(deg, 0) + 1
        assert degree_distribution(g) == expected

    def test_sum_degrees_is_twice_edges(self):
        for seed in range(4):
            g = gnm_random_graph(30, 70, seed=seed)
            hist = degree_distribution(g)
            assert sum(d * c for d, c in hist.items()) == 2 * g.edge_count()

    def test_two_triangles_two_components(self):
        g = Graph.from_edges([(0, 1), (1, 2), (0, 2), (5, 6), (6, 7), (5, 7)])
        comp, sizes = connected_components(g)
        assert sizes == [3, 3]
        assert comp[0] == comp[1] == comp[2]
        assert comp[5] == comp[6] == comp[7]
        assert comp[0] != comp[5]

    def test_path_single_component(self):
        g = Graph.from_edges([(i, i + 1) for i in range(4)])
        _, sizes = connected_components(g)
        assert sizes == [5]

    def test_components_match_relaxation_oracle(self):
        g = gnm_random_graph(40, 50, seed=11)
        # fixed-point label relaxation over the edge list
        label = {int(n): int(n) for n in g.ids}
        changed = True
        while changed:
            changed = False
            for u, v in zip(g.eu.tolist(), g.ev.tolist()):
                low = min(label[u], label[v])
                if label[u] != low or label[v] != low:
                    label[u] = label[v] = low
                    changed = True
        comp, _ = connected_components(g)
        for a in g.ids.tolist():
            for b in g.ids.tolist():
                assert (comp[a] == comp[b]) == (label[a] == label[b])

    def test_component_sizes_sum_to_v(self):
        g = gnm_random_graph(35, 30, seed=2)
        _, sizes = connected_components(g)
        assert sum(sizes) == g.node_count()


class TestHops:
    def test_self_distance_zero(self):
        g = Graph.from_edges([(1, 2)])
        assert hops(g, 1, 1) == 0

    def test_path_distance(self):
        g = Graph.from_edges([(1, 2), (2, 3), (3, 4)])
        assert hops(g, 1, 4) == 3

    def test_disconnected_returns_none(self):
        g = Graph.from_edges([(1, 2), (3, 4)])
        assert hops(g, 1, 4) is None

    def test_unknown_node_raises(self):
        g = Graph.from_edges([(1, 2)])
        with pytest.raises(UnknownNodeError):
            hops(g, 1, 99)

    def test_matches_matrix_power_oracle(self):
        g = gnm_random_graph(18, 30, seed=5)
        n = g.node_count()
        adj = np.zeros((n, n), dtype=bool)
        pos = {int(node): i for i, node in enumerate(g.ids)}
        for u, v in zip(g.eu.tolist(), g.ev.tolist()):
            adj[pos[u], pos[v]] = adj[pos[v], pos[u]] = True
        reach = np.eye(n, dtype=bool)
        dist = np.full((n, n), -1)
        np.fill_diagonal(dist, 0)
        frontier = reach
        for step in range(1, n):
            frontier = (frontier @ adj) & ~reach
            if not frontier.any():
                break
            dist[frontier & (dist < 0)] = step
            reach |= frontier
        ids = g.ids.tolist()
        for a in ids[::3]:
            for b in ids[::4]:
                expected = int(dist[pos[a], pos[b]])
                assert hops(g, a, b) == (expected if expected >= 0 else None)

    def test_hops_finite_iff_same_component(self):
        g = gnm_random_graph(30, 25, seed=9)
        comp, _ = connected_components(g)
        ids = g.ids.tolist()
        for a in ids[::5]:
            for b in ids[::7]:
                assert (hops(g, a, b) is not None) == (comp[a] == comp[b])


class TestSubgraphAndReport:
    def test_each_edge_in_exactly_two_incident_lists(self):
        g = gnm_random_graph(25, 55, seed=14)
        appearances = {}
        for node in g.ids.tolist():
            for e in g.incident(node):
                appearances[e.key()] = appearances.get(e.key(), 0) + 1
        assert set(appearances.values()) == {2}
        assert len(appearances) == g.edge_count()

    def test_subgraph_induced(self):
        g = Graph.from_edges([(1, 2), (2, 3), (3, 4), (1, 4)])
        sub = g.subgraph([1, 2, 3])
        assert sub.edge_set() == {(1, 2), (2, 3)}

    def test_metrics_report_totals(self):
        g = gnm_random_graph(26, 40, seed=4)
        rep = metrics_report(g)
        assert sum(rep.degree_histogram.values()) == g.node_count()
        assert sum(rep.component_sizes) == g.node_count()
        assert rep.component_count == len(rep.component_sizes)
        assert rep.diameter_sample is None or rep.diameter_sample >= 0
