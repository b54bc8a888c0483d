"""Operational surface: CLI commands, exit codes, HTTP API, store audit."""

import hashlib
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from hiergraph.audit import audit_store
from hiergraph.cli import EXIT_BAD_INPUT, EXIT_IO, EXIT_OK, main
from hiergraph.generate import email_network, eight_node_example
from hiergraph.graph import write_graph
from hiergraph.partition import plan_from_nested
from hiergraph.service import create_app
from hiergraph.tree import assemble_tree, fill_graph_tree, save_tree


@pytest.fixture(scope="module")
def fixture_files(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    g, _ = eight_node_example()
    edges = tmp / "edges.tsv"
    labels = tmp / "labels.tsv"
    write_graph(g, edges)
    with open(labels, "w", encoding="utf-8") as fh:
        for nid, lab in sorted(g.labels.items()):
            fh.write(f"{nid}\t{lab}\n")
    return tmp, edges, labels


@pytest.fixture(scope="module")
def built_store(fixture_files):
    tmp, edges, labels = fixture_files
    out = tmp / "store"
    rc = main([
        "build", "--input", str(edges), "--labels", str(labels),
        "--k", "2", "--levels", "3", "--epsilon", "0", "--seed", "1", "--out", str(out),
    ])
    assert rc == EXIT_OK
    return out


class TestCli:
    def test_build_fixture_shape(self, built_store, capsys):
        rc = main(["audit", "--store", str(built_store)])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        assert "leaves-disjoint ok" in out
        assert "counts leaves=4 nodes=8 edges=8" in out

    def test_query_conn_weight_then_edges(self, built_store, capsys):
        rc = main(["query", "conn", "--store", str(built_store), "3", "4"])
        out = capsys.readouterr().out.splitlines()
        assert rc == EXIT_OK
        assert out[0] == "weight 2"
        assert set(out[1:]) == {"2\t3\t1", "2\t4\t1"}

    def test_query_closure_root_prints_all(self, built_store, capsys):
        rc = main(["query", "closure", "--store", str(built_store), "root"])
        out = capsys.readouterr().out.split()
        assert rc == EXIT_OK
        assert out == [str(i) for i in range(1, 9)]

    def test_query_search_absent_is_success(self, built_store, capsys):
        rc = main(["query", "search", "--store", str(built_store), "zzz-absent"])
        assert rc == EXIT_OK
        assert capsys.readouterr().out == ""

    def test_query_unknown_id_exit_code(self, built_store, capsys):
        rc = main(["query", "conn", "--store", str(built_store), "77", "78"])
        assert rc == EXIT_BAD_INPUT

    def test_missing_store_is_io_error(self, tmp_path, capsys):
        rc = main(["query", "closure", "--store", str(tmp_path / "nope"), "root"])
        assert rc == EXIT_IO

    def test_loop_edge_file_bad_input(self, tmp_path, capsys):
        bad = tmp_path / "bad.tsv"
        bad.write_text("5\t5\n")
        rc = main(["build", "--input", str(bad), "--k", "2", "--levels", "2", "--out", str(tmp_path / "s")])
        assert rc == EXIT_BAD_INPUT

    def test_determinism_byte_identical_stores(self, fixture_files):
        tmp, edges, labels = fixture_files
        args = ["--input", str(edges), "--labels", str(labels), "--k", "2",
                "--levels", "3", "--epsilon", "0.1", "--seed", "42"]
        out1, out2 = tmp / "det1", tmp / "det2"
        assert main(["build", *args, "--out", str(out1)]) == EXIT_OK
        assert main(["build", *args, "--out", str(out2)]) == EXIT_OK
        assert _dir_digest(out1) == _dir_digest(out2)


def _dir_digest(root: Path) -> dict[str, str]:
    out = {}
    for f in sorted(root.rglob("*")):
        if f.is_file():
            out[str(f.relative_to(root))] = hashlib.sha256(f.read_bytes()).hexdigest()
    return out


class TestEmailNetwork:
    def test_manual_two_level_hierarchy_accounts_all_edges(self, tmp_path):
        g, nested = email_network()
        assert g.node_count() == 81
        assert g.edge_count() == 341
        plan = plan_from_nested(nested)
        tree = fill_graph_tree(assemble_tree(g, plan, tmp_path / "email"))
        save_tree(tree)
        internal = sum(tree.internal_edge_count(l) for l in tree.leaf_ids())
        cross = sum(
            se.weight
            for nid in tree.supernode_ids()
            for se in tree.nodes[nid].superedges.values()
        )
        assert internal + cross == 341
        report = audit_store(tree.store_dir)
        assert report.ok
        assert report.leaf_count == 9


@pytest.fixture(scope="module")
def api_client(fixture_files):
    tmp, edges, labels = fixture_files
    g, nested = eight_node_example()
    store = tmp / "api_store"
    tree = fill_graph_tree(assemble_tree(g, plan_from_nested(nested), store))
    save_tree(tree)
    app = create_app(store, cache_leaves=2)
    return TestClient(app), tree


class TestApi:
    def test_tree_reflects_manifest(self, api_client):
        client, tree = api_client
        data = client.get("/api/tree").json()
        assert data["leaf_count"] == len(tree.leaf_ids())
        assert data["node_count"] == 8 and data["edge_count"] == 8
        by_id = {n["id"]: n for n in data["nodes"]}
        assert by_id[tree.root]["kind"] == "S"
        ribbons = [se for n in data["nodes"] if n["kind"] == "S" for se in n.get("superedges", [])]
        assert len(ribbons) == 3  # one bundle per sibling pair with contact

    def test_connectivity_agrees_with_cli(self, api_client, built_store, capsys):
        client, tree = api_client
        la, lb = tree.leaf_of(1), tree.leaf_of(3)
        api = client.get("/api/connectivity", params={"a": la, "b": lb}).json()
        rc = main(["query", "conn", "--store", str(built_store), str(la), str(lb)])
        cli_out = capsys.readouterr().out.splitlines()
        assert rc == EXIT_OK
        assert cli_out[0] == f"weight {api['weight']}"
        api_edges = {(e[0], e[1]) for e in api["edges"]}
        cli_edges = {tuple(int(x) for x in line.split("\t")[:2]) for line in cli_out[1:]}
        assert api_edges == cli_edges == {(2, 3), (2, 4)}

    def test_expand_then_layout_covers_members(self, api_client):
        client, tree = api_client
        leaf = tree.leaf_of(5)
        members = client.post(f"/api/leaf/{leaf}/expand").json()["members"]
        layout = client.get(f"/api/leaf/{leaf}/layout", params={"seed": 3}).json()
        assert set(layout["positions"]) == {str(m) for m in members}

    def test_layout_requires_expand(self, api_client):
        client, tree = api_client
        leaf = tree.leaf_of(7)
        client.post(f"/api/leaf/{leaf}/collapse")
        r = client.get(f"/api/leaf/{leaf}/layout")
        assert r.status_code == 409
        assert r.json()["error"]["code"] == "leaf-not-loaded"

    def test_external_neighbors_endpoint(self, api_client):
        client, _ = api_client
        data = client.get("/api/node/2/external").json()
        assert sorted(e["neighbor"] for e in data["entries"]) == [3, 4]

    def test_search_case_insensitive_with_path(self, api_client):
        client, tree = api_client
        data = client.get("/api/search", params={"label": "BE"}).json()
        assert len(data["hits"]) == 1
        hit = data["hits"][0]
        assert hit["node"] == 2
        assert hit["path"][0] == tree.root
        assert hit["path"][-1] == tree.leaf_of(2)

    def test_search_no_hits(self, api_client):
        client, _ = api_client
        assert client.get("/api/search", params={"label": "zzz"}).json()["hits"] == []

    def test_metrics_endpoint(self, api_client):
        client, tree = api_client
        leaf = tree.leaf_of(1)
        data = client.get(f"/api/leaf/{leaf}/metrics").json()
        assert data["component_count"] == 1
        assert sum(data["degree_histogram"].values()) == 2

    def test_closure_endpoint(self, api_client):
        client, tree = api_client
        group = tree.nodes[tree.leaf_of(5)].parent
        data = client.get(f"/api/supernode/{group}/closure").json()
        assert data["closure"] == [5, 6, 7, 8]

    def test_error_shapes(self, api_client):
        client, tree = api_client
        r404 = client.get("/api/supernode/404")
        assert r404.status_code == 404 and r404.json()["error"]["code"] == "unknown-supernode"
        leaf = tree.leaf_of(1)
        r409 = client.get("/api/connectivity", params={"a": tree.root, "b": leaf})
        assert r409.status_code == 409 and r409.json()["error"]["code"] == "ancestor-pair"
        r422 = client.get("/api/connectivity", params={"a": "x", "b": leaf})
        assert r422.status_code == 422
        rsame = client.get("/api/connectivity", params={"a": leaf, "b": leaf})
        assert rsame.status_code == 422 and rsame.json()["error"]["code"] == "same-node-pair"
        rnotleaf = client.post(f"/api/leaf/{tree.root}/expand")
        assert rnotleaf.status_code == 422 and rnotleaf.json()["error"]["code"] == "not-a-leaf"

    def test_hierarchy_layout_endpoint(self, api_client):
        client, tree = api_client
        data = client.get("/api/layout/hierarchy").json()
        assert set(data["circles"]) == {str(n) for n in tree.nodes}

    def test_cache_counters_and_cap(self, api_client):
        client, tree = api_client
        for leaf in tree.leaf_ids():
            client.post(f"/api/leaf/{leaf}/expand")
        stats = client.get("/api/cache").json()
        assert stats["cap"] == 2
        assert stats["resident"] <= 2
        assert stats["peak_resident"] <= 2

    def test_restart_preserves_answers(self, fixture_files, api_client):
        tmp, _, _ = fixture_files
        client, tree = api_client
        before = client.get("/api/connectivity", params={"a": tree.leaf_of(1), "b": tree.leaf_of(3)}).json()
        fresh = TestClient(create_app(tmp / "api_store", cache_leaves=2))
        after = fresh.get("/api/connectivity", params={"a": tree.leaf_of(1), "b": tree.leaf_of(3)}).json()
        assert before == after


class TestAuditDetectsCorruption:
    def test_duplicated_edge_breaks_eq6(self, tmp_path):
        g, nested = eight_node_example()
        tree = fill_graph_tree(assemble_tree(g, plan_from_nested(nested), tmp_path / "s"))
        save_tree(tree)
        # smuggle a cross edge into a leaf file as well
        leaf = tree.leaf_of(1)
        path = tree.store_dir / "leaves" / f"leaf_{leaf}.tsv"
        path.write_text(path.read_text() + "E 2 3 1\n")
        report = audit_store(tree.store_dir, verify_checksums=False)
        assert not report.eq6_ok
        assert not report.ok

    def test_wrong_placement_detected(self, tmp_path):
        g, nested = eight_node_example()
        tree = fill_graph_tree(assemble_tree(g, plan_from_nested(nested), tmp_path / "s"))
        save_tree(tree)
        # rewrite the root bundle claiming a pair of the wrong children
        sn = tree.store_dir / "superedges" / f"sn_{tree.root}.tsv"
        lines = sn.read_text().splitlines()
        sn.write_text("\n".join("9 9 " + " ".join(l.split()[2:]) for l in lines) + "\n")
        report = audit_store(tree.store_dir, verify_checksums=False)
        assert not report.placement_ok
