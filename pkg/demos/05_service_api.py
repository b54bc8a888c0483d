"""Serve a store over HTTP and query it like the explorer UI would.

Starts the API in a background thread, walks the endpoints with httpx,
and prints what a client sees. Mirrors the calls in frontend/src/api.ts.

Run:  python demos/05_service_api.py
"""

import tempfile
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from hiergraph.generate import eight_node_example
from hiergraph.partition import plan_from_nested
from hiergraph.service import create_app
from hiergraph.tree import assemble_tree, fill_graph_tree, save_tree

workdir = Path(tempfile.mkdtemp(prefix="hiergraph-api-"))
g, nested = eight_node_example()
tree = fill_graph_tree(assemble_tree(g, plan_from_nested(nested), workdir / "store"))
save_tree(tree)

app = create_app(workdir / "store", cache_leaves=8)
config = uvicorn.Config(app, host="127.0.0.1", port=8137, log_level="error")
server = uvicorn.Server(config)
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.05)

base = "http://127.0.0.1:8137"
with httpx.Client(base_url=base, timeout=10) as client:
    overview = client.get("/api/tree").json()
    print(f"store: {overview['node_count']} nodes, {overview['edge_count']} edges, "
          f"{overview['leaf_count']} leaf communities")

    first_leaf = next(n["id"] for n in overview["nodes"] if n["kind"] == "L")
    print("\nexpand leaf", first_leaf, "->", client.post(f"/api/leaf/{first_leaf}/expand").json())
    print("layout:", client.get(f"/api/leaf/{first_leaf}/layout", params={"seed": 1}).json()["positions"])

    leaves = [n["id"] for n in overview["nodes"] if n["kind"] == "L"]
    conn = client.get("/api/connectivity", params={"a": leaves[0], "b": leaves[1]}).json()
    print(f"\nconnectivity {leaves[0]}<->{leaves[1]}: weight {conn['weight']} edges {conn['edges']}")

    print("\nsearch 'bea':", client.get("/api/search", params={"label": "bea"}).json()["hits"])
    print("external of node 2:", [e["neighbor"] for e in client.get("/api/node/2/external").json()["entries"]])
    print("cache:", client.get("/api/cache").json())

server.should_exit = True
thread.join(timeout=5)
print("\nserver stopped")
