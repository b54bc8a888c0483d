// @vitest-environment jsdom
/** Live agreement check against a fixture store served by the backend.
 *
 * Runs only when HIERGRAPH_API points at a running service (the repo's
 * run_agreement script arranges that); otherwise the suite is skipped.
 * Asserts that what the panels display is exactly what the API said.
 */
import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderBipartiteModal, renderExternalPanel } from "../src/render.js";
import { bipartiteColumns } from "../src/geometry.js";

const base = process.env.HIERGRAPH_API;

describe.skipIf(!base)("UI/API agreement on the fixture store", () => {
  const client = new ApiClient(base, (url, init) => fetch(url, init));

  it("connectivity weight shown in the modal equals the API's", async () => {
    const tree = await client.tree();
    const leaves = tree.nodes.filter((n) => n.kind === "L").map((n) => n.id);
    const conn = await client.connectivity(leaves[0]!, leaves[1]!);
    const closure = await client.closure(leaves[0]!);

    document.body.innerHTML = '<div id="m"></div>';
    const modal = document.querySelector<HTMLElement>("#m")!;
    renderBipartiteModal(
      modal,
      conn.edges,
      bipartiteColumns(conn.edges, new Set(closure.closure), 200, 150),
      200,
      150,
      conn.weight,
    );
    expect(modal.querySelector("h3")!.textContent).toBe(`${conn.weight} cross edges`);
    expect(modal.querySelectorAll("line.bipartite-edge")).toHaveLength(conn.edges.length);
  });

  it("external-neighbor list equals the API response", async () => {
    const external = await client.external(2);
    document.body.innerHTML = '<div id="p"></div>';
    const panel = document.querySelector<HTMLElement>("#p")!;
    renderExternalPanel(panel, 2, external.entries, null);
    const shown = [...panel.querySelectorAll("li")].map((li) => li.textContent ?? "");
    expect(shown).toHaveLength(external.entries.length);
    for (const entry of external.entries) {
      expect(shown.some((t) => t.includes(`neighbor ${entry.neighbor}`))).toBe(true);
    }
  });

  it("expand -> collapse -> expand returns identical member sets", async () => {
    const tree = await client.tree();
    const leaf = tree.nodes.find((n) => n.kind === "L")!.id;
    const first = await client.expand(leaf);
    await client.collapse(leaf);
    const second = await client.expand(leaf);
    expect(second.members).toEqual(first.members);
    expect(second.edges).toEqual(first.edges);
    await client.collapse(leaf);
  });
});
