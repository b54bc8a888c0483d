import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function fakeFetch(routes: Record<string, { status?: number; body: unknown }>) {
  const calls: Array<{ url: string; method: string }> = [];
  const fn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, method: init?.method ?? "GET" });
    const hit = routes[url];
    if (!hit) {
      return new Response(JSON.stringify({ error: { code: "unknown-path", message: url } }), {
        status: 404,
      });
    }
    return new Response(JSON.stringify(hit.body), { status: hit.status ?? 200 });
  };
  return { fn, calls };
}

describe("url building", () => {
  it("joins base, path and encoded query parameters", () => {
    const client = new ApiClient("http://localhost:8100");
    expect(client.url("/api/connectivity", { a: 3, b: 4 })).toBe(
      "http://localhost:8100/api/connectivity?a=3&b=4",
    );
    expect(client.url("/api/search", { label: "a b" })).toBe(
      "http://localhost:8100/api/search?label=a%20b",
    );
  });
});

describe("request handling", () => {
  it("returns the service payload verbatim", async () => {
    const payload = { a: 3, b: 4, meeting_point: 1, weight: 2, edges: [[2, 3, 1]] };
    const { fn } = fakeFetch({ "/api/connectivity?a=3&b=4": { body: payload } });
    const client = new ApiClient("", fn);
    expect(await client.connectivity(3, 4)).toEqual(payload);
  });

  it("uses POST for expand and collapse", async () => {
    const { fn, calls } = fakeFetch({
      "/api/leaf/3/expand": { body: { leaf: 3, loaded: true, members: [], edges: [], labels: {} } },
      "/api/leaf/3/collapse": { body: { leaf: 3, loaded: false } },
    });
    const client = new ApiClient("", fn);
    await client.expand(3);
    await client.collapse(3);
    expect(calls.map((c) => c.method)).toEqual(["POST", "POST"]);
  });

  it("raises ApiError carrying the service error code", async () => {
    const { fn } = fakeFetch({
      "/api/supernode/99/closure": {
        status: 404,
        body: { error: { code: "unknown-supernode", message: "unknown tree node id 99" } },
      },
    });
    const client = new ApiClient("", fn);
    const err = await client.closure(99).catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).code).toBe("unknown-supernode");
  });

  it("maps network failure to status 0 / unreachable", async () => {
    const client = new ApiClient("", async () => {
      throw new TypeError("fetch failed");
    });
    const err = await client.tree().catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(0);
    expect((err as ApiError).code).toBe("unreachable");
  });
});
