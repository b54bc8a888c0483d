/** Typed client for the query service. The fetch function is injected so
 *  tests can run it against canned responses. */

import type {
  ConnectivityResponse,
  ExpandResponse,
  ExternalResponse,
  HierarchyLayoutResponse,
  LeafLayoutResponse,
  MetricsResponse,
  SearchResponse,
  TreeOverview,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  url(path: string, params?: Record<string, string | number>): string {
    const query = params
      ? "?" +
        Object.entries(params)
          .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(String(v))}`)
          .join("&")
      : "";
    return `${this.baseUrl}${path}${query}`;
  }

  private async request<T>(path: string, params?: Record<string, string | number>, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.url(path, params), init);
    } catch (err) {
      throw new ApiError(0, "unreachable", `API unreachable: ${String(err)}`);
    }
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const code = body?.error?.code ?? "http-error";
      const message = body?.error?.message ?? `HTTP ${response.status}`;
      throw new ApiError(response.status, code, message);
    }
    return body as T;
  }

  tree(): Promise<TreeOverview> {
    return this.request("/api/tree");
  }

  hierarchyLayout(): Promise<HierarchyLayoutResponse> {
    return this.request("/api/layout/hierarchy");
  }

  closure(id: number): Promise<{ id: number; closure: number[] }> {
    return this.request(`/api/supernode/${id}/closure`);
  }

  connectivity(a: number, b: number): Promise<ConnectivityResponse> {
    return this.request("/api/connectivity", { a, b });
  }

  external(node: number): Promise<ExternalResponse> {
    return this.request(`/api/node/${node}/external`);
  }

  search(label: string): Promise<SearchResponse> {
    return this.request("/api/search", { label });
  }

  expand(leaf: number): Promise<ExpandResponse> {
    return this.request(`/api/leaf/${leaf}/expand`, undefined, { method: "POST" });
  }

  collapse(leaf: number): Promise<{ leaf: number; loaded: boolean }> {
    return this.request(`/api/leaf/${leaf}/collapse`, undefined, { method: "POST" });
  }

  leafLayout(leaf: number, seed = 0): Promise<LeafLayoutResponse> {
    return this.request(`/api/leaf/${leaf}/layout`, { seed });
  }

  metrics(leaf: number): Promise<MetricsResponse> {
    return this.request(`/api/leaf/${leaf}/metrics`);
  }
}
