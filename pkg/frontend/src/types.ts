/** Shapes of the JSON the query service returns. Nothing here is computed
 *  client-side: every number displayed in the UI comes from these payloads. */

export interface SuperEdgeSummary {
  a: number;
  b: number;
  weight: number;
}

export interface TreeNodeInfo {
  id: number;
  kind: "S" | "L";
  parent: number | null;
  depth: number;
  open_count: number;
  member_count: number;
  children?: number[];
  superedges?: SuperEdgeSummary[];
  loaded?: boolean;
}

export interface TreeOverview {
  version: string;
  k: number;
  h: number;
  node_count: number;
  edge_count: number;
  root: number;
  leaf_count: number;
  nodes: TreeNodeInfo[];
}

export type EdgeTriple = [number, number, number];

export interface ConnectivityResponse {
  a: number;
  b: number;
  meeting_point: number;
  weight: number;
  edges: EdgeTriple[];
}

export interface ExternalEntry {
  edge: EdgeTriple;
  neighbor: number;
  neighbor_leaf: number;
  resolved_at: number;
}

export interface ExternalResponse {
  node: number;
  entries: ExternalEntry[];
}

export interface SearchHit {
  node: number;
  label: string;
  path: number[];
}

export interface SearchResponse {
  query: string;
  hits: SearchHit[];
}

export interface ExpandResponse {
  leaf: number;
  loaded: boolean;
  members: number[];
  edges: EdgeTriple[];
  labels: Record<string, string>;
}

export interface LeafLayoutResponse {
  leaf: number;
  seed: number;
  iterations: number;
  positions: Record<string, [number, number]>;
}

export interface HierarchyLayoutResponse {
  circles: Record<string, [number, number, number]>;
  levels: Record<string, number>;
}

export interface MetricsResponse {
  leaf: number;
  degree_histogram: Record<string, number>;
  component_count: number;
  component_sizes: number[];
  diameter_sample: number | null;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
