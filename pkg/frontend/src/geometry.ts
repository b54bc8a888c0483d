/** Pure geometry helpers between unit-square layout space and pixels. */

import type { HierarchyLayoutResponse, SuperEdgeSummary } from "./types.js";

export interface Circle {
  id: number;
  cx: number;
  cy: number;
  r: number;
  depth: number;
}

export function toPixels(layout: HierarchyLayoutResponse, size: number): Circle[] {
  const out: Circle[] = [];
  for (const [key, [cx, cy, r]] of Object.entries(layout.circles)) {
    out.push({
      id: Number(key),
      cx: cx * size,
      cy: cy * size,
      r: r * size,
      depth: layout.levels[key] ?? 0,
    });
  }
  out.sort((a, b) => a.depth - b.depth || a.id - b.id);
  return out;
}

/** Ribbon stroke width: strictly increasing in bundle weight, bounded. */
export function ribbonWidth(weight: number, maxWidth = 14): number {
  if (weight <= 0) {
    return 0;
  }
  return Math.min(maxWidth, 1 + 2.2 * Math.log2(1 + weight));
}

export interface Ribbon {
  a: number;
  b: number;
  weight: number;
  width: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export function ribbons(
  superedges: readonly SuperEdgeSummary[],
  circleById: ReadonlyMap<number, Circle>,
): Ribbon[] {
  const out: Ribbon[] = [];
  for (const se of superedges) {
    const ca = circleById.get(se.a);
    const cb = circleById.get(se.b);
    if (!ca || !cb || se.weight <= 0) {
      continue;
    }
    out.push({
      a: se.a,
      b: se.b,
      weight: se.weight,
      width: ribbonWidth(se.weight),
      x1: ca.cx,
      y1: ca.cy,
      x2: cb.cx,
      y2: cb.cy,
    });
  }
  return out;
}

export interface BipartitePlacement {
  node: number;
  column: 0 | 1;
  x: number;
  y: number;
}

/** Two-column placement for the cross-edge detail view: side-a endpoints
 *  left, side-b endpoints right, each column evenly spaced. */
export function bipartiteColumns(
  edges: ReadonlyArray<[number, number, number]>,
  closureA: ReadonlySet<number>,
  width: number,
  height: number,
): BipartitePlacement[] {
  const left = new Set<number>();
  const right = new Set<number>();
  for (const [u, v] of edges) {
    if (closureA.has(u)) {
      left.add(u);
      right.add(v);
    } else {
      left.add(v);
      right.add(u);
    }
  }
  const place = (ids: Set<number>, column: 0 | 1): BipartitePlacement[] => {
    const sorted = [...ids].sort((x, y) => x - y);
    return sorted.map((node, i) => ({
      node,
      column,
      x: column === 0 ? width * 0.2 : width * 0.8,
      y: ((i + 1) / (sorted.length + 1)) * height,
    }));
  };
  return [...place(left, 0), ...place(right, 1)];
}

/** Depth-keyed fill colors for community circles. */
export function depthColor(depth: number): string {
  const palette = ["#233044", "#3b6ea5", "#6d9fc9", "#a9c8e0", "#d7e5f0"];
  return palette[Math.min(depth, palette.length - 1)]!;
}
