/** SVG/DOM builders. Rendering is a pure function of the view model the
 *  caller assembled from API payloads; nothing is recomputed here. */

import type { Circle, Ribbon } from "./geometry.js";
import { depthColor } from "./geometry.js";
import type { EdgeTriple, ExpandResponse, ExternalEntry, LeafLayoutResponse } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) {
    el.setAttribute(k, String(v));
  }
  return el;
}

export interface CircleHandlers {
  onSelect: (id: number) => void;
  onExpandToggle: (id: number, isLeaf: boolean) => void;
}

export function drawHierarchy(
  svg: SVGSVGElement,
  circles: Circle[],
  ribbons: Ribbon[],
  options: {
    leafIds: ReadonlySet<number>;
    expanded: ReadonlySet<number>;
    selection: readonly number[];
    focused: number;
    handlers: CircleHandlers;
  },
): void {
  svg.textContent = "";
  const ribbonLayer = svgEl("g", { class: "ribbons" });
  const circleLayer = svgEl("g", { class: "circles" });
  svg.append(ribbonLayer, circleLayer);

  for (const r of ribbons) {
    const line = svgEl("line", {
      x1: r.x1,
      y1: r.y1,
      x2: r.x2,
      y2: r.y2,
      "stroke-width": r.width,
      class: "ribbon",
    });
    line.append(svgTitle(`${r.weight} edges between ${r.a} and ${r.b}`));
    ribbonLayer.append(line);
  }

  for (const c of circles) {
    const isLeaf = options.leafIds.has(c.id);
    const classes = ["community"];
    if (options.selection.includes(c.id)) {
      classes.push("selected");
    }
    if (c.id === options.focused) {
      classes.push("focused");
    }
    if (isLeaf && options.expanded.has(c.id)) {
      classes.push("expanded");
    }
    const el = svgEl("circle", {
      cx: c.cx,
      cy: c.cy,
      r: c.r,
      fill: c.depth === 0 ? "none" : depthColor(c.depth),
      "fill-opacity": c.depth === 0 ? 0 : 0.35,
      "data-id": c.id,
      class: classes.join(" "),
    });
    el.append(svgTitle(`community ${c.id}`));
    el.addEventListener("click", (ev) => {
      ev.stopPropagation();
      options.handlers.onSelect(c.id);
    });
    el.addEventListener("dblclick", (ev) => {
      ev.stopPropagation();
      options.handlers.onExpandToggle(c.id, isLeaf);
    });
    circleLayer.append(el);
  }
}

function svgTitle(text: string): SVGTitleElement {
  const t = document.createElementNS(SVG_NS, "title");
  t.textContent = text;
  return t;
}

export function drawHighlightRibbon(
  svg: SVGSVGElement,
  a: Circle,
  b: Circle,
  weight: number,
  width: number,
): void {
  const layer = svgEl("g", { class: "highlight" });
  const line = svgEl("line", {
    x1: a.cx,
    y1: a.cy,
    x2: b.cx,
    y2: b.cy,
    "stroke-width": width,
    class: "ribbon-highlight",
  });
  line.append(svgTitle(`${weight} edges`));
  layer.append(line);
  svg.append(layer);
}

export function drawLeafSubgraph(
  svg: SVGSVGElement,
  circle: Circle,
  data: ExpandResponse,
  layout: LeafLayoutResponse,
  inspected: number | null,
  onInspect: (node: number) => void,
): void {
  const layer = svgEl("g", { class: "leaf-subgraph" });
  const scale = circle.r * 1.7;
  const ox = circle.cx - scale / 2;
  const oy = circle.cy - scale / 2;
  const at = (node: number): [number, number] => {
    const p = layout.positions[String(node)] ?? [0.5, 0.5];
    return [ox + p[0] * scale, oy + p[1] * scale];
  };
  for (const [u, v] of data.edges) {
    const [x1, y1] = at(u);
    const [x2, y2] = at(v);
    layer.append(svgEl("line", { x1, y1, x2, y2, class: "leaf-edge" }));
  }
  for (const node of data.members) {
    const [cx, cy] = at(node);
    const dot = svgEl("circle", {
      cx,
      cy,
      r: Math.max(2.5, circle.r * 0.05),
      class: node === inspected ? "leaf-node inspected" : "leaf-node",
      "data-node": node,
    });
    const label = data.labels[String(node)];
    dot.append(svgTitle(label ? `${node}: ${label}` : String(node)));
    dot.addEventListener("click", (ev) => {
      ev.stopPropagation();
      onInspect(node);
    });
    layer.append(dot);
  }
  svg.append(layer);
}

export function renderLevelTracker(container: HTMLElement, depths: number, active: number): void {
  container.textContent = "";
  for (let level = 0; level < depths; level += 1) {
    const step = document.createElement("div");
    step.className = level === active ? "tracker-step active" : "tracker-step";
    step.textContent = `level ${level}`;
    container.append(step);
  }
}

export function renderExternalPanel(
  panel: HTMLElement,
  node: number,
  entries: readonly ExternalEntry[],
  internalDegree: number | null,
): void {
  panel.textContent = "";
  const heading = document.createElement("h3");
  heading.textContent = `node ${node}: external neighbors`;
  panel.append(heading);
  if (entries.length === 0) {
    const empty = document.createElement("p");
    empty.textContent = "no external neighbors";
    panel.append(empty);
  } else {
    const groups = new Map<number, ExternalEntry[]>();
    for (const entry of entries) {
      const bucket = groups.get(entry.resolved_at) ?? [];
      bucket.push(entry);
      groups.set(entry.resolved_at, bucket);
    }
    for (const [resolvedAt, bucket] of [...groups.entries()].sort((x, y) => x[0] - y[0])) {
      const title = document.createElement("h4");
      title.textContent = `resolved at community ${resolvedAt}`;
      panel.append(title);
      const list = document.createElement("ul");
      for (const entry of bucket) {
        const item = document.createElement("li");
        item.textContent = `neighbor ${entry.neighbor} (leaf ${entry.neighbor_leaf}, weight ${entry.edge[2]})`;
        list.append(item);
      }
      panel.append(list);
    }
  }
  const totals = document.createElement("p");
  totals.className = "totals";
  totals.textContent =
    internalDegree === null
      ? `${entries.length} external edges`
      : `${entries.length} external + ${internalDegree} internal edges`;
  panel.append(totals);
}

export function renderBipartiteModal(
  modal: HTMLElement,
  edges: readonly EdgeTriple[],
  placements: ReadonlyArray<{ node: number; x: number; y: number }>,
  width: number,
  height: number,
  weight: number,
): void {
  modal.textContent = "";
  const heading = document.createElement("h3");
  heading.textContent = `${weight} cross edges`;
  modal.append(heading);
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  const pos = new Map(placements.map((p) => [p.node, p]));
  for (const [u, v] of edges) {
    const a = pos.get(u);
    const b = pos.get(v);
    if (a && b) {
      svg.append(svgEl("line", { x1: a.x, y1: a.y, x2: b.x, y2: b.y, class: "bipartite-edge" }));
    }
  }
  for (const p of placements) {
    svg.append(svgEl("circle", { cx: p.x, cy: p.y, r: 6, class: "bipartite-node" }));
    const label = svgEl("text", { x: p.x, y: p.y - 10, "text-anchor": "middle", class: "bipartite-label" });
    label.textContent = String(p.node);
    svg.append(label);
  }
  modal.append(svg);
}

export function showBanner(el: HTMLElement, message: string | null): void {
  if (message === null) {
    el.classList.add("hidden");
    el.textContent = "";
  } else {
    el.classList.remove("hidden");
    el.textContent = message;
  }
}
