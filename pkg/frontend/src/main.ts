/** Application wiring: fetch, update view state, re-render.
 *
 * The client never computes graph quantities itself: weights, degrees,
 * closures and positions all come from the service verbatim.
 */

import { ApiClient, ApiError } from "./api.js";
import { bipartiteColumns, ribbonWidth, ribbons, toPixels, type Circle } from "./geometry.js";
import {
  drawHierarchy,
  drawHighlightRibbon,
  drawLeafSubgraph,
  renderBipartiteModal,
  renderExternalPanel,
  renderLevelTracker,
  showBanner,
} from "./render.js";
import {
  clearSelection,
  drillDownActive,
  initialState,
  inspect,
  invariantsHold,
  markCollapsed,
  markExpanded,
  setHighlight,
  startDrillDown,
  stepDrillDown,
  toggleSelect,
  type ViewState,
} from "./state.js";
import type { ExpandResponse, LeafLayoutResponse, SearchHit, TreeOverview } from "./types.js";

const CANVAS = 760;
const DRILL_STEP_MS = 450;

class ExplorerApp {
  private api: ApiClient;
  private state!: ViewState;
  private tree!: TreeOverview;
  private circles: Circle[] = [];
  private circleById = new Map<number, Circle>();
  private leafIds = new Set<number>();
  private leafData = new Map<number, ExpandResponse>();
  private leafLayouts = new Map<number, LeafLayoutResponse>();
  private drillTimer: number | null = null;
  private lastSearch: { query: string; retried: boolean } | null = null;

  private svg = document.querySelector<SVGSVGElement>("#canvas")!;
  private banner = document.querySelector<HTMLElement>("#banner")!;
  private tracker = document.querySelector<HTMLElement>("#level-tracker")!;
  private panel = document.querySelector<HTMLElement>("#detail-panel")!;
  private modal = document.querySelector<HTMLElement>("#bipartite-modal")!;
  private searchBox = document.querySelector<HTMLInputElement>("#search-box")!;
  private statusBar = document.querySelector<HTMLElement>("#status")!;

  constructor(baseUrl: string) {
    this.api = new ApiClient(baseUrl);
  }

  async start(): Promise<void> {
    try {
      const [tree, layout] = await Promise.all([this.api.tree(), this.api.hierarchyLayout()]);
      this.tree = tree;
      this.circles = toPixels(layout, CANVAS);
      this.circleById = new Map(this.circles.map((c) => [c.id, c]));
      this.leafIds = new Set(tree.nodes.filter((n) => n.kind === "L").map((n) => n.id));
      this.state = initialState(tree.root);
      showBanner(this.banner, null);
      this.statusBar.textContent =
        `${tree.node_count} nodes, ${tree.edge_count} edges, ` +
        `${tree.leaf_count} communities over ${tree.h} levels`;
      this.wireSearch();
      this.svg.addEventListener("click", () => this.update(clearSelection(this.state)));
      this.render();
    } catch (err) {
      showBanner(this.banner, this.describe(err));
    }
  }

  private describe(err: unknown): string {
    if (err instanceof ApiError) {
      return err.status === 0 ? "API unreachable; is the service running?" : err.message;
    }
    return String(err);
  }

  private update(next: ViewState): void {
    this.state = next;
    if (!invariantsHold(this.state)) {
      throw new Error("view-state invariant violated");
    }
    this.render();
  }

  private render(): void {
    const superedges = this.tree.nodes
      .filter((n) => n.kind === "S")
      .flatMap((n) => n.superedges ?? []);
    drawHierarchy(this.svg, this.circles, ribbons(superedges, this.circleById), {
      leafIds: this.leafIds,
      expanded: this.state.expanded,
      selection: this.state.selection,
      focused: this.state.focused,
      handlers: {
        onSelect: (id) => this.onSelect(id),
        onExpandToggle: (id, isLeaf) => void (isLeaf && this.toggleLeaf(id)),
      },
    });
    if (this.state.highlighted) {
      const a = this.circleById.get(this.state.highlighted.a);
      const b = this.circleById.get(this.state.highlighted.b);
      if (a && b) {
        drawHighlightRibbon(
          this.svg, a, b, this.state.highlighted.weight, ribbonWidth(this.state.highlighted.weight),
        );
      }
    }
    for (const leaf of this.state.expanded) {
      const circle = this.circleById.get(leaf);
      const data = this.leafData.get(leaf);
      const layout = this.leafLayouts.get(leaf);
      if (circle && data && layout) {
        drawLeafSubgraph(this.svg, circle, data, layout, this.state.inspected, (node) =>
          void this.inspectNode(node),
        );
      }
    }
    renderLevelTracker(this.tracker, this.tree.h, this.state.trackerLevel);
  }

  private async onSelect(id: number): Promise<void> {
    const next = toggleSelect(this.state, id);
    this.update(next);
    if (next.selection.length === 2) {
      const [a, b] = next.selection as [number, number];
      try {
        const conn = await this.api.connectivity(a, b);
        this.update(setHighlight(this.state, conn));
        const closure = await this.api.closure(a);
        renderBipartiteModal(
          this.modal,
          conn.edges,
          bipartiteColumns(conn.edges, new Set(closure.closure), 360, 300),
          360,
          300,
          conn.weight,
        );
        this.modal.classList.remove("hidden");
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          showBanner(this.banner, `cannot relate ${a} and ${b}: ${err.message}`);
          this.update(clearSelection(this.state));
        } else {
          showBanner(this.banner, this.describe(err));
        }
      }
    } else {
      this.modal.classList.add("hidden");
    }
  }

  private async toggleLeaf(leaf: number): Promise<void> {
    try {
      if (this.state.expanded.has(leaf)) {
        await this.api.collapse(leaf);
        this.update(markCollapsed(this.state, leaf));
      } else {
        const data = await this.api.expand(leaf);
        const layout = await this.api.leafLayout(leaf);
        this.leafData.set(leaf, data);
        this.leafLayouts.set(leaf, layout);
        this.update(markExpanded(this.state, leaf));
      }
    } catch (err) {
      showBanner(this.banner, this.describe(err));
    }
  }

  private async inspectNode(node: number): Promise<void> {
    this.update(inspect(this.state, node));
    try {
      const external = await this.api.external(node);
      renderExternalPanel(this.panel, node, external.entries, null);
      this.panel.classList.remove("hidden");
    } catch (err) {
      this.panel.textContent = `could not load neighbors: ${this.describe(err)}`;
      this.panel.classList.remove("hidden");
    }
  }

  private wireSearch(): void {
    this.searchBox.addEventListener("keydown", (ev) => {
      if (ev.key === "Enter") {
        void this.runSearch(this.searchBox.value.trim());
      }
    });
  }

  private async runSearch(query: string): Promise<void> {
    if (!query) {
      return;
    }
    this.lastSearch = { query, retried: this.lastSearch?.query === query && this.lastSearch.retried };
    try {
      const result = await this.api.search(query);
      if (result.hits.length === 0) {
        showBanner(this.banner, `no labels match "${query}"`);
        return;
      }
      showBanner(this.banner, null);
      await this.drillTo(result.hits[0]!);
    } catch (err) {
      showBanner(this.banner, this.describe(err));
    }
  }

  /** Animated focus descent with the level tracker; auto-expands the leaf. */
  private async drillTo(hit: SearchHit): Promise<void> {
    const known = hit.path.every((id) => this.circleById.has(id));
    if (!known) {
      // stale path (store rebuilt since): re-query once, then give up
      if (this.lastSearch && !this.lastSearch.retried) {
        this.lastSearch.retried = true;
        await this.start();
        await this.runSearch(this.lastSearch.query);
      } else {
        showBanner(this.banner, "search hit no longer matches the store");
      }
      return;
    }
    if (this.drillTimer !== null) {
      window.clearInterval(this.drillTimer);
    }
    this.update(startDrillDown(this.state, hit));
    await new Promise<void>((resolve) => {
      this.drillTimer = window.setInterval(() => {
        if (!drillDownActive(this.state)) {
          if (this.drillTimer !== null) {
            window.clearInterval(this.drillTimer);
            this.drillTimer = null;
          }
          resolve();
          return;
        }
        this.update(stepDrillDown(this.state));
      }, DRILL_STEP_MS);
    });
    const leaf = hit.path[hit.path.length - 1]!;
    if (!this.state.expanded.has(leaf)) {
      await this.toggleLeaf(leaf);
    }
    await this.inspectNode(hit.node);
  }
}

const base = new URLSearchParams(window.location.search).get("api") ?? "";
void new ExplorerApp(base).start();
