/** View state and its pure transition functions.
 *
 * Invariants the reducers maintain:
 *  - at most two communities selected;
 *  - highlighted connectivity exists only while exactly two are selected,
 *    and always belongs to that pair;
 *  - the focused node is always on the root-to-leaf path being walked.
 */

import type { ConnectivityResponse, ExpandResponse, SearchHit } from "./types.js";

export interface ViewState {
  focused: number;
  expanded: ReadonlySet<number>;
  selection: readonly number[];
  highlighted: ConnectivityResponse | null;
  inspected: number | null;
  /** remaining steps of a drill-down, next step first; empty when idle */
  pendingPath: readonly number[];
  /** depth currently highlighted in the level tracker */
  trackerLevel: number;
}

export function initialState(root: number): ViewState {
  return {
    focused: root,
    expanded: new Set(),
    selection: [],
    highlighted: null,
    inspected: null,
    pendingPath: [],
    trackerLevel: 0,
  };
}

/** Toggle a community in the selection (max two, oldest dropped). */
export function toggleSelect(state: ViewState, id: number): ViewState {
  let selection: number[];
  if (state.selection.includes(id)) {
    selection = state.selection.filter((s) => s !== id);
  } else {
    selection = [...state.selection, id].slice(-2);
  }
  return { ...state, selection, highlighted: null };
}

export function clearSelection(state: ViewState): ViewState {
  return { ...state, selection: [], highlighted: null };
}

/** Attach fetched connectivity; legal only for the current 2-selection. */
export function setHighlight(state: ViewState, conn: ConnectivityResponse): ViewState {
  if (state.selection.length !== 2) {
    return state;
  }
  const [a, b] = state.selection as [number, number];
  const matches = (conn.a === a && conn.b === b) || (conn.a === b && conn.b === a);
  if (!matches) {
    return state;
  }
  return { ...state, highlighted: conn };
}

export function markExpanded(state: ViewState, leaf: number): ViewState {
  const expanded = new Set(state.expanded);
  expanded.add(leaf);
  return { ...state, expanded };
}

export function markCollapsed(state: ViewState, leaf: number): ViewState {
  const expanded = new Set(state.expanded);
  expanded.delete(leaf);
  return { ...state, expanded };
}

/** Begin a drill-down along a search hit's root-to-leaf path. */
export function startDrillDown(state: ViewState, hit: SearchHit): ViewState {
  if (hit.path.length === 0) {
    return state;
  }
  return {
    ...state,
    focused: hit.path[0]!,
    pendingPath: hit.path.slice(1),
    trackerLevel: 0,
    inspected: null,
  };
}

/** Advance one level; returns the same state when the walk is finished. */
export function stepDrillDown(state: ViewState): ViewState {
  if (state.pendingPath.length === 0) {
    return state;
  }
  const [next, ...rest] = state.pendingPath;
  return {
    ...state,
    focused: next!,
    pendingPath: rest,
    trackerLevel: state.trackerLevel + 1,
  };
}

export function drillDownActive(state: ViewState): boolean {
  return state.pendingPath.length > 0;
}

export function inspect(state: ViewState, node: number | null): ViewState {
  return { ...state, inspected: node };
}

/** Node ids the leaf panel renders for the current expansion set: the
 *  round-trip expand/collapse/expand must reproduce this exactly. */
export function renderedLeafNodes(
  state: ViewState,
  leafData: ReadonlyMap<number, ExpandResponse>,
): number[] {
  const out: number[] = [];
  for (const leaf of [...state.expanded].sort((x, y) => x - y)) {
    const data = leafData.get(leaf);
    if (data) {
      out.push(...data.members);
    }
  }
  return out;
}

export function invariantsHold(state: ViewState): boolean {
  if (state.selection.length > 2) {
    return false;
  }
  if (state.highlighted !== null && state.selection.length !== 2) {
    return false;
  }
  if (state.highlighted !== null) {
    const pair = new Set([state.highlighted.a, state.highlighted.b]);
    if (!state.selection.every((s) => pair.has(s))) {
      return false;
    }
  }
  return true;
}
