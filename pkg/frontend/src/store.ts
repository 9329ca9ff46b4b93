import type { Bundle, WhatifResponse } from "./types.js";

export interface ViewState {
  sessionId: string | null;
  bundle: Bundle | null;
  /** columns of the subset whose drill-down is open, canonical sorted order */
  selectedSubset: string[] | null;
  /** last uncommitted what-if preview, if any */
  whatif: WhatifResponse | null;
  /** column a pending generalize preview targets (for the delta card) */
  whatifColumn: string | null;
  historyDepth: number;
  error: string | null;
}

export const initialState: ViewState = {
  sessionId: null,
  bundle: null,
  selectedSubset: null,
  whatif: null,
  whatifColumn: null,
  historyDepth: 0,
  error: null,
};

type Listener = (state: ViewState) => void;

/** Minimal observable state container; every mutation notifies subscribers
 * with the full immutable state. */
export class Store {
  private state: ViewState;
  private listeners: Listener[] = [];

  constructor(state: ViewState = initialState) {
    this.state = { ...state };
  }

  get(): ViewState {
    return this.state;
  }

  set(partial: Partial<ViewState>): ViewState {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}
