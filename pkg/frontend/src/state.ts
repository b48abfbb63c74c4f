/** Client-side view state; analysis data itself lives on the service. */

export interface ViewState {
  sessionId: string | null;
  version: number;
  yearRange: [number, number];
  selectedRpy: number | null;
  selectedVariants: Set<string>;
  overlaySessions: string[];
}

export function createViewState(): ViewState {
  return {
    sessionId: null,
    version: 0,
    yearRange: [1900, 1995],
    selectedRpy: null,
    selectedVariants: new Set(),
    overlaySessions: [],
  };
}

/** Selecting a year outside the visible range is a programming error upstream. */
export function selectYear(state: ViewState, rpy: number | null): ViewState {
  if (rpy !== null && (rpy < state.yearRange[0] || rpy > state.yearRange[1])) {
    throw new RangeError(`year ${rpy} outside the visible range ${state.yearRange.join("..")}`);
  }
  return { ...state, selectedRpy: rpy, selectedVariants: new Set() };
}

export function setYearRange(state: ViewState, lo: number, hi: number): ViewState {
  const selected = state.selectedRpy !== null && state.selectedRpy >= lo && state.selectedRpy <= hi
    ? state.selectedRpy
    : null;
  return { ...state, yearRange: [lo, hi], selectedRpy: selected };
}

export function toggleVariant(state: ViewState, variantId: string): ViewState {
  const next = new Set(state.selectedVariants);
  if (next.has(variantId)) {
    next.delete(variantId);
  } else {
    next.add(variantId);
  }
  return { ...state, selectedVariants: next };
}
