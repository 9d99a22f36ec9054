// Visible window, lane selection, pending annotation.

import type { EventDraft } from "./types.js";

export interface ViewState {
  t0: number;
  t1: number;
  recStart: number;
  recEnd: number;
  selected: Set<string>;
  pending: EventDraft | null;
}

const MIN_WIDTH = 1e-3; // seconds

export function laneKey(streamId: number, channel: number): string {
  return `${streamId}:${channel}`;
}

export function parseLaneKey(key: string): { streamId: number; channel: number } {
  const [sid, ch] = key.split(":");
  return { streamId: Number(sid), channel: Number(ch) };
}

export function initialState(recStart: number, recEnd: number): ViewState {
  const end = recEnd > recStart ? recEnd : recStart + 1;
  return {
    t0: recStart,
    t1: end,
    recStart,
    recEnd: end,
    selected: new Set(),
    pending: null,
  };
}

export function toggleLane(state: ViewState, streamId: number, channel: number): ViewState {
  const key = laneKey(streamId, channel);
  const selected = new Set(state.selected);
  if (selected.has(key)) selected.delete(key);
  else selected.add(key);
  return { ...state, selected };
}

function clampWindow(state: ViewState, t0: number, t1: number): ViewState {
  const span = Math.max(MIN_WIDTH, Math.min(t1 - t0, state.recEnd - state.recStart));
  let start = t0;
  if (start < state.recStart) start = state.recStart;
  if (start + span > state.recEnd) start = state.recEnd - span;
  return { ...state, t0: start, t1: start + span };
}

/** Shift the window by a fraction of its width (negative = earlier). */
export function pan(state: ViewState, fraction: number): ViewState {
  const width = state.t1 - state.t0;
  return clampWindow(state, state.t0 + fraction * width, state.t1 + fraction * width);
}

/** Scale the window width by `factor`, keeping `centerFrac` (0..1) fixed. */
export function zoom(state: ViewState, factor: number, centerFrac = 0.5): ViewState {
  const width = state.t1 - state.t0;
  const center = state.t0 + centerFrac * width;
  const newWidth = Math.max(MIN_WIDTH, width * factor);
  return clampWindow(state, center - centerFrac * newWidth, center + (1 - centerFrac) * newWidth);
}

export function xToTime(x: number, laneWidth: number, t0: number, t1: number): number {
  return t0 + (x / laneWidth) * (t1 - t0);
}

export function timeToX(t: number, laneWidth: number, t0: number, t1: number): number {
  return ((t - t0) / (t1 - t0)) * laneWidth;
}
