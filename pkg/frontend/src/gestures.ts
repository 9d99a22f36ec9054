// Drag-to-annotate: a horizontal drag spans a duration, a plain click is an
// instantaneous event. The draft is only posted once the label validates.

import type { EventDraft } from "./types.js";
import { xToTime } from "./viewstate.js";

export const CLICK_THRESHOLD_PX = 3;

export function dragToDraft(
  xStart: number,
  xEnd: number,
  laneWidth: number,
  t0: number,
  t1: number,
): { onset: number; duration: number } {
  if (Math.abs(xEnd - xStart) < CLICK_THRESHOLD_PX) {
    return { onset: xToTime(xStart, laneWidth, t0, t1), duration: 0 };
  }
  const a = xToTime(Math.min(xStart, xEnd), laneWidth, t0, t1);
  const b = xToTime(Math.max(xStart, xEnd), laneWidth, t0, t1);
  return { onset: a, duration: b - a };
}

/** Returns an error message, or null when the label is usable. */
export function validateLabel(label: string): string | null {
  if (label.trim().length === 0) return "label must not be empty";
  return null;
}

export function buildEventBody(
  draft: { onset: number; duration: number },
  label: string,
): EventDraft {
  const error = validateLabel(label);
  if (error) throw new Error(error);
  return { onset: draft.onset, duration: draft.duration, label: label.trim() };
}
