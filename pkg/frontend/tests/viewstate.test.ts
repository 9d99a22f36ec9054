import { describe, expect, it } from "vitest";

import {
  initialState,
  laneKey,
  pan,
  parseLaneKey,
  timeToX,
  toggleLane,
  xToTime,
  zoom,
} from "../src/viewstate.js";

describe("window invariants", () => {
  it("initial window covers the recording", () => {
    const s = initialState(2.0, 12.0);
    expect([s.t0, s.t1]).toEqual([2.0, 12.0]);
  });

  it("t0 < t1 always holds through pan and zoom", () => {
    let s = initialState(0, 10);
    for (const op of [
      () => (s = zoom(s, 0.001)),
      () => (s = zoom(s, 1000)),
      () => (s = pan(s, -99)),
      () => (s = pan(s, 99)),
    ]) {
      op();
      expect(s.t0).toBeLessThan(s.t1);
    }
  });

  it("pan clamps at the recording edges", () => {
    let s = initialState(0, 10);
    s = zoom(s, 0.1); // 1 s window
    s = pan(s, -100);
    expect(s.t0).toBe(0);
    s = pan(s, +100);
    expect(s.t1).toBe(10);
  });

  it("zoom keeps the anchor point fixed", () => {
    let s = initialState(0, 10);
    s = zoom(s, 0.5, 0.5);
    expect(s.t0).toBeCloseTo(2.5, 10);
    expect(s.t1).toBeCloseTo(7.5, 10);
  });

  it("zoom out never exceeds the recording", () => {
    let s = initialState(0, 10);
    s = zoom(s, 5);
    expect(s.t0).toBeGreaterThanOrEqual(0);
    expect(s.t1).toBeLessThanOrEqual(10);
  });
});

describe("selection", () => {
  it("toggling one lane never touches the others", () => {
    let s = initialState(0, 10);
    s = toggleLane(s, 1, 0);
    s = toggleLane(s, 2, 3);
    expect([...s.selected].sort()).toEqual(["1:0", "2:3"]);
    s = toggleLane(s, 1, 0);
    expect([...s.selected]).toEqual(["2:3"]);
  });

  it("lane keys round-trip", () => {
    expect(parseLaneKey(laneKey(7, 2))).toEqual({ streamId: 7, channel: 2 });
  });
});

describe("time/pixel mapping", () => {
  it("is inverse of itself", () => {
    const t = xToTime(333, 1000, 5, 15);
    expect(timeToX(t, 1000, 5, 15)).toBeCloseTo(333, 9);
  });
});
