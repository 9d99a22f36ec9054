// Contract tests against JSON captured from the real service
// (regenerate with: python3 scripts/make_fixtures.py).

import { describe, expect, it } from "vitest";

import { buildLanes, defaultSelection } from "../src/lanes.js";
import { flattenTree, defaultExpansion, toggleNode } from "../src/tree.js";
import type { EventList, MetaNode, RecordingSummary } from "../src/types.js";
import { fixture } from "./helpers.js";

const recording = fixture<RecordingSummary>("recording.json");

describe("recording summary", () => {
  it("has the fixture's three streams", () => {
    expect(recording.streams.map((s) => s.name)).toEqual(["ramp", "drifty", "marks"]);
    expect(recording.duration).toBeGreaterThan(0);
  });

  it("flags exactly the stream whose rate deviates", () => {
    const flagged = recording.streams.filter((s) => s.deviates).map((s) => s.name);
    expect(flagged).toEqual(["drifty"]);
  });
});

describe("lane building", () => {
  it("badges exactly the deviating stream's lanes", () => {
    const selected = new Set(["1:0", "1:1", "2:0"]);
    const lanes = buildLanes(recording, selected);
    expect(lanes.map((l) => [l.label, l.badge])).toEqual([
      ["ramp [0]", false],
      ["ramp [1]", false],
      ["drifty", true],
    ]);
  });

  it("assigns distinct colors to different streams", () => {
    const lanes = buildLanes(recording, new Set(["1:0", "2:0"]));
    expect(lanes[0].color).not.toBe(lanes[1].color);
  });

  it("selecting a lane does not change the others' identity", () => {
    const before = buildLanes(recording, new Set(["1:0"]));
    const after = buildLanes(recording, new Set(["1:0", "2:0"]));
    expect(after[0]).toEqual(before[0]);
  });

  it("default selection covers non-marker streams only", () => {
    expect([...defaultSelection(recording)].sort()).toEqual(["1:0", "2:0"]);
  });

  it("ignores out-of-range channels", () => {
    expect(buildLanes(recording, new Set(["2:5"]))).toEqual([]);
  });
});

describe("events fixture", () => {
  it("decoded marker samples arrive as read-only events", () => {
    const events = fixture<EventList>("events.json");
    expect(events.events.map((e) => e.label)).toEqual(["go", "stop"]);
    expect(events.events.every((e) => e.origin === "decoded")).toBe(true);
    expect(events.dirty).toBe(false);
  });
});

describe("metadata tree", () => {
  const meta = fixture<MetaNode>("meta_ramp.json");

  it("flattens the header in document order", () => {
    const rows = flattenTree(meta, defaultExpansion(meta));
    expect(rows[0].name).toBe("info");
    expect(rows.slice(1).map((r) => r.name)).toEqual([
      "name",
      "type",
      "channel_count",
      "nominal_srate",
      "channel_format",
    ]);
    expect(rows[1].text).toBe("ramp");
  });

  it("collapsing the root hides its children", () => {
    const collapsed = toggleNode(defaultExpansion(meta), meta.name);
    expect(flattenTree(meta, collapsed)).toHaveLength(1);
  });
});
