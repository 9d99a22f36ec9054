// End-to-end against a live service: spawn `xdfkit serve` on a generated
// recording and drive the same calls the viewer makes. Skipped when the
// Python package is not installed.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { buildEventBody, dragToDraft } from "../src/gestures.js";
import { tilesToSegments } from "../src/envelope.js";

const PORT = 8397;
const BASE = `http://127.0.0.1:${PORT}`;

const cliAvailable = spawnSync("xdfkit", ["--version"], { timeout: 20000 }).status === 0;

let server: ChildProcess | null = null;
let workdir: string | null = null;
const api = new ApiClient(BASE);

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 80; i++) {
    try {
      const response = await fetch(`${BASE}/api/recording`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error("service did not come up");
}

describe.skipIf(!cliAvailable)("live service integration", () => {
  beforeAll(async () => {
    workdir = mkdtempSync(join(tmpdir(), "xdfkit-viewer-"));
    const file = join(workdir, "it.xdf");
    const gen = spawnSync(
      "xdfkit",
      ["synthgen", "--duration", "10", "--noise", "0.2", "--seed", "4", "-o", file],
      { timeout: 120000 },
    );
    expect(gen.status).toBe(0);
    server = spawn("xdfkit", ["serve", file, "--port", String(PORT)], {
      stdio: "ignore",
    });
    await waitForServer();
  }, 120000);

  afterAll(() => {
    server?.kill();
    if (workdir) rmSync(workdir, { recursive: true, force: true });
  });

  it("lists the five generated streams", async () => {
    const recording = await api.getRecording();
    expect(recording.streams.map((s) => s.name)).toEqual([
      "raw",
      "filtered",
      "phase",
      "predicted-phase",
      "triggers",
    ]);
  });

  it("tiles render without client-side resampling", async () => {
    const tiles = await api.getTiles(1, 0, 0, 5, 200);
    expect(tiles.tiles).toHaveLength(200);
    const segments = tilesToSegments(tiles.tiles, 100);
    expect(segments.filter((s) => !s.empty).length).toBeGreaterThan(190);
  });

  it("annotation gesture round-trips through POST + GET", async () => {
    // drag from x=100 to x=200 on a 1000 px lane over [0, 10) s
    const draft = dragToDraft(100, 200, 1000, 0, 10);
    const created = await api.postEvent(buildEventBody(draft, "integration"));
    expect(created.origin).toBe("user");
    expect(created.onset).toBeCloseTo(1.0, 9);
    expect(created.duration).toBeCloseTo(1.0, 9);

    const listed = await api.getEvents();
    const found = listed.events.find((e) => e.id === created.id);
    expect(found?.label).toBe("integration");
    expect(listed.dirty).toBe(true);

    await api.deleteEvent(created.id);
    const after = await api.getEvents();
    expect(after.events.some((e) => e.id === created.id)).toBe(false);
  });

  it("refuses to delete decoded trigger events", async () => {
    const listed = await api.getEvents();
    const decoded = listed.events.find((e) => e.origin === "decoded");
    expect(decoded).toBeDefined();
    await expect(api.deleteEvent(decoded!.id)).rejects.toThrowError(ApiError);
    await api.deleteEvent(decoded!.id).catch((err: ApiError) => {
      expect(err.status).toBe(403);
    });
  });

  it("validation errors surface as 422", async () => {
    await api.postEvent({ onset: 1, duration: -1, label: "bad" }).catch((err: ApiError) => {
      expect(err.status).toBe(422);
    });
  });
});
