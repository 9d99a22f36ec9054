// Viewer shell: stacked waveform lanes on a canvas, stream/channel selection,
// metadata tree, event list, drag-to-annotate. All signal data arrives as
// server-computed envelope tiles; this file only draws them.

import { ApiClient, ApiError } from "./api.js";
import { isPolyline, tilesToSegments } from "./envelope.js";
import { buildEventBody, dragToDraft } from "./gestures.js";
import { buildLanes, defaultSelection, LanePlan } from "./lanes.js";
import { EventColorMap } from "./palette.js";
import { defaultExpansion, flattenTree, toggleNode } from "./tree.js";
import type { EventList, RecordingSummary, TileResponse } from "./types.js";
import {
  initialState,
  pan,
  timeToX,
  toggleLane,
  ViewState,
  xToTime,
  zoom,
} from "./viewstate.js";

const LANE_HEIGHT = 110;
const LANE_GAP = 8;
const AXIS_HEIGHT = 24;

const api = new ApiClient();
const eventColors = new EventColorMap();

let recording: RecordingSummary | null = null;
let state: ViewState | null = null;
let events: EventList = { events: [], next_id: 0, dirty: false };
let lanes: LanePlan[] = [];
let tileCache = new Map<string, TileResponse>();
let inflight = new Map<string, AbortController>();
let metaStream: number | null = null;
let metaExpanded = new Set<string>();
let drag: { x0: number; x1: number } | null = null;

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

function banner(message: string | null): void {
  const el = $("banner");
  el.textContent = message ?? "";
  el.classList.toggle("visible", message !== null);
  if (message) setTimeout(() => banner(null), 6000);
}

async function boot(): Promise<void> {
  try {
    recording = await api.getRecording();
  } catch (err) {
    banner(`cannot reach service: ${err}`);
    return;
  }
  state = initialState(recording.t_start, recording.t_end);
  state.selected = defaultSelection(recording);
  $("title-path").textContent = recording.path ?? "(unsaved recording)";
  if (recording.warnings.length) {
    banner(`${recording.warnings.length} parse warning(s); see console`);
    console.warn(recording.warnings);
  }
  renderSidebar();
  await refreshEvents();
  scheduleRedraw();
}

function renderSidebar(): void {
  if (!recording || !state) return;
  const list = $("stream-list");
  list.innerHTML = "";
  const lanePlans = buildLanes(recording, allLaneKeys());
  const colorByStream = new Map(lanePlans.map((l) => [l.streamId, l.color]));
  for (const stream of recording.streams) {
    const item = document.createElement("div");
    item.className = "stream-item";
    const head = document.createElement("div");
    head.className = "stream-head";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = colorByStream.get(stream.id) ?? "#888";
    head.appendChild(swatch);
    const name = document.createElement("button");
    name.className = "stream-name";
    name.textContent = `${stream.id} · ${stream.name || "(unnamed)"}`;
    name.title = "show metadata";
    name.onclick = () => showMeta(stream.id);
    head.appendChild(name);
    if (stream.deviates) {
      const badge = document.createElement("span");
      badge.className = "badge";
      badge.textContent = "⚠ rate";
      badge.title = `effective ${stream.effective_srate.toFixed(3)} Hz vs nominal ${stream.nominal_srate} Hz`;
      head.appendChild(badge);
    }
    item.appendChild(head);
    if (!stream.is_marker) {
      const channels = document.createElement("div");
      channels.className = "channels";
      for (let c = 0; c < stream.channel_count; c++) {
        const label = document.createElement("label");
        const box = document.createElement("input");
        box.type = "checkbox";
        box.checked = state.selected.has(`${stream.id}:${c}`);
        box.onchange = () => {
          state = toggleLane(state!, stream.id, c);
          scheduleRedraw();
        };
        label.appendChild(box);
        label.append(` ch ${c}`);
        channels.appendChild(label);
      }
      item.appendChild(channels);
    } else {
      const note = document.createElement("div");
      note.className = "marker-note";
      note.textContent = `marker stream · ${stream.sample_count} event(s)`;
      item.appendChild(note);
    }
    list.appendChild(item);
  }
}

function allLaneKeys(): Set<string> {
  const keys = new Set<string>();
  for (const s of recording?.streams ?? []) keys.add(`${s.id}:0`);
  return keys;
}

async function showMeta(streamId: number): Promise<void> {
  try {
    const tree = await api.getMeta(streamId);
    metaStream = streamId;
    metaExpanded = defaultExpansion(tree);
    renderMeta(tree);
  } catch (err) {
    banner(err instanceof ApiError ? `metadata: ${err.message}` : String(err));
  }
}

function renderMeta(treeRoot: import("./types.js").MetaNode): void {
  const panel = $("meta-panel");
  panel.innerHTML = "";
  const heading = document.createElement("h3");
  heading.textContent = `stream ${metaStream} metadata`;
  panel.appendChild(heading);
  for (const row of flattenTree(treeRoot, metaExpanded)) {
    const line = document.createElement("div");
    line.className = "tree-row";
    line.style.paddingLeft = `${row.depth * 14}px`;
    const toggle = document.createElement("span");
    toggle.className = "tree-toggle";
    toggle.textContent = row.hasChildren ? (row.expanded ? "▾" : "▸") : "·";
    if (row.hasChildren) {
      toggle.onclick = () => {
        metaExpanded = toggleNode(metaExpanded, row.path);
        renderMeta(treeRoot);
      };
    }
    line.appendChild(toggle);
    const text = document.createElement("span");
    text.textContent = row.text ? `${row.name}: ${row.text}` : row.name;
    line.appendChild(text);
    panel.appendChild(line);
  }
}

async function refreshEvents(): Promise<void> {
  try {
    events = await api.getEvents();
  } catch (err) {
    banner(`events: ${err}`);
    return;
  }
  $("dirty-dot").classList.toggle("visible", events.dirty);
  const list = $("event-list");
  list.innerHTML = "";
  for (const e of events.events) {
    const row = document.createElement("div");
    row.className = "event-row";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = eventColors.color(e.label);
    row.appendChild(swatch);
    const text = document.createElement("button");
    text.className = "event-jump";
    text.textContent = `${e.onset.toFixed(3)}s ${e.label}` + (e.duration ? ` (${e.duration.toFixed(3)}s)` : "");
    text.onclick = () => {
      if (!state) return;
      const width = state.t1 - state.t0;
      state = { ...state, t0: e.onset - width / 2, t1: e.onset + width / 2 };
      state = pan(state, 0); // clamp
      scheduleRedraw();
    };
    row.appendChild(text);
    if (e.origin === "user") {
      const del = document.createElement("button");
      del.className = "event-delete";
      del.textContent = "✕";
      del.onclick = async () => {
        try {
          await api.deleteEvent(e.id);
          await refreshEvents();
          scheduleRedraw();
        } catch (err) {
          banner(`delete: ${err}`);
        }
      };
      row.appendChild(del);
    }
    list.appendChild(row);
  }
}

let redrawQueued = false;
function scheduleRedraw(): void {
  if (redrawQueued) return;
  redrawQueued = true;
  requestAnimationFrame(() => {
    redrawQueued = false;
    void redraw();
  });
}

async function redraw(): Promise<void> {
  if (!recording || !state) return;
  lanes = buildLanes(recording, state.selected);
  const canvas = $("lanes") as unknown as HTMLCanvasElement;
  const width = Math.max(100, canvas.parentElement!.clientWidth - 2);
  const height = lanes.length * (LANE_HEIGHT + LANE_GAP) + AXIS_HEIGHT;
  canvas.width = width;
  canvas.height = Math.max(height, LANE_HEIGHT);
  const ctx = canvas.getContext("2d")!;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  await Promise.all(lanes.map((lane) => fetchLaneTiles(lane, width)));
  lanes.forEach((lane, i) => drawLane(ctx, lane, i, width));
  drawAxis(ctx, width, lanes.length * (LANE_HEIGHT + LANE_GAP));
  drawEvents(ctx, width, lanes.length * (LANE_HEIGHT + LANE_GAP));
  if (drag) drawDrag(ctx, canvas.height);
}

function tileKey(lane: LanePlan, width: number): string {
  return `${lane.key}|${state!.t0}|${state!.t1}|${width}`;
}

async function fetchLaneTiles(lane: LanePlan, width: number): Promise<void> {
  if (!state || lane.isMarker) return;
  const key = tileKey(lane, width);
  if (tileCache.has(key)) return;
  inflight.get(lane.key)?.abort(); // supersede the previous request
  const controller = new AbortController();
  inflight.set(lane.key, controller);
  try {
    const tiles = await api.getTiles(
      lane.streamId,
      lane.channel,
      state.t0,
      state.t1,
      width,
      controller.signal,
    );
    tileCache.set(key, tiles);
    if (tileCache.size > 64) {
      const oldest = tileCache.keys().next().value as string;
      tileCache.delete(oldest);
    }
  } catch (err) {
    if ((err as Error).name !== "AbortError") banner(`tiles: ${err}`);
  } finally {
    inflight.delete(lane.key);
  }
}

function drawLane(
  ctx: CanvasRenderingContext2D,
  lane: LanePlan,
  index: number,
  width: number,
): void {
  const top = index * (LANE_HEIGHT + LANE_GAP);
  ctx.save();
  ctx.translate(0, top);
  ctx.fillStyle = "#14171c";
  ctx.fillRect(0, 0, width, LANE_HEIGHT);
  ctx.strokeStyle = "#2a2f3a";
  ctx.strokeRect(0.5, 0.5, width - 1, LANE_HEIGHT - 1);

  const response = tileCache.get(tileKey(lane, width));
  if (response) {
    const segments = tilesToSegments(response.tiles, LANE_HEIGHT);
    const polyline = isPolyline(response.tiles);
    ctx.strokeStyle = lane.color;
    ctx.lineWidth = 1;
    ctx.beginPath();
    for (const seg of segments) {
      if (seg.empty) continue;
      ctx.moveTo(seg.x + 0.5, seg.yTop);
      ctx.lineTo(seg.x + 0.5, seg.yBottom + (polyline ? 1 : 0));
    }
    ctx.stroke();
  }

  ctx.fillStyle = lane.color;
  ctx.font = "12px system-ui, sans-serif";
  ctx.fillText(lane.label, 6, 14);
  if (lane.badge) {
    ctx.fillStyle = "#ffb02e";
    ctx.fillText("⚠ rate deviates", 6, LANE_HEIGHT - 8);
  }
  ctx.restore();
}

function drawAxis(ctx: CanvasRenderingContext2D, width: number, top: number): void {
  if (!state) return;
  ctx.fillStyle = "#9aa4b2";
  ctx.font = "11px system-ui, sans-serif";
  const ticks = 8;
  for (let i = 0; i <= ticks; i++) {
    const x = (i / ticks) * width;
    const t = state.t0 + (i / ticks) * (state.t1 - state.t0);
    ctx.fillText(t.toFixed(2) + "s", Math.min(x + 2, width - 48), top + 14);
    ctx.fillRect(x, top, 1, 4);
  }
}

function drawEvents(ctx: CanvasRenderingContext2D, width: number, height: number): void {
  if (!state) return;
  for (const e of events.events) {
    const end = e.onset + e.duration;
    if (end < state.t0 || e.onset > state.t1) continue;
    const x0 = timeToX(e.onset, width, state.t0, state.t1);
    const color = eventColors.color(e.label);
    if (e.duration > 0) {
      const x1 = timeToX(end, width, state.t0, state.t1);
      ctx.fillStyle = color + "33";
      ctx.fillRect(x0, 0, Math.max(1, x1 - x0), height);
    }
    ctx.fillStyle = color;
    ctx.fillRect(x0, 0, 1.5, height);
  }
}

function drawDrag(ctx: CanvasRenderingContext2D, height: number): void {
  if (!drag) return;
  const [a, b] = [Math.min(drag.x0, drag.x1), Math.max(drag.x0, drag.x1)];
  ctx.fillStyle = "rgba(255, 255, 255, 0.12)";
  ctx.fillRect(a, 0, Math.max(1, b - a), height);
}

function wireCanvas(): void {
  const canvas = $("lanes") as unknown as HTMLCanvasElement;
  canvas.addEventListener("mousedown", (ev) => {
    drag = { x0: ev.offsetX, x1: ev.offsetX };
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (!drag) return;
    drag.x1 = ev.offsetX;
    scheduleRedraw();
  });
  canvas.addEventListener("mouseup", (ev) => {
    if (!drag || !state) return;
    const { x0 } = drag;
    drag = null;
    const draft = dragToDraft(x0, ev.offsetX, canvas.width, state.t0, state.t1);
    openAnnotationDialog(draft);
    scheduleRedraw();
  });
  canvas.addEventListener("wheel", (ev) => {
    if (!state) return;
    ev.preventDefault();
    const factor = ev.deltaY > 0 ? 1.2 : 1 / 1.2;
    state = zoom(state, factor, ev.offsetX / canvas.width);
    scheduleRedraw();
  });
  window.addEventListener("keydown", (ev) => {
    if (!state || ev.target instanceof HTMLInputElement) return;
    if (ev.key === "ArrowLeft") state = pan(state, -0.2);
    else if (ev.key === "ArrowRight") state = pan(state, 0.2);
    else if (ev.key === "+" || ev.key === "=") state = zoom(state, 1 / 1.4);
    else if (ev.key === "-") state = zoom(state, 1.4);
    else return;
    scheduleRedraw();
  });
  window.addEventListener("resize", scheduleRedraw);
}

function openAnnotationDialog(draft: { onset: number; duration: number }): void {
  const dialog = $("annotate-dialog");
  dialog.classList.add("visible");
  $("annotate-info").textContent =
    `onset ${draft.onset.toFixed(3)}s` +
    (draft.duration ? `, duration ${draft.duration.toFixed(3)}s` : " (instant)");
  const input = $("annotate-label") as unknown as HTMLInputElement;
  const errorEl = $("annotate-error");
  errorEl.textContent = "";
  input.value = "";
  input.focus();

  $("annotate-ok").onclick = async () => {
    let body;
    try {
      body = buildEventBody(draft, input.value);
    } catch (err) {
      errorEl.textContent = String((err as Error).message);
      return; // invalid label: no request leaves the dialog open
    }
    try {
      await api.postEvent(body);
      dialog.classList.remove("visible");
      await refreshEvents();
      scheduleRedraw();
    } catch (err) {
      errorEl.textContent =
        err instanceof ApiError ? `${err.status}: ${err.message}` : String(err);
    }
  };
  $("annotate-cancel").onclick = () => dialog.classList.remove("visible");
}

function wireSaveButtons(): void {
  $("save-append").onclick = async () => {
    try {
      const result = await api.save({ mode: "append" });
      banner(`appended ${result.count} event(s) to ${result.path}`);
      await refreshEvents();
    } catch (err) {
      banner(`save: ${err}`);
    }
  };
  $("save-csv").onclick = async () => {
    const suggested = (recording?.path ?? "events") + ".csv";
    const path = window.prompt("write CSV to", suggested);
    if (!path) return;
    try {
      const result = await api.save({ mode: "csv", path });
      banner(`wrote ${result.count} event(s) to ${result.path}`);
      await refreshEvents();
    } catch (err) {
      banner(`save: ${err}`);
    }
  };
}

wireCanvas();
wireSaveButtons();
void boot();
