// One lane per selected (stream, channel): its color, its rate badge, and
// the tile request that fills it.

import { streamColor } from "./palette.js";
import type { RecordingSummary, StreamSummary } from "./types.js";
import { laneKey, parseLaneKey } from "./viewstate.js";

export interface LanePlan {
  key: string;
  streamId: number;
  channel: number;
  label: string;
  color: string;
  badge: boolean; // effective rate deviates from nominal
  isMarker: boolean;
}

export function buildLanes(recording: RecordingSummary, selected: Set<string>): LanePlan[] {
  const byId = new Map<number, StreamSummary>(recording.streams.map((s) => [s.id, s]));
  const streamOrder = recording.streams.map((s) => s.id);
  const lanes: LanePlan[] = [];
  for (const key of [...selected].sort(compareLaneKeys)) {
    const { streamId, channel } = parseLaneKey(key);
    const stream = byId.get(streamId);
    if (!stream || channel >= stream.channel_count) continue;
    const colorIndex = streamOrder.indexOf(streamId);
    lanes.push({
      key,
      streamId,
      channel,
      label: stream.channel_count > 1 ? `${stream.name} [${channel}]` : stream.name,
      color: streamColor(colorIndex),
      badge: stream.deviates,
      isMarker: stream.is_marker,
    });
  }
  return lanes;
}

function compareLaneKeys(a: string, b: string): number {
  const ka = parseLaneKey(a);
  const kb = parseLaneKey(b);
  return ka.streamId - kb.streamId || ka.channel - kb.channel;
}

/** Default selection: first channel of every non-marker stream. */
export function defaultSelection(recording: RecordingSummary): Set<string> {
  const selected = new Set<string>();
  for (const stream of recording.streams) {
    if (!stream.is_marker && stream.sample_count > 0) {
      selected.add(laneKey(stream.id, 0));
    }
  }
  return selected;
}
