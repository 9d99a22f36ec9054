// Shapes of the service's JSON responses.

export interface StreamSummary {
  id: number;
  name: string;
  type: string;
  channel_format: string;
  channel_count: number;
  nominal_srate: number;
  effective_srate: number;
  relative_deviation: number;
  deviates: boolean;
  is_marker: boolean;
  sample_count: number;
  first_time: number | null;
  last_time: number | null;
}

export interface RecordingSummary {
  streams: StreamSummary[];
  t_start: number;
  t_end: number;
  duration: number;
  file_header: MetaNode;
  warnings: string[];
  path: string | null;
}

export interface Tile {
  bucket_index: number;
  t_start: number;
  t_end: number;
  min: number;
  max: number;
  scaled_min: number;
  scaled_max: number;
  sample_count: number;
}

export interface TileResponse {
  stream_id: number;
  channel: number;
  scale: { offset: number; gain: number };
  tiles: Tile[];
}

export interface MetaNode {
  name: string;
  text: string;
  children: MetaNode[];
}

export interface EventRecord {
  id: number;
  onset: number;
  duration: number;
  label: string;
  stream_id: number | null;
  origin: "decoded" | "user";
}

export interface EventList {
  events: EventRecord[];
  next_id: number;
  dirty: boolean;
}

export interface EventDraft {
  onset: number;
  duration: number;
  label: string;
}

export interface SaveRequest {
  mode: "append" | "csv";
  path?: string;
}
