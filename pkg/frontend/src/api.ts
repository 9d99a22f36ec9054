import type {
  EventDraft,
  EventList,
  EventRecord,
  MetaNode,
  RecordingSummary,
  SaveRequest,
  TileResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // error body was not JSON; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  if (response.status === 204) return undefined as T;
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private base: string = "") {}

  getRecording(): Promise<RecordingSummary> {
    return fetch(`${this.base}/api/recording`).then((r) => asJson<RecordingSummary>(r));
  }

  getTiles(
    streamId: number,
    channel: number,
    t0: number,
    t1: number,
    buckets: number,
    signal?: AbortSignal,
  ): Promise<TileResponse> {
    const query = new URLSearchParams({
      channel: String(channel),
      t0: String(t0),
      t1: String(t1),
      buckets: String(buckets),
    });
    return fetch(`${this.base}/api/streams/${streamId}/tiles?${query}`, { signal }).then(
      (r) => asJson<TileResponse>(r),
    );
  }

  getMeta(streamId: number): Promise<MetaNode> {
    return fetch(`${this.base}/api/streams/${streamId}/meta`).then((r) => asJson<MetaNode>(r));
  }

  getEvents(): Promise<EventList> {
    return fetch(`${this.base}/api/events`).then((r) => asJson<EventList>(r));
  }

  postEvent(draft: EventDraft): Promise<EventRecord> {
    return fetch(`${this.base}/api/events`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(draft),
    }).then((r) => asJson<EventRecord>(r));
  }

  deleteEvent(id: number): Promise<void> {
    return fetch(`${this.base}/api/events/${id}`, { method: "DELETE" }).then((r) =>
      asJson<void>(r),
    );
  }

  save(request: SaveRequest): Promise<{ path: string; mode: string; count: number }> {
    return fetch(`${this.base}/api/save`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    }).then((r) => asJson<{ path: string; mode: string; count: number }>(r));
  }
}
