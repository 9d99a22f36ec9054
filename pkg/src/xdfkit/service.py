"""HTTP/JSON service the viewer talks to.

The loaded recording and everything derived from it (synced timestamp series,
rate reports, display scales) is immutable and shared across requests; only
the event set changes, behind a lock. Tile values are served both raw and
auto-scaled so the client never rescales or resamples signal data itself.
"""

from __future__ import annotations

import threading
import warnings as _warnings
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel

from .errors import ValidationError, XdfError, XdfWarning
from .events import (
    EventSet,
    add_event,
    append_to_file,
    derive_events,
    export_csv,
    remove_event,
)
from .model import Recording, StreamData
from .timeline import (
    RateReport,
    ScaleInfo,
    SyncModel,
    TimestampSeries,
    apply_sync,
    auto_scale,
    build_sync_model,
    effective_rate,
    envelope_tiles,
    resolve_timestamps,
)

DEFAULT_PORT = 8377
PORT_ENV_VAR = "XDFKIT_PORT"


@dataclass
class StreamView:
    data: StreamData
    series: TimestampSeries
    sync: SyncModel
    rate: RateReport
    channels: list[np.ndarray]
    scales: list[ScaleInfo]


class ServiceState:
    """Immutable recording plus the mutable, lock-guarded event set."""

    def __init__(self, recording: Recording, warnings: list[str], path: str | None = None):
        self.recording = recording
        self.warnings = list(warnings)
        self.path = path
        self.views: dict[int, StreamView] = {}
        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore", XdfWarning)
            for sid, data in recording.streams.items():
                self.views[sid] = _build_view(data)
        self._lock = threading.Lock()
        self._events = derive_events(recording, {v.data.info.stream_id: v.sync for v in self.views.values()})
        self._dirty = False

    # event set: exclusive write, shared read via snapshots

    @property
    def events(self) -> EventSet:
        with self._lock:
            return self._events

    @property
    def dirty(self) -> bool:
        with self._lock:
            return self._dirty

    def add(self, onset: float, duration: float, label: str):
        with self._lock:
            self._events, event_id = add_event(self._events, onset, duration, label)
            self._dirty = True
            return self._events.get(event_id)

    def remove(self, event_id: int) -> None:
        with self._lock:
            self._events = remove_event(self._events, event_id)

    def save(self, mode: str, path: str | None) -> dict:
        with self._lock:
            events = self._events
            if mode == "append":
                target = path or self.path
                if target is None:
                    raise ValueError("no path to append to")
                append_to_file(target, events)
                count = len(events.user_events())
            elif mode == "csv":
                if not path:
                    raise ValueError("csv mode needs a path")
                target = path
                with open(path, "wb") as f:
                    f.write(export_csv(events))
                count = len(events)
            else:
                raise ValueError(f"unknown save mode {mode!r}")
            self._dirty = False
            return {"path": str(target), "mode": mode, "count": count}

    # derived, immutable

    def time_range(self) -> tuple[float, float]:
        starts = [v.series.times[0] for v in self.views.values() if len(v.series)]
        ends = [v.series.times[-1] for v in self.views.values() if len(v.series)]
        if not starts:
            return 0.0, 0.0
        return float(min(starts)), float(max(ends))


def _build_view(data: StreamData) -> StreamView:
    series = resolve_timestamps(data.blocks, data.info)
    sync = build_sync_model(data.offsets, data.info.stream_id)
    series = apply_sync(series, sync)
    rate = effective_rate(series, data.info.nominal_srate)
    channels: list[np.ndarray] = []
    scales: list[ScaleInfo] = []
    if data.info.channel_format.is_numeric:
        for c in range(data.info.channel_count):
            column = data.column(c).astype(np.float64)
            channels.append(column)
            scales.append(auto_scale(column))
    return StreamView(data, series, sync, rate, channels, scales)


def load_state(path, *, recover: bool = False) -> ServiceState:
    from .reader import load

    recording, warnings = load(path, recover=recover)
    return ServiceState(recording, warnings, str(path))


class EventIn(BaseModel):
    onset: float
    duration: float = 0.0
    label: str


class SaveIn(BaseModel):
    mode: str
    path: str | None = None


def _event_json(e) -> dict:
    return {
        "id": e.id,
        "onset": e.onset,
        "duration": e.duration,
        "label": e.label,
        "stream_id": e.stream_id,
        "origin": e.origin,
    }


def _stream_json(view: StreamView) -> dict:
    info = view.data.info
    series = view.series
    return {
        "id": info.stream_id,
        "name": info.name,
        "type": info.content_type,
        "channel_format": info.channel_format.value,
        "channel_count": info.channel_count,
        "nominal_srate": info.nominal_srate,
        "effective_srate": view.rate.effective_srate,
        "relative_deviation": view.rate.relative_deviation,
        "deviates": view.rate.deviates,
        "is_marker": info.is_marker,
        "sample_count": view.data.sample_count,
        "first_time": float(series.times[0]) if len(series) else None,
        "last_time": float(series.times[-1]) if len(series) else None,
    }


def build_app(state: ServiceState, ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="xdfkit service")

    @app.get("/api/recording")
    def get_recording():
        t0, t1 = state.time_range()
        return {
            "streams": [_stream_json(state.views[sid]) for sid in sorted(state.views)],
            "t_start": t0,
            "t_end": t1,
            "duration": t1 - t0,
            "file_header": state.recording.file_header.to_dict(),
            "warnings": state.warnings,
            "path": state.path,
        }

    @app.get("/api/streams/{stream_id}/tiles")
    def get_tiles(stream_id: int, channel: int = 0, t0: float = 0.0,
                  t1: float = 1.0, buckets: int = 256):
        view = state.views.get(stream_id)
        if view is None:
            raise HTTPException(404, f"unknown stream {stream_id}")
        if not view.data.info.channel_format.is_numeric:
            raise HTTPException(400, "marker streams have no sample tiles")
        if not 0 <= channel < view.data.info.channel_count:
            raise HTTPException(400, f"channel {channel} out of range")
        if buckets < 1 or buckets > 100_000:
            raise HTTPException(400, "buckets must be in 1..100000")
        try:
            tiles = envelope_tiles(view.channels[channel], view.series, t0, t1, buckets)
        except XdfError as exc:
            raise HTTPException(400, str(exc)) from exc
        scale = view.scales[channel]
        return {
            "stream_id": stream_id,
            "channel": channel,
            "scale": {"offset": scale.offset, "gain": scale.gain},
            "tiles": [
                {
                    "bucket_index": t.bucket_index,
                    "t_start": t.t_start,
                    "t_end": t.t_end,
                    "min": t.min_value,
                    "max": t.max_value,
                    "scaled_min": (t.min_value - scale.offset) * scale.gain,
                    "scaled_max": (t.max_value - scale.offset) * scale.gain,
                    "sample_count": t.sample_count,
                }
                for t in tiles
            ],
        }

    @app.get("/api/streams/{stream_id}/meta")
    def get_meta(stream_id: int):
        view = state.views.get(stream_id)
        if view is None:
            raise HTTPException(404, f"unknown stream {stream_id}")
        return view.data.info.header_tree.to_dict()

    @app.get("/api/events")
    def get_events():
        events = state.events
        return {
            "events": [_event_json(e) for e in events],
            "next_id": events.next_id,
            "dirty": state.dirty,
        }

    @app.post("/api/events", status_code=201)
    def post_event(body: EventIn):
        try:
            event = state.add(body.onset, body.duration, body.label)
        except ValidationError as exc:
            raise HTTPException(422, str(exc)) from exc
        return _event_json(event)

    @app.delete("/api/events/{event_id}", status_code=204)
    def delete_event(event_id: int):
        try:
            state.remove(event_id)
        except KeyError:
            raise HTTPException(404, f"unknown event {event_id}") from None
        except ValidationError as exc:
            raise HTTPException(403, str(exc)) from exc
        return Response(status_code=204)

    @app.post("/api/save")
    def save(body: SaveIn):
        try:
            return state.save(body.mode, body.path)
        except ValueError as exc:
            raise HTTPException(422, str(exc)) from exc
        except OSError as exc:
            raise HTTPException(400, f"cannot write: {exc}") from exc

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(state: ServiceState, port: int, ui_dir: str | None = None) -> None:
    import uvicorn

    uvicorn.run(build_app(state, ui_dir), host="127.0.0.1", port=port, log_level="warning")
