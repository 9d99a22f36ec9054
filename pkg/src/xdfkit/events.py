"""Events: decoded marker-stream samples plus user annotations.

CSV schema (bit-exact contract): UTF-8, LF line endings, header
``onset,duration,label,stream_id``; onset/duration printed as the shortest
decimal that round-trips a double; labels quoted per RFC-4180 minimal quoting.

File write-back never rewrites existing bytes: user events are appended as a
fresh marker stream (header, one stamped string sample per event, a boundary,
a footer), so the original file is a byte prefix of the result.
"""

from __future__ import annotations

import csv
import io
import math
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .chunkio import ChunkTag, encode_chunk
from .errors import HeaderError, RowError, ValidationError
from .model import ChannelFormat, Recording, SampleBlock, StreamInfo
from .reader import parse_recording
from .timeline import SyncModel, apply_sync, build_sync_model, resolve_timestamps
from .writer import boundary_chunk, encode_samples_payload, stream_header_chunk
from .xmltree import XmlNode, serialize_xml

CSV_HEADER = "onset,duration,label,stream_id"

ANNOTATION_STREAM_NAME = "sigviewer-annotations"
DURATION_SUFFIX = "|duration="


@dataclass(frozen=True)
class Event:
    id: int
    onset: float
    duration: float
    label: str
    stream_id: int | None = None
    origin: str = "user"  # "decoded" | "user"


@dataclass
class EventSet:
    events: list[Event] = field(default_factory=list)
    next_id: int = 0

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def user_events(self) -> list[Event]:
        return [e for e in self.events if e.origin == "user"]

    def get(self, event_id: int) -> Event | None:
        for e in self.events:
            if e.id == event_id:
                return e
        return None


def _sorted(events: list[Event]) -> list[Event]:
    return sorted(events, key=lambda e: (e.onset, e.id))


def derive_events(rec: Recording, sync_models: dict[int, SyncModel] | None = None) -> EventSet:
    """Decode every marker stream (string format, irregular rate) into events."""
    events: list[Event] = []
    next_id = 0
    for stream in rec.marker_streams():
        sid = stream.info.stream_id
        series = resolve_timestamps(stream.blocks, stream.info)
        model = (sync_models or {}).get(sid) or build_sync_model(stream.offsets, sid)
        series = apply_sync(series, model)
        labels = stream.string_column(0)
        for t, label in zip(series.times, labels):
            events.append(Event(next_id, float(t), 0.0, label, sid, "decoded"))
            next_id += 1
    return EventSet(_sorted(events), next_id)


def add_event(
    events: EventSet, onset: float, duration: float, label: str
) -> tuple[EventSet, int]:
    """Add a user event; returns a new set and the fresh id."""
    if not label:
        raise ValidationError("event label must be nonempty")
    if duration < 0:
        raise ValidationError(f"event duration must be >= 0, got {duration}")
    if not math.isfinite(onset):
        raise ValidationError(f"event onset must be finite, got {onset}")
    event = Event(events.next_id, float(onset), float(duration), label, None, "user")
    return EventSet(_sorted(events.events + [event]), events.next_id + 1), event.id


def remove_event(events: EventSet, event_id: int) -> EventSet:
    """Remove a user event by id (decoded events are read-only)."""
    target = events.get(event_id)
    if target is None:
        raise KeyError(event_id)
    if target.origin != "user":
        raise ValidationError(f"event {event_id} is decoded from a stream; not removable")
    return EventSet([e for e in events.events if e.id != event_id], events.next_id)


def format_float(value: float) -> str:
    """Shortest decimal that round-trips double precision; '1.0' prints as '1'."""
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def _csv_field(value: str) -> str:
    # minimal quoting, but unlike csv.QUOTE_MINIMAL a bare CR also gets quoted
    if any(c in value for c in ',"\n\r'):
        return '"' + value.replace('"', '""') + '"'
    return value


def export_csv(events: EventSet) -> bytes:
    lines = [CSV_HEADER]
    for e in events:
        lines.append(
            ",".join(
                (
                    format_float(e.onset),
                    format_float(e.duration),
                    _csv_field(e.label),
                    "" if e.stream_id is None else str(e.stream_id),
                )
            )
        )
    lines.append("")
    return "\n".join(lines).encode("utf-8")


def import_csv(data: bytes) -> EventSet:
    """Inverse of export_csv; every imported event gets origin 'user'."""
    text = data.decode("utf-8")
    lines = io.StringIO(text, newline="")
    reader = csv.reader(lines, lineterminator="\n")
    try:
        header = next(reader)
    except StopIteration:
        raise HeaderError("empty CSV") from None
    if header != CSV_HEADER.split(","):
        raise HeaderError(f"expected header {CSV_HEADER!r}, got {','.join(header)!r}")
    events: list[Event] = []
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise RowError(line, f"expected 4 fields, got {len(row)}")
        onset_text, duration_text, label, stream_text = row
        try:
            onset = float(onset_text)
            duration = float(duration_text)
        except ValueError:
            raise RowError(line, "onset/duration must be numeric") from None
        if not math.isfinite(onset) or duration < 0:
            raise RowError(line, "onset must be finite and duration >= 0")
        if not label:
            raise RowError(line, "label must be nonempty")
        stream_id: int | None = None
        if stream_text:
            try:
                stream_id = int(stream_text)
            except ValueError:
                raise RowError(line, f"stream_id {stream_text!r} is not an integer") from None
        events.append(Event(len(events), onset, duration, label, stream_id, "user"))
    return EventSet(_sorted(events), len(events))


def marker_label(event: Event) -> str:
    """Marker encoding: instantaneous samples, so durations ride on the label."""
    if event.duration > 0:
        return f"{event.label}{DURATION_SUFFIX}{format_float(event.duration)}"
    return event.label


def annotation_suffix(rec: Recording, events: list[Event]) -> bytes:
    """Chunks that append the given events to a parsed recording as a new stream."""
    new_id = max(rec.streams, default=0) + 1
    ordered = _sorted(events)
    header = XmlNode(
        "info",
        "",
        [
            XmlNode("name", ANNOTATION_STREAM_NAME),
            XmlNode("type", "Markers"),
            XmlNode("channel_count", "1"),
            XmlNode("nominal_srate", "0"),
            XmlNode("channel_format", "string"),
        ],
    )
    values = [[marker_label(e)] for e in ordered]
    timestamps = np.array([e.onset for e in ordered], dtype=np.float64)
    stamped = np.ones(len(ordered), dtype=bool)
    block = SampleBlock(new_id, values, timestamps, stamped)
    info = StreamInfo(new_id, ANNOTATION_STREAM_NAME, "Markers", 1, 0.0,
                      ChannelFormat.STRING, header)
    footer = XmlNode(
        "info",
        "",
        [
            XmlNode("first_timestamp", format_float(timestamps[0]) if len(ordered) else "0"),
            XmlNode("last_timestamp", format_float(timestamps[-1]) if len(ordered) else "0"),
            XmlNode("sample_count", str(len(ordered))),
        ],
    )
    return (
        stream_header_chunk(new_id, header)
        + encode_chunk(
            ChunkTag.SAMPLES,
            struct.pack("<I", new_id) + encode_samples_payload(block, info),
        )
        + boundary_chunk()
        + encode_chunk(
            ChunkTag.STREAM_FOOTER,
            struct.pack("<I", new_id) + serialize_xml(footer).encode("utf-8"),
        )
    )


def append_events(original: bytes, events: EventSet) -> bytes:
    """Pure function: original file bytes -> new file bytes with user events appended.

    Validates by parsing first; with no user events the input comes back
    unchanged.
    """
    user = events.user_events()
    if not user:
        return original
    rec, _ = parse_recording(original)
    return original + annotation_suffix(rec, user)


def append_to_file(path, events: EventSet) -> bytes:
    """Write-back: append user events to the file at ``path``; returns new bytes.

    Parse errors propagate before anything is written, so a corrupt file is
    never touched.
    """
    with open(path, "rb") as f:
        original = f.read()
    new_bytes = append_events(original, events)
    if new_bytes is original:
        return original
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "wb") as f:
        f.write(new_bytes)
    os.replace(tmp, path)
    return new_bytes
