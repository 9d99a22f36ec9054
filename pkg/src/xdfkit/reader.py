"""Streaming parser for the chunked container.

The scanner is single-pass: it reads one chunk frame at a time, decodes the
payload, and hands the result to a sink. Peak memory is bounded by the largest
chunk plus its decoded form, so a discarding sink parses files of any size in
constant memory. ``parse_recording`` plugs in a sink that accumulates a full
in-memory Recording.

Malformed payloads inside an intact frame (bad flags, truncated sample data,
unknown stream ids) degrade to warnings and the chunk is skipped; broken
framing raises, or resynchronizes at the next boundary signature when
``recover=True``.
"""

from __future__ import annotations

import struct
from typing import BinaryIO

import numpy as np

from .chunkio import BOUNDARY_SIGNATURE, MAGIC, ByteSource, ChunkTag, read_varlen
from .errors import (
    FlagError,
    FormatError,
    MagicError,
    TruncatedError,
    WidthError,
    XdfError,
)
from .model import (
    ChannelFormat,
    ClockOffsetRecord,
    Recording,
    SampleBlock,
    StreamData,
    StreamFooter,
    StreamInfo,
)
from .xmltree import XmlNode, parse_xml

_TS_STRUCT = struct.Struct("<d")
_OFFSET_STRUCT = struct.Struct("<Idd")


def parse_samples_payload(
    payload: bytes | memoryview,
    info: StreamInfo,
    warnings: list[str] | None = None,
) -> SampleBlock:
    """Decode a Samples payload (the part after the 4-byte stream id)."""
    block, consumed = _decode_samples(bytes(payload), info, warnings)
    if warnings is not None and consumed != len(payload):
        warnings.append(
            f"stream {info.stream_id}: samples chunk has "
            f"{len(payload) - consumed} trailing bytes"
        )
    return block


def _decode_samples(
    payload: bytes, info: StreamInfo, warnings: list[str] | None
) -> tuple[SampleBlock, int]:
    n_samples, pos = read_varlen(payload)
    fmt = info.channel_format
    if fmt is ChannelFormat.STRING:
        return _decode_string_samples(payload, pos, n_samples, info, warnings)
    return _decode_numeric_samples(payload, pos, n_samples, info)


def _decode_numeric_samples(
    payload: bytes, pos: int, n_samples: int, info: StreamInfo
) -> tuple[SampleBlock, int]:
    n_ch = info.channel_count
    vsize = n_ch * info.channel_format.itemsize
    # cheapest possible row is unstamped; reject inflated counts before allocating
    if n_samples * (1 + vsize) > len(payload) - pos:
        raise TruncatedError(
            f"stream {info.stream_id}: {n_samples} samples cannot fit in "
            f"{len(payload) - pos} payload bytes"
        )
    values = np.empty((n_samples, n_ch), dtype=info.channel_format.dtype)
    timestamps = np.zeros(n_samples, dtype=np.float64)
    stamped = np.zeros(n_samples, dtype=bool)
    buf = np.frombuffer(payload, dtype=np.uint8)

    i = 0
    while i < n_samples:
        flag = payload[pos]
        if flag not in (0, 8):
            raise FlagError(
                f"stream {info.stream_id}: timestamp flag must be 0 or 8, got {flag}"
            )
        stride = 1 + flag + vsize
        fit = min(n_samples - i, (len(payload) - pos) // stride)
        if fit == 0:
            raise TruncatedError(f"stream {info.stream_id}: sample row truncated")
        # rows share the flag until the first byte that differs; decode that run
        run_flags = buf[pos:pos + fit * stride:stride]
        breaks = np.flatnonzero(run_flags != flag)
        n_run = int(breaks[0]) if breaks.size else fit
        rows = buf[pos:pos + n_run * stride].reshape(n_run, stride)
        if flag == 8:
            ts = np.ascontiguousarray(rows[:, 1:9]).view("<f8")
            timestamps[i:i + n_run] = ts.reshape(n_run)
            stamped[i:i + n_run] = True
        vals = np.ascontiguousarray(rows[:, 1 + flag:])
        values[i:i + n_run] = vals.view(info.channel_format.dtype).reshape(n_run, n_ch)
        i += n_run
        pos += n_run * stride

    block = SampleBlock(info.stream_id, values, timestamps, stamped)
    return block, pos


def _decode_string_samples(
    payload: bytes,
    pos: int,
    n_samples: int,
    info: StreamInfo,
    warnings: list[str] | None,
) -> tuple[SampleBlock, int]:
    n_ch = info.channel_count
    if n_samples * (1 + n_ch * 2) > len(payload) - pos:
        raise TruncatedError(
            f"stream {info.stream_id}: {n_samples} string samples cannot fit in "
            f"{len(payload) - pos} payload bytes"
        )
    values: list[list[str]] = []
    timestamps = np.zeros(n_samples, dtype=np.float64)
    stamped = np.zeros(n_samples, dtype=bool)
    bad_utf8 = 0
    for i in range(n_samples):
        if pos >= len(payload):
            raise TruncatedError(f"stream {info.stream_id}: sample row truncated")
        flag = payload[pos]
        pos += 1
        if flag == 8:
            if pos + 8 > len(payload):
                raise TruncatedError(f"stream {info.stream_id}: timestamp truncated")
            timestamps[i] = _TS_STRUCT.unpack_from(payload, pos)[0]
            stamped[i] = True
            pos += 8
        elif flag != 0:
            raise FlagError(
                f"stream {info.stream_id}: timestamp flag must be 0 or 8, got {flag}"
            )
        row: list[str] = []
        for _ in range(n_ch):
            length, consumed = read_varlen(payload, pos)
            pos += consumed
            if pos + length > len(payload):
                raise TruncatedError(f"stream {info.stream_id}: string value truncated")
            raw = payload[pos:pos + length]
            pos += length
            try:
                row.append(raw.decode("utf-8"))
            except UnicodeDecodeError:
                bad_utf8 += 1
                row.append(raw.decode("utf-8", errors="replace"))
        values.append(row)
    if bad_utf8 and warnings is not None:
        warnings.append(
            f"stream {info.stream_id}: replaced invalid UTF-8 in {bad_utf8} string values"
        )
    return SampleBlock(info.stream_id, values, timestamps, stamped), pos


class ParseSink:
    """Receives decoded chunks; the default implementation discards them."""

    def on_file_header(self, tree: XmlNode) -> None:
        pass

    def on_stream_header(self, info: StreamInfo) -> None:
        pass

    def on_samples(self, block: SampleBlock) -> None:
        pass

    def on_clock_offset(self, record: ClockOffsetRecord) -> None:
        pass

    def on_boundary(self, offset: int) -> None:
        pass

    def on_stream_footer(self, stream_id: int, footer: StreamFooter) -> None:
        pass


DiscardSink = ParseSink


class RecordingBuilder(ParseSink):
    def __init__(self) -> None:
        self.file_header: XmlNode | None = None
        self.streams: dict[int, StreamData] = {}
        self.boundaries: list[int] = []

    def on_file_header(self, tree: XmlNode) -> None:
        if self.file_header is None:
            self.file_header = tree

    def on_stream_header(self, info: StreamInfo) -> None:
        self.streams[info.stream_id] = StreamData(info)

    def on_samples(self, block: SampleBlock) -> None:
        self.streams[block.stream_id].blocks.append(block)

    def on_clock_offset(self, record: ClockOffsetRecord) -> None:
        self.streams[record.stream_id].offsets.append(record)

    def on_boundary(self, offset: int) -> None:
        self.boundaries.append(offset)

    def on_stream_footer(self, stream_id: int, footer: StreamFooter) -> None:
        self.streams[stream_id].info.footer = footer

    def build(self, source_length: int, warnings: list[str]) -> Recording:
        if self.file_header is None:
            self.file_header = XmlNode("info")
        for stream in self.streams.values():
            # loader contract: offsets sorted by collection time
            stream.offsets.sort(key=lambda r: r.collection_time)
            _check_footer(stream, warnings)
        return Recording(
            file_header=self.file_header,
            streams=self.streams,
            boundary_offsets=self.boundaries,
            source_length=source_length,
        )


def _check_footer(stream: StreamData, warnings: list[str]) -> None:
    footer = stream.info.footer
    if footer is None:
        return
    sid = stream.info.stream_id
    if (
        footer.first_timestamp is not None
        and footer.last_timestamp is not None
        and footer.first_timestamp > footer.last_timestamp
    ):
        warnings.append(f"stream {sid}: footer first_timestamp > last_timestamp")
    if footer.sample_count is not None and footer.sample_count != stream.sample_count:
        warnings.append(
            f"stream {sid}: footer sample_count {footer.sample_count} "
            f"!= decoded {stream.sample_count}"
        )


def parse_stream(
    source: bytes | BinaryIO | ByteSource,
    sink: ParseSink,
    *,
    recover: bool = False,
) -> tuple[int, list[str]]:
    """Scan all chunks, feeding the sink. Returns (source length, warnings)."""
    src = source if isinstance(source, ByteSource) else ByteSource(source)
    warnings: list[str] = []
    if src.read(4) != MAGIC:
        raise MagicError("not an XDF file: missing 'XDF:' magic")

    registry: dict[int, StreamInfo] = {}
    seen_file_header = False
    unknown_ids: set[int] = set()

    while not src.at_eof():
        chunk_start = src.tell()
        try:
            length = src.read_varlen("chunk length")
            if length < 2:
                raise TruncatedError(f"chunk at byte {chunk_start}: length {length} < 2")
            tag = struct.unpack("<H", src.read_exact(2, "chunk tag"))[0]
            payload = src.read_exact(length - 2, f"chunk payload (tag {tag})")
        except (TruncatedError, WidthError) as exc:
            if not recover:
                raise
            warnings.append(f"corrupt chunk at byte {chunk_start}: {exc}")
            if src.scan_past(BOUNDARY_SIGNATURE):
                warnings.append(f"resynchronized at byte {src.tell()}")
                continue
            warnings.append("no boundary signature ahead; stopping early")
            break

        if tag == ChunkTag.FILE_HEADER:
            tree = _parse_xml_payload(payload, chunk_start)
            if seen_file_header:
                warnings.append(f"duplicate FileHeader at byte {chunk_start}; keeping first")
            else:
                seen_file_header = True
                sink.on_file_header(tree)
        elif tag == ChunkTag.STREAM_HEADER:
            _handle_stream_header(payload, chunk_start, registry, sink, warnings)
        elif tag == ChunkTag.SAMPLES:
            _handle_samples(payload, chunk_start, registry, unknown_ids, sink, warnings)
        elif tag == ChunkTag.CLOCK_OFFSET:
            _handle_clock_offset(payload, chunk_start, registry, unknown_ids, sink, warnings)
        elif tag == ChunkTag.BOUNDARY:
            if payload != BOUNDARY_SIGNATURE:
                warnings.append(f"boundary at byte {chunk_start} has an unexpected payload")
            sink.on_boundary(chunk_start)
        elif tag == ChunkTag.STREAM_FOOTER:
            _handle_stream_footer(payload, chunk_start, registry, sink, warnings)
        else:
            warnings.append(f"unknown chunk tag {tag} at byte {chunk_start}; skipped")

    if not seen_file_header:
        warnings.append("no FileHeader chunk; using an empty header")
    return src.tell(), warnings


def _parse_xml_payload(payload: bytes, chunk_start: int) -> XmlNode:
    try:
        return parse_xml(payload)
    except FormatError as exc:
        raise FormatError(f"chunk at byte {chunk_start}: {exc}") from exc


def _handle_stream_header(
    payload: bytes,
    chunk_start: int,
    registry: dict[int, StreamInfo],
    sink: ParseSink,
    warnings: list[str],
) -> None:
    if len(payload) < 4:
        warnings.append(f"stream header at byte {chunk_start} shorter than a stream id")
        return
    stream_id = struct.unpack_from("<I", payload)[0]
    tree = _parse_xml_payload(payload[4:], chunk_start)
    if stream_id == 0:
        warnings.append("stream id 0 is reserved; stream skipped")
        return
    if stream_id in registry:
        warnings.append(f"duplicate stream header for id {stream_id}; keeping first")
        return
    info = _info_from_tree(stream_id, tree, warnings)
    if info is None:
        return
    registry[stream_id] = info
    sink.on_stream_header(info)


def _info_from_tree(
    stream_id: int, tree: XmlNode, warnings: list[str]
) -> StreamInfo | None:
    fmt_text = tree.text_of("channel_format")
    try:
        fmt = ChannelFormat(fmt_text)
    except ValueError:
        warnings.append(
            f"stream {stream_id}: unknown channel_format {fmt_text!r}; stream skipped"
        )
        return None
    try:
        channels = int(tree.text_of("channel_count", "1"))
        srate = float(tree.text_of("nominal_srate", "0"))
    except ValueError:
        warnings.append(f"stream {stream_id}: non-numeric channel_count/nominal_srate; stream skipped")
        return None
    if channels < 1:
        warnings.append(f"stream {stream_id}: channel_count {channels} < 1; stream skipped")
        return None
    if not (srate >= 0):
        warnings.append(f"stream {stream_id}: nominal_srate {srate} < 0; stream skipped")
        return None
    return StreamInfo(
        stream_id=stream_id,
        name=tree.text_of("name"),
        content_type=tree.text_of("type"),
        channel_count=channels,
        nominal_srate=srate,
        channel_format=fmt,
        header_tree=tree,
    )


def _handle_samples(
    payload: bytes,
    chunk_start: int,
    registry: dict[int, StreamInfo],
    unknown_ids: set[int],
    sink: ParseSink,
    warnings: list[str],
) -> None:
    if len(payload) < 4:
        warnings.append(f"samples chunk at byte {chunk_start} shorter than a stream id")
        return
    stream_id = struct.unpack_from("<I", payload)[0]
    info = registry.get(stream_id)
    if info is None:
        if stream_id not in unknown_ids:
            unknown_ids.add(stream_id)
            warnings.append(f"samples for undeclared stream {stream_id}; skipped")
        return
    try:
        block = parse_samples_payload(memoryview(payload)[4:], info, warnings)
    except XdfError as exc:
        warnings.append(f"undecodable samples chunk at byte {chunk_start}: {exc}")
        return
    sink.on_samples(block)


def _handle_clock_offset(
    payload: bytes,
    chunk_start: int,
    registry: dict[int, StreamInfo],
    unknown_ids: set[int],
    sink: ParseSink,
    warnings: list[str],
) -> None:
    if len(payload) < _OFFSET_STRUCT.size:
        warnings.append(f"clock offset chunk at byte {chunk_start} too short; skipped")
        return
    stream_id, collection_time, offset = _OFFSET_STRUCT.unpack_from(payload)
    if len(payload) > _OFFSET_STRUCT.size:
        warnings.append(f"clock offset chunk at byte {chunk_start} has trailing bytes")
    if stream_id not in registry:
        if stream_id not in unknown_ids:
            unknown_ids.add(stream_id)
            warnings.append(f"clock offset for undeclared stream {stream_id}; skipped")
        return
    if not (np.isfinite(collection_time) and np.isfinite(offset)):
        warnings.append(f"non-finite clock offset at byte {chunk_start}; skipped")
        return
    sink.on_clock_offset(ClockOffsetRecord(stream_id, collection_time, offset))


def _handle_stream_footer(
    payload: bytes,
    chunk_start: int,
    registry: dict[int, StreamInfo],
    sink: ParseSink,
    warnings: list[str],
) -> None:
    if len(payload) < 4:
        warnings.append(f"stream footer at byte {chunk_start} shorter than a stream id")
        return
    stream_id = struct.unpack_from("<I", payload)[0]
    if stream_id not in registry:
        warnings.append(f"footer for undeclared stream {stream_id}; skipped")
        return
    try:
        tree = parse_xml(payload[4:])
    except FormatError as exc:
        warnings.append(f"unparseable footer for stream {stream_id}: {exc}")
        return
    sink.on_stream_footer(stream_id, _footer_from_tree(tree, stream_id, warnings))


def _footer_from_tree(
    tree: XmlNode, stream_id: int, warnings: list[str]
) -> StreamFooter:
    def _float(name: str) -> float | None:
        text = tree.text_of(name)
        if not text:
            return None
        try:
            return float(text)
        except ValueError:
            warnings.append(f"stream {stream_id}: footer {name} {text!r} not numeric")
            return None

    count: int | None = None
    count_text = tree.text_of("sample_count")
    if count_text:
        try:
            count = int(count_text)
        except ValueError:
            warnings.append(f"stream {stream_id}: footer sample_count {count_text!r} not numeric")
    return StreamFooter(
        first_timestamp=_float("first_timestamp"),
        last_timestamp=_float("last_timestamp"),
        sample_count=count,
        tree=tree,
    )


def parse_recording(
    source: bytes | BinaryIO, *, recover: bool = False
) -> tuple[Recording, list[str]]:
    """Parse a whole file into an in-memory Recording plus parse warnings."""
    builder = RecordingBuilder()
    source_length, warnings = parse_stream(source, builder, recover=recover)
    return builder.build(source_length, warnings), warnings


def load(path, *, recover: bool = False) -> tuple[Recording, list[str]]:
    with open(path, "rb") as f:
        return parse_recording(f, recover=recover)
