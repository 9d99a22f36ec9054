"""Chunk emission: the exact inverse of the reader.

Length fields use the smallest sufficient varlen width, sample chunks keep
their original partitioning and per-sample timestamp flags, so a decoded
recording re-serializes to a semantically equal file (byte-identical when the
source used the same width and layout choices).
"""

from __future__ import annotations

import struct
from typing import Iterator

import numpy as np

from .chunkio import BOUNDARY_SIGNATURE, MAGIC, ChunkTag, encode_chunk, write_varlen
from .model import ChannelFormat, Recording, SampleBlock, StreamInfo
from .xmltree import XmlNode, serialize_xml

_OFFSET_STRUCT = struct.Struct("<Idd")


def encode_samples_payload(block: SampleBlock, info: StreamInfo) -> bytes:
    """Encode rows after the stream id: varlen count, then per-sample data."""
    n = len(block)
    out = bytearray(write_varlen(n))
    if info.channel_format is ChannelFormat.STRING:
        _encode_string_rows(block, info, out)
    elif n:
        _encode_numeric_rows(block, info, out)
    return bytes(out)


def _encode_numeric_rows(block: SampleBlock, info: StreamInfo, out: bytearray) -> None:
    values = np.asarray(block.values, dtype=info.channel_format.dtype)
    n = len(block)
    vsize = info.channel_count * info.channel_format.itemsize
    stamped = np.asarray(block.stamped, dtype=bool)
    edges = np.flatnonzero(np.diff(stamped)) + 1
    starts = np.concatenate(([0], edges))
    stops = np.concatenate((edges, [n]))
    for a, b in zip(starts, stops):
        flag = 8 if stamped[a] else 0
        stride = 1 + flag + vsize
        rows = np.empty(((b - a), stride), dtype=np.uint8)
        rows[:, 0] = flag
        if flag:
            ts = np.ascontiguousarray(block.timestamps[a:b], dtype="<f8")
            rows[:, 1:9] = ts.view(np.uint8).reshape(b - a, 8)
        rows[:, 1 + flag:] = (
            np.ascontiguousarray(values[a:b]).view(np.uint8).reshape(b - a, vsize)
        )
        out += rows.tobytes()


def _encode_string_rows(block: SampleBlock, info: StreamInfo, out: bytearray) -> None:
    for i in range(len(block)):
        if block.stamped[i]:
            out += b"\x08" + struct.pack("<d", float(block.timestamps[i]))
        else:
            out += b"\x00"
        for value in block.values[i]:
            raw = value.encode("utf-8")
            out += write_varlen(len(raw))
            out += raw


def stream_header_chunk(stream_id: int, tree: XmlNode) -> bytes:
    payload = struct.pack("<I", stream_id) + serialize_xml(tree).encode("utf-8")
    return encode_chunk(ChunkTag.STREAM_HEADER, payload)


def samples_chunk(block: SampleBlock, info: StreamInfo) -> bytes:
    payload = struct.pack("<I", block.stream_id) + encode_samples_payload(block, info)
    return encode_chunk(ChunkTag.SAMPLES, payload)


def clock_offset_chunk(stream_id: int, collection_time: float, offset: float) -> bytes:
    return encode_chunk(
        ChunkTag.CLOCK_OFFSET, _OFFSET_STRUCT.pack(stream_id, collection_time, offset)
    )


def boundary_chunk() -> bytes:
    return encode_chunk(ChunkTag.BOUNDARY, BOUNDARY_SIGNATURE)


def file_header_chunk(tree: XmlNode) -> bytes:
    return encode_chunk(ChunkTag.FILE_HEADER, serialize_xml(tree).encode("utf-8"))


def stream_footer_chunk(stream_id: int, tree: XmlNode) -> bytes:
    payload = struct.pack("<I", stream_id) + serialize_xml(tree).encode("utf-8")
    return encode_chunk(ChunkTag.STREAM_FOOTER, payload)


def iter_serialized(rec: Recording) -> Iterator[bytes]:
    """Yield the file piecewise: magic, headers, samples, offsets, boundaries, footers."""
    yield MAGIC
    yield file_header_chunk(rec.file_header)
    ids = sorted(rec.streams)
    for sid in ids:
        yield stream_header_chunk(sid, rec.streams[sid].info.header_tree)
    for sid in ids:
        stream = rec.streams[sid]
        for block in stream.blocks:
            yield samples_chunk(block, stream.info)
    for sid in ids:
        for record in rec.streams[sid].offsets:
            yield clock_offset_chunk(sid, record.collection_time, record.offset)
    for _ in rec.boundary_offsets:
        yield boundary_chunk()
    for sid in ids:
        footer = rec.streams[sid].info.footer
        if footer is not None:
            yield stream_footer_chunk(sid, footer.tree)


def serialize_recording(rec: Recording) -> bytes:
    return b"".join(iter_serialized(rec))


def write_recording(rec: Recording, path) -> int:
    """Write to disk without building the whole file in memory; returns byte count."""
    total = 0
    with open(path, "wb") as f:
        for part in iter_serialized(rec):
            total += f.write(part)
    return total
