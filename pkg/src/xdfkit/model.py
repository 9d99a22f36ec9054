"""In-memory model of a loaded recording.

A Recording is immutable after load: annotation write-back and resampling
produce new files or new recordings, never mutate a loaded one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .xmltree import XmlNode


class ChannelFormat(str, enum.Enum):
    INT8 = "int8"
    INT16 = "int16"
    INT32 = "int32"
    INT64 = "int64"
    FLOAT32 = "float32"
    DOUBLE64 = "double64"
    STRING = "string"

    @property
    def dtype(self) -> np.dtype:
        return _DTYPES[self]

    @property
    def itemsize(self) -> int:
        return 0 if self is ChannelFormat.STRING else _DTYPES[self].itemsize

    @property
    def is_numeric(self) -> bool:
        return self is not ChannelFormat.STRING


_DTYPES = {
    ChannelFormat.INT8: np.dtype("<i1"),
    ChannelFormat.INT16: np.dtype("<i2"),
    ChannelFormat.INT32: np.dtype("<i4"),
    ChannelFormat.INT64: np.dtype("<i8"),
    ChannelFormat.FLOAT32: np.dtype("<f4"),
    ChannelFormat.DOUBLE64: np.dtype("<f8"),
}


@dataclass
class StreamFooter:
    first_timestamp: float | None
    last_timestamp: float | None
    sample_count: int | None
    tree: XmlNode


@dataclass
class StreamInfo:
    stream_id: int
    name: str
    content_type: str
    channel_count: int
    nominal_srate: float
    channel_format: ChannelFormat
    header_tree: XmlNode
    footer: StreamFooter | None = None

    @property
    def is_marker(self) -> bool:
        """String-valued irregular streams are treated as event markers."""
        return self.channel_format is ChannelFormat.STRING and self.nominal_srate == 0


@dataclass
class SampleBlock:
    """One decoded Samples chunk.

    ``values`` is an (n, channel_count) array for numeric formats or a list of
    per-sample string lists. ``timestamps[i]`` is only meaningful where
    ``stamped[i]`` is True; the stamped flags are preserved so serialization
    reproduces the original per-sample flag bytes.
    """

    stream_id: int
    values: np.ndarray | list[list[str]]
    timestamps: np.ndarray
    stamped: np.ndarray

    def __len__(self) -> int:
        return len(self.stamped)

    def row(self, i: int) -> tuple[float | None, object]:
        ts = float(self.timestamps[i]) if self.stamped[i] else None
        return ts, self.values[i]


@dataclass
class ClockOffsetRecord:
    stream_id: int
    collection_time: float
    offset: float


@dataclass
class StreamData:
    info: StreamInfo
    blocks: list[SampleBlock] = field(default_factory=list)
    offsets: list[ClockOffsetRecord] = field(default_factory=list)

    @property
    def sample_count(self) -> int:
        return sum(len(b) for b in self.blocks)

    def column(self, channel: int) -> np.ndarray:
        """All values of one numeric channel, concatenated across blocks."""
        if not self.info.channel_format.is_numeric:
            raise TypeError(f"stream {self.info.stream_id} is not numeric")
        if not self.blocks:
            return np.empty(0, dtype=self.info.channel_format.dtype)
        return np.concatenate([np.asarray(b.values)[:, channel] for b in self.blocks])

    def string_column(self, channel: int = 0) -> list[str]:
        out: list[str] = []
        for b in self.blocks:
            out.extend(row[channel] for row in b.values)
        return out


@dataclass
class Recording:
    file_header: XmlNode
    streams: dict[int, StreamData]
    boundary_offsets: list[int] = field(default_factory=list)
    source_length: int = 0

    def stream(self, stream_id: int) -> StreamData:
        return self.streams[stream_id]

    def marker_streams(self) -> list[StreamData]:
        return [s for s in self.streams.values() if s.info.is_marker]

    def numeric_streams(self) -> list[StreamData]:
        return [s for s in self.streams.values() if s.info.channel_format.is_numeric]
