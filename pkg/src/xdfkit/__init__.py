"""Toolkit for XDF multimodal biosignal recordings.

Parse and write the chunked container, synchronize per-stream clocks, audit
effective sampling rates, resample to a common rate, annotate events, generate
and verify the synthetic phase-prediction experiment, and serve a viewer API.
"""

from .chunkio import BOUNDARY_SIGNATURE, MAGIC, ChunkTag, read_varlen, write_varlen
from .errors import XdfError, XdfWarning
from .model import (
    ChannelFormat,
    ClockOffsetRecord,
    Recording,
    SampleBlock,
    StreamData,
    StreamFooter,
    StreamInfo,
)
from .reader import (
    DiscardSink,
    ParseSink,
    load,
    parse_recording,
    parse_samples_payload,
    parse_stream,
)
from .writer import serialize_recording, write_recording
from .xmltree import XmlNode, parse_xml, serialize_xml

__version__ = "0.1.0"

__all__ = [
    "BOUNDARY_SIGNATURE",
    "MAGIC",
    "ChannelFormat",
    "ChunkTag",
    "ClockOffsetRecord",
    "DiscardSink",
    "ParseSink",
    "Recording",
    "SampleBlock",
    "StreamData",
    "StreamFooter",
    "StreamInfo",
    "XdfError",
    "XdfWarning",
    "XmlNode",
    "load",
    "parse_recording",
    "parse_samples_payload",
    "parse_stream",
    "parse_xml",
    "read_varlen",
    "serialize_recording",
    "serialize_xml",
    "write_recording",
    "write_varlen",
    "__version__",
]
