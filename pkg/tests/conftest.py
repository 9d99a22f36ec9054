"""Hand-built byte fixtures shared across test modules.

The fixtures are assembled from struct literals on purpose: they must not
depend on the writer under test. reference_decoder.ref_decode is the oracle
that pins their expected decoded structure.
"""

import struct

import pytest


def chunk(tag: int, payload: bytes) -> bytes:
    """Frame a chunk the way the fixtures want it: smallest varlen width."""
    length = len(payload) + 2
    if length < 256:
        head = bytes([1, length])
    else:
        head = b"\x04" + struct.pack("<I", length)
    return head + struct.pack("<H", tag) + payload


MINIMAL_HEADER_XML = b'<?xml version="1.0"?><info><version>1.0</version></info>'

THREE_ROW_HEADER_XML = (
    b"<info><name>EEG</name><type>EEG</type><channel_count>2</channel_count>"
    b"<nominal_srate>100</nominal_srate><channel_format>float32</channel_format></info>"
)


def build_minimal_file() -> bytes:
    return b"XDF:" + chunk(1, MINIMAL_HEADER_XML)


def build_three_row_file() -> bytes:
    """One float32 stream, 2 channels, 3 rows; only the first row is stamped."""
    rows = (
        # NumSamples = 3
        bytes([1, 3])
        # row 0: flag 8, t = 0.0, values (1.5, -2.0)
        + bytes([8]) + struct.pack("<d", 0.0) + struct.pack("<ff", 1.5, -2.0)
        # row 1: flag 0, values (3.25, 4.0)
        + bytes([0]) + struct.pack("<ff", 3.25, 4.0)
        # row 2: flag 0, values (-0.5, 0.0)
        + bytes([0]) + struct.pack("<ff", -0.5, 0.0)
    )
    return (
        b"XDF:"
        + chunk(1, b"<info><version>1.0</version></info>")
        + chunk(2, struct.pack("<I", 1) + THREE_ROW_HEADER_XML)
        + chunk(3, struct.pack("<I", 1) + rows)
    )


MARKER_HEADER_XML = (
    b"<info><name>markers</name><type>Markers</type><channel_count>1</channel_count>"
    b"<nominal_srate>0</nominal_srate><channel_format>string</channel_format></info>"
)


def build_marker_file() -> bytes:
    """3-row fixture plus a marker stream with one stamped string sample."""
    marker_rows = (
        bytes([1, 1])
        + bytes([8]) + struct.pack("<d", 1.5)
        + bytes([1, 7]) + b"trigger"
    )
    boundary = bytes(
        [0x43, 0xA5, 0x46, 0xDC, 0xCB, 0xF5, 0x41, 0x0F,
         0xB3, 0x0E, 0xD5, 0x46, 0x73, 0x83, 0xCB, 0xE4]
    )
    footer_xml = (
        b"<info><first_timestamp>1.5</first_timestamp>"
        b"<last_timestamp>1.5</last_timestamp>"
        b"<sample_count>1</sample_count></info>"
    )
    return (
        build_three_row_file()
        + chunk(2, struct.pack("<I", 2) + MARKER_HEADER_XML)
        + chunk(3, struct.pack("<I", 2) + marker_rows)
        + chunk(4, struct.pack("<Idd", 2, 0.0, 0.25))
        + chunk(5, boundary)
        + chunk(6, struct.pack("<I", 2) + footer_xml)
    )


@pytest.fixture
def minimal_file() -> bytes:
    return build_minimal_file()


@pytest.fixture
def three_row_file() -> bytes:
    return build_three_row_file()


@pytest.fixture
def marker_file() -> bytes:
    return build_marker_file()
