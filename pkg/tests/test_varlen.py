import pytest
from hypothesis import given
from hypothesis import strategies as st

from xdfkit import read_varlen, write_varlen
from xdfkit.errors import TruncatedError, WidthError


def test_width_one():
    assert read_varlen(bytes([0x01, 0x0F])) == (15, 2)


def test_width_four():
    assert read_varlen(bytes([0x04, 0x10, 0x00, 0x00, 0x00])) == (16, 5)


def test_bad_width_byte():
    with pytest.raises(WidthError):
        read_varlen(bytes([0x02, 0x00]))


def test_truncated_value_bytes():
    with pytest.raises(TruncatedError):
        read_varlen(bytes([0x08, 0x01, 0x02]))


def test_truncated_empty():
    with pytest.raises(TruncatedError):
        read_varlen(b"")


def test_offset_decoding():
    data = b"\xff" + bytes([0x01, 0x2A])
    assert read_varlen(data, 1) == (42, 2)


def test_write_small():
    assert write_varlen(15) == bytes([0x01, 0x0F])


def test_write_zero():
    assert write_varlen(0) == bytes([0x01, 0x00])


def test_write_needs_four_bytes():
    assert write_varlen(300) == bytes([0x04, 0x2C, 0x01, 0x00, 0x00])


def test_write_needs_eight_bytes():
    assert write_varlen(1 << 40) == b"\x08" + (1 << 40).to_bytes(8, "little")


def test_write_negative_rejected():
    with pytest.raises(ValueError):
        write_varlen(-1)


@given(st.integers(min_value=0, max_value=(1 << 64) - 1))
def test_round_trip(value):
    encoded = write_varlen(value)
    assert read_varlen(encoded) == (value, len(encoded))


@given(st.integers(min_value=0, max_value=(1 << 64) - 1), st.binary(max_size=16))
def test_round_trip_with_trailing_bytes(value, tail):
    encoded = write_varlen(value)
    decoded, consumed = read_varlen(encoded + tail)
    assert (decoded, consumed) == (value, len(encoded))
