"""Byte-level primitives of the chunked container.

Layout: the file starts with the magic ``XDF:``; every chunk is a
variable-length integer Length (counting tag plus payload), a little-endian
uint16 tag, then the payload. Variable-length integers are one width byte
(1, 4 or 8) followed by that many little-endian value bytes.
"""

from __future__ import annotations

import enum
import struct
from typing import BinaryIO

from .errors import TruncatedError, WidthError

MAGIC = b"XDF:"

BOUNDARY_SIGNATURE = bytes(
    [0x43, 0xA5, 0x46, 0xDC, 0xCB, 0xF5, 0x41, 0x0F,
     0xB3, 0x0E, 0xD5, 0x46, 0x73, 0x83, 0xCB, 0xE4]
)


class ChunkTag(enum.IntEnum):
    FILE_HEADER = 1
    STREAM_HEADER = 2
    SAMPLES = 3
    CLOCK_OFFSET = 4
    BOUNDARY = 5
    STREAM_FOOTER = 6


_WIDTH_CODES = (1, 4, 8)


def read_varlen(data: bytes, pos: int = 0) -> tuple[int, int]:
    """Decode a variable-length unsigned integer at ``pos``.

    Returns (value, consumed) where consumed = 1 + width.
    """
    if pos >= len(data):
        raise TruncatedError("varlen: no width byte available")
    width = data[pos]
    if width not in _WIDTH_CODES:
        raise WidthError(f"varlen width byte must be 1, 4 or 8, got {width}")
    end = pos + 1 + width
    if end > len(data):
        raise TruncatedError(f"varlen: need {width} value bytes, have {len(data) - pos - 1}")
    return int.from_bytes(data[pos + 1:end], "little"), 1 + width


def write_varlen(value: int) -> bytes:
    """Encode with the smallest width in {1, 4, 8} that holds the value."""
    if value < 0:
        raise ValueError("varlen values are unsigned")
    if value < 1 << 8:
        return bytes([1, value])
    if value < 1 << 32:
        return b"\x04" + value.to_bytes(4, "little")
    if value < 1 << 64:
        return b"\x08" + value.to_bytes(8, "little")
    raise ValueError("varlen value exceeds 64 bits")


def encode_chunk(tag: int, payload: bytes) -> bytes:
    """Frame one chunk: varlen length (tag+payload bytes), uint16 tag, payload."""
    return write_varlen(len(payload) + 2) + struct.pack("<H", tag) + payload


class ByteSource:
    """Buffered forward reader over bytes or a binary file object.

    Tracks the absolute position and supports scanning ahead for the boundary
    signature, which corrupt-chunk recovery uses to resynchronize.
    """

    _BLOCK = 1 << 20

    def __init__(self, raw: bytes | bytearray | memoryview | BinaryIO):
        if isinstance(raw, (bytes, bytearray, memoryview)):
            self._stream = None
            self._buf = bytes(raw)
        else:
            self._stream = raw
            self._buf = b""
        self._pos = 0  # offset of _buf[0] in the source
        self._cursor = 0  # offset within _buf

    def tell(self) -> int:
        return self._pos + self._cursor

    def _fill(self, n: int) -> None:
        """Ensure up to n bytes are buffered past the cursor (best effort)."""
        if self._stream is None:
            return
        have = len(self._buf) - self._cursor
        if have >= n:
            return
        # drop consumed bytes so memory stays bounded by the request size
        if self._cursor:
            self._pos += self._cursor
            self._buf = self._buf[self._cursor:]
            self._cursor = 0
        while len(self._buf) < n:
            block = self._stream.read(max(n - len(self._buf), self._BLOCK))
            if not block:
                break
            self._buf += block

    def read(self, n: int) -> bytes:
        """Read up to n bytes; shorter result means EOF."""
        self._fill(n)
        out = self._buf[self._cursor:self._cursor + n]
        self._cursor += len(out)
        return out

    def read_exact(self, n: int, what: str = "data") -> bytes:
        out = self.read(n)
        if len(out) != n:
            raise TruncatedError(f"{what}: wanted {n} bytes, got {len(out)}")
        return out

    def peek(self, n: int) -> bytes:
        self._fill(n)
        return self._buf[self._cursor:self._cursor + n]

    def skip(self, n: int) -> int:
        """Skip up to n bytes, returning how many were actually skipped."""
        skipped = 0
        while skipped < n:
            step = min(n - skipped, self._BLOCK)
            got = self.read(step)
            skipped += len(got)
            if len(got) < step:
                break
        return skipped

    def at_eof(self) -> bool:
        return len(self.peek(1)) == 0

    def read_varlen(self, what: str = "length") -> int:
        head = self.peek(9)
        if not head:
            raise TruncatedError(f"{what}: unexpected end of data")
        value, consumed = read_varlen(head)
        self._cursor += consumed
        return value

    def scan_past(self, signature: bytes) -> bool:
        """Advance just past the next occurrence of ``signature``.

        Returns False (positioned at EOF) when the signature does not occur.
        """
        keep = len(signature) - 1
        while True:
            self._fill(self._BLOCK)
            window = self._buf[self._cursor:]
            hit = window.find(signature)
            if hit >= 0:
                self._cursor += hit + len(signature)
                return True
            if self._stream is None or len(window) < self._BLOCK:
                self._cursor = len(self._buf)
                return False
            # keep a tail so a signature split across blocks is still found
            self._cursor = len(self._buf) - keep
