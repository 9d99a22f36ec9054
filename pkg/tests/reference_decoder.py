"""Independent, deliberately naive decoder used as a fixture oracle.

No imports from the package under test: plain struct unpacking and
ElementTree, one sample at a time. Too slow for real files, but trustworthy
for hand-built fixtures.
"""

import struct
import xml.etree.ElementTree as ET

FORMATS = {
    "int8": ("<b", 1),
    "int16": ("<h", 2),
    "int32": ("<i", 4),
    "int64": ("<q", 8),
    "float32": ("<f", 4),
    "double64": ("<d", 8),
}


def ref_varlen(data, pos):
    width = data[pos]
    assert width in (1, 4, 8), f"bad varlen width {width}"
    value = int.from_bytes(data[pos + 1:pos + 1 + width], "little")
    return value, pos + 1 + width


def ref_decode(data):
    """Decode a full file into plain dicts and lists."""
    assert data[:4] == b"XDF:", "bad magic"
    pos = 4
    out = {
        "file_header": None,
        "streams": {},
        "boundaries": [],
        "chunks": [],
    }
    while pos < len(data):
        chunk_start = pos
        length, pos = ref_varlen(data, pos)
        tag = struct.unpack_from("<H", data, pos)[0]
        pos += 2
        payload = data[pos:pos + length - 2]
        assert len(payload) == length - 2, "truncated chunk"
        pos += length - 2
        out["chunks"].append(tag)

        if tag == 1:
            out["file_header"] = ET.fromstring(payload.decode("utf-8"))
        elif tag == 2:
            sid = struct.unpack_from("<I", payload)[0]
            root = ET.fromstring(payload[4:].decode("utf-8"))
            out["streams"][sid] = {
                "header": root,
                "format": root.findtext("channel_format"),
                "channels": int(root.findtext("channel_count", "1")),
                "srate": float(root.findtext("nominal_srate", "0")),
                "samples": [],
                "offsets": [],
                "footer": None,
            }
        elif tag == 3:
            sid = struct.unpack_from("<I", payload)[0]
            stream = out["streams"][sid]
            p = 4
            n, p = ref_varlen(payload, p)
            for _ in range(n):
                flag = payload[p]
                p += 1
                ts = None
                if flag == 8:
                    ts = struct.unpack_from("<d", payload, p)[0]
                    p += 8
                values = []
                for _ in range(stream["channels"]):
                    if stream["format"] == "string":
                        slen, p = ref_varlen(payload, p)
                        values.append(payload[p:p + slen].decode("utf-8"))
                        p += slen
                    else:
                        fmt, size = FORMATS[stream["format"]]
                        values.append(struct.unpack_from(fmt, payload, p)[0])
                        p += size
                stream["samples"].append((ts, values))
        elif tag == 4:
            sid, t, off = struct.unpack_from("<Idd", payload)
            out["streams"][sid]["offsets"].append((t, off))
        elif tag == 5:
            out["boundaries"].append(chunk_start)
        elif tag == 6:
            sid = struct.unpack_from("<I", payload)[0]
            out["streams"][sid]["footer"] = ET.fromstring(payload[4:].decode("utf-8"))
    return out
