"""Random Recording generator + semantic equality checker.

Drives the serialize/parse round-trip properties. Values are drawn in each
format's exact domain so bit-exactness is a fair assertion.
"""

import numpy as np

from xdfkit import (
    ChannelFormat,
    ClockOffsetRecord,
    Recording,
    SampleBlock,
    StreamData,
    StreamFooter,
    StreamInfo,
    XmlNode,
)

_WORDS = ["eeg", "ecg", "gaze", "markers", "audio", "imu", "stim", "resp"]
_TRICKY_STRINGS = ["", "ok", "a,b", 'say "hi"', "line\nbreak", "π≈3.14159", "x" * 40]


def random_tree(rng: np.random.Generator, info_fields: dict) -> XmlNode:
    children = [XmlNode(k, v) for k, v in info_fields.items()]
    if rng.random() < 0.3:
        # attribute children always sort first, matching what a re-parse yields
        children.insert(0, XmlNode("@attr:created", "2017-02-06"))
    if rng.random() < 0.4:
        desc = XmlNode("desc")
        for i in range(rng.integers(1, 3)):
            desc.children.append(XmlNode("channel", "", [XmlNode("label", f"ch{i}")]))
        children.append(desc)
    return XmlNode("info", "", children)


def random_recording(rng: np.random.Generator) -> Recording:
    n_streams = int(rng.integers(1, 9))
    ids = rng.choice(np.arange(1, 60), size=n_streams, replace=False)
    streams = {}
    for sid in sorted(int(i) for i in ids):
        streams[sid] = _random_stream(rng, sid)
    return Recording(
        file_header=XmlNode("info", "", [XmlNode("version", "1.0")]),
        streams=streams,
        boundary_offsets=[0] * int(rng.integers(0, 3)),
    )


def _random_stream(rng: np.random.Generator, sid: int) -> StreamData:
    fmt = ChannelFormat(
        rng.choice(["int8", "int16", "int32", "int64", "float32", "double64", "string"])
    )
    if fmt is ChannelFormat.STRING:
        channels = int(rng.integers(1, 3))
        srate = 0.0 if rng.random() < 0.8 else 10.0
    else:
        channels = int(rng.integers(1, 5))
        srate = float(rng.choice([0.0, 50.0, 100.0, 250.0, 500.0]))
    fields = {
        "name": str(rng.choice(_WORDS)),
        "type": str(rng.choice(["EEG", "Markers", "Gaze", "Audio"])),
        "channel_count": str(channels),
        "nominal_srate": repr(srate),
        "channel_format": fmt.value,
    }
    info = StreamInfo(
        stream_id=sid,
        name=fields["name"],
        content_type=fields["type"],
        channel_count=channels,
        nominal_srate=srate,
        channel_format=fmt,
        header_tree=random_tree(rng, fields),
    )
    stream = StreamData(info)
    t = float(rng.uniform(0, 100))
    for _ in range(int(rng.integers(0, 5))):
        n = int(rng.integers(0, 31))
        block, t = _random_block(rng, sid, fmt, channels, srate, n, t)
        stream.blocks.append(block)
    for k in range(int(rng.integers(0, 4))):
        stream.offsets.append(
            ClockOffsetRecord(sid, 5.0 * k, float(rng.normal(0, 0.01)))
        )
    if rng.random() < 0.5:
        nonempty = [b for b in stream.blocks if len(b)]
        first = nonempty[0].timestamps[0] if nonempty else 0.0
        tree = XmlNode(
            "info",
            "",
            [
                XmlNode("first_timestamp", repr(float(first))),
                XmlNode("last_timestamp", repr(float(t))),
                XmlNode("sample_count", str(stream.sample_count)),
            ],
        )
        info.footer = StreamFooter(float(first), float(t), stream.sample_count, tree)
    return stream


def _random_block(rng, sid, fmt, channels, srate, n, t):
    step = 1.0 / srate if srate > 0 else float(rng.uniform(0.01, 0.7))
    stamped = rng.random(n) < rng.choice([0.05, 0.5, 1.0])
    if n and srate == 0:
        stamped[:] = True  # irregular streams stamp every sample
    if n:
        stamped[0] = True
    timestamps = t + np.arange(n, dtype=np.float64) * step
    timestamps[~stamped] = 0.0
    t = float(t + n * step)
    if fmt is ChannelFormat.STRING:
        values = [
            [str(rng.choice(_TRICKY_STRINGS)) for _ in range(channels)]
            for _ in range(n)
        ]
    elif fmt in (ChannelFormat.FLOAT32, ChannelFormat.DOUBLE64):
        values = rng.normal(0, 50, size=(n, channels)).astype(fmt.dtype)
    else:
        lo, hi = np.iinfo(fmt.dtype).min, np.iinfo(fmt.dtype).max
        values = rng.integers(lo, hi, size=(n, channels), endpoint=True).astype(fmt.dtype)
    return SampleBlock(sid, values, timestamps, stamped), t


def blocks_equal(a: SampleBlock, b: SampleBlock) -> bool:
    if len(a) != len(b) or not np.array_equal(a.stamped, b.stamped):
        return False
    if not np.array_equal(a.timestamps[a.stamped], b.timestamps[b.stamped]):
        return False
    if isinstance(a.values, list) or isinstance(b.values, list):
        return list(map(list, a.values)) == list(map(list, b.values))
    return (
        a.values.dtype == b.values.dtype
        and a.values.tobytes() == b.values.tobytes()
    )


def recordings_equal(a: Recording, b: Recording) -> bool:
    if a.file_header != b.file_header:
        return False
    if set(a.streams) != set(b.streams):
        return False
    if len(a.boundary_offsets) != len(b.boundary_offsets):
        return False
    for sid, sa in a.streams.items():
        sb = b.streams[sid]
        ia, ib = sa.info, sb.info
        if (
            ia.name != ib.name
            or ia.content_type != ib.content_type
            or ia.channel_count != ib.channel_count
            or ia.nominal_srate != ib.nominal_srate
            or ia.channel_format != ib.channel_format
            or ia.header_tree != ib.header_tree
        ):
            return False
        fa, fb = ia.footer, ib.footer
        if (fa is None) != (fb is None):
            return False
        if fa is not None and fa.tree != fb.tree:
            return False
        if len(sa.blocks) != len(sb.blocks):
            return False
        if not all(blocks_equal(x, y) for x, y in zip(sa.blocks, sb.blocks)):
            return False
        if [(r.collection_time, r.offset) for r in sa.offsets] != [
            (r.collection_time, r.offset) for r in sb.offsets
        ]:
            return False
    return True
