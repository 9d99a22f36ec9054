"""Regenerate the viewer's contract fixtures from the real service.

Run from the frontend/ directory:  python3 scripts/make_fixtures.py
The JSON files under tests/fixtures/ are committed so the viewer tests run
without a Python environment; rerun this script whenever the service's JSON
shapes change.
"""

import json
import pathlib

import numpy as np
from fastapi.testclient import TestClient

from xdfkit.model import (
    ChannelFormat,
    Recording,
    SampleBlock,
    StreamData,
    StreamInfo,
)
from xdfkit.service import ServiceState, build_app
from xdfkit.xmltree import XmlNode

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def _tree(fields):
    return XmlNode("info", "", [XmlNode(k, v) for k, v in fields.items()])


def _stream(sid, name, fmt, channels, srate, blocks):
    fields = {
        "name": name,
        "type": "Markers" if fmt == "string" else "EEG",
        "channel_count": str(channels),
        "nominal_srate": repr(float(srate)) if srate else "0",
        "channel_format": fmt,
    }
    info = StreamInfo(sid, name, fields["type"], channels, srate,
                      ChannelFormat(fmt), _tree(fields))
    return StreamData(info, blocks)


def build_recording() -> Recording:
    ramp_values = np.array([[0.0, 0.0], [1.0, -1.0], [2.0, -2.0], [3.0, -3.0]])
    ramp = _stream(
        1, "ramp", "double64", 2, 1.0,
        [SampleBlock(1, ramp_values, np.arange(4.0), np.ones(4, dtype=bool))],
    )
    # declares 110 Hz but ticks at 100 Hz -> deviation badge
    n = 501
    drifty = _stream(
        2, "drifty", "float32", 1, 110.0,
        [SampleBlock(
            2,
            np.sin(np.arange(n) / 20.0).astype("<f4").reshape(-1, 1),
            np.arange(n) / 100.0,
            np.ones(n, dtype=bool),
        )],
    )
    marks = _stream(
        3, "marks", "string", 1, 0.0,
        [SampleBlock(
            3,
            [["go"], ["stop"]],
            np.array([1.0, 2.5]),
            np.ones(2, dtype=bool),
        )],
    )
    return Recording(
        XmlNode("info", "", [XmlNode("version", "1.0")]),
        {1: ramp, 2: drifty, 3: marks},
    )


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    state = ServiceState(build_recording(), [], "fixtures/demo.xdf")
    client = TestClient(build_app(state))

    def dump(name, response):
        assert response.status_code == 200, (name, response.status_code)
        (OUT / name).write_text(json.dumps(response.json(), indent=1, sort_keys=True) + "\n")
        print("wrote", OUT / name)

    dump("recording.json", client.get("/api/recording"))
    dump(
        "tiles_ramp.json",
        client.get("/api/streams/1/tiles",
                   params={"channel": 0, "t0": 0, "t1": 4, "buckets": 2}),
    )
    dump(
        "tiles_polyline.json",
        client.get("/api/streams/1/tiles",
                   params={"channel": 0, "t0": 0, "t1": 4, "buckets": 8}),
    )
    dump("events.json", client.get("/api/events"))
    dump("meta_ramp.json", client.get("/api/streams/1/meta"))


if __name__ == "__main__":
    main()
