import numpy as np
import pytest

from xdfkit import parse_recording
from xdfkit.cli import main
from xdfkit.events import import_csv
from xdfkit.model import (
    ChannelFormat,
    Recording,
    SampleBlock,
    StreamData,
    StreamInfo,
)
from xdfkit.writer import write_recording
from xdfkit.xmltree import XmlNode

from conftest import build_marker_file, build_minimal_file


def _write(tmp_path, name, data: bytes):
    path = tmp_path / name
    path.write_bytes(data)
    return str(path)


def _nominal_mismatch_file(tmp_path) -> str:
    """Stream declares 110 Hz but actually ticks at 100 Hz."""
    tree = XmlNode(
        "info",
        "",
        [
            XmlNode("name", "drifty"),
            XmlNode("type", "EEG"),
            XmlNode("channel_count", "1"),
            XmlNode("nominal_srate", "110"),
            XmlNode("channel_format", "float32"),
        ],
    )
    info = StreamInfo(1, "drifty", "EEG", 1, 110.0, ChannelFormat.FLOAT32, tree)
    n = 1001
    stamped = np.ones(n, dtype=bool)
    timestamps = np.arange(n) / 100.0
    values = np.zeros((n, 1), dtype="<f4")
    stream = StreamData(info, [SampleBlock(1, values, timestamps, stamped)])
    rec = Recording(XmlNode("info"), {1: stream})
    path = tmp_path / "mismatch.xdf"
    write_recording(rec, path)
    return str(path)


def test_usage_error_exits_64(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["info"])  # missing file argument
    assert exc.value.code == 64


def test_unknown_command_exits_64():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 64


def test_validate_clean(tmp_path, capsys):
    path = _write(tmp_path, "min.xdf", build_minimal_file())
    assert main(["validate", path]) == 0
    assert "ok" in capsys.readouterr().out


def test_validate_warnings_exit_2(tmp_path, capsys):
    from conftest import chunk

    data = build_minimal_file() + chunk(99, b"??")
    path = _write(tmp_path, "warn.xdf", data)
    assert main(["validate", path]) == 2
    out = capsys.readouterr().out
    assert "unknown chunk tag 99" in out


def test_validate_parse_error_exit_1(tmp_path, capsys):
    path = _write(tmp_path, "bad.xdf", b"garbage")
    assert main(["validate", path]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_file_exit_1(capsys):
    assert main(["info", "/no/such/file.xdf"]) == 1


def test_info_lists_streams(tmp_path, capsys):
    path = _write(tmp_path, "markers.xdf", build_marker_file())
    assert main(["info", path]) == 0
    out = capsys.readouterr().out
    assert "EEG" in out
    assert "irregular" in out
    assert "float32" in out


def test_info_strict_flags_deviation(tmp_path, capsys):
    path = _nominal_mismatch_file(tmp_path)
    assert main(["info", path]) == 0  # without --strict just reports
    assert "DEVIATES" in capsys.readouterr().out
    assert main(["info", path, "--strict"]) == 3


def test_info_strict_clean_passes(tmp_path, capsys):
    path = _write(tmp_path, "markers.xdf", build_marker_file())
    assert main(["info", path, "--strict"]) == 0


def test_tree_two_space_indent(tmp_path, capsys):
    path = _write(tmp_path, "min.xdf", build_minimal_file())
    assert main(["tree", path]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "info"
    assert out.splitlines()[1] == "  version: 1.0"


def test_tree_stream_header(tmp_path, capsys):
    path = _write(tmp_path, "markers.xdf", build_marker_file())
    assert main(["tree", path, "--stream", "2"]) == 0
    out = capsys.readouterr().out
    assert "  name: markers" in out
    assert main(["tree", path, "--stream", "42"]) == 1


def test_export_csv(tmp_path, capsys):
    path = _write(tmp_path, "markers.xdf", build_marker_file())
    out_path = tmp_path / "events.csv"
    assert main(["export-csv", path, "-o", str(out_path)]) == 0
    events = import_csv(out_path.read_bytes())
    assert [e.label for e in events] == ["trigger"]


def test_annotate_to_copy(tmp_path, capsys):
    path = _write(tmp_path, "markers.xdf", build_marker_file())
    out_path = tmp_path / "annotated.xdf"
    code = main(
        ["annotate", path, "--onset", "2.5", "--label", "artifact", "-o", str(out_path)]
    )
    assert code == 0
    rec, _ = parse_recording(out_path.read_bytes())
    assert rec.stream(3).string_column() == ["artifact"]
    # original untouched
    assert (tmp_path / "markers.xdf").read_bytes() == build_marker_file()


def test_annotate_write_back(tmp_path):
    original = build_marker_file()
    path = _write(tmp_path, "markers.xdf", original)
    code = main(["annotate", path, "--onset", "1.0", "--duration", "0.5",
                 "--label", "burst", "--write-back"])
    assert code == 0
    new_bytes = (tmp_path / "markers.xdf").read_bytes()
    assert new_bytes[: len(original)] == original
    rec, _ = parse_recording(new_bytes)
    assert rec.stream(3).string_column() == ["burst|duration=0.5"]


def test_annotate_requires_destination(tmp_path):
    path = _write(tmp_path, "markers.xdf", build_marker_file())
    with pytest.raises(SystemExit) as exc:
        main(["annotate", path, "--onset", "1", "--label", "x"])
    assert exc.value.code == 64


def test_synthgen_and_info(tmp_path, capsys):
    out_path = tmp_path / "synth.xdf"
    code = main(["synthgen", "--duration", "10", "--noise", "0", "-o", str(out_path)])
    assert code == 0
    capsys.readouterr()
    assert main(["info", str(out_path)]) == 0
    out = capsys.readouterr().out
    lines = [ln for ln in out.splitlines() if ln.startswith("1 ")]
    assert lines, out
    fields = lines[0].split()
    effective = float(fields[6])
    assert abs(effective - 500.0) <= 0.001
    assert "DEVIATES" not in out


def test_synthgen_validates_config(tmp_path):
    assert main(["synthgen", "--freq", "0", "-o", str(tmp_path / "x.xdf")]) == 1


def test_phase_check_passes_on_clean_run(tmp_path, capsys):
    out_path = tmp_path / "synth.xdf"
    main(["synthgen", "--duration", "20", "--noise", "0", "-o", str(out_path)])
    capsys.readouterr()
    assert main(["phase-check", str(out_path), "--freq", "10", "--target-phase", "0"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "circular mean error" in out


def test_phase_check_fails_on_wrong_target(tmp_path, capsys):
    out_path = tmp_path / "synth.xdf"
    main(["synthgen", "--duration", "20", "--noise", "0", "-o", str(out_path)])
    code = main(["phase-check", str(out_path), "--freq", "10",
                 "--target-phase", "2.0", "--tol", "0.2"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_resample_to_common_rate(tmp_path, capsys):
    synth_path = tmp_path / "synth.xdf"
    main(["synthgen", "--duration", "5", "--noise", "0", "--srate", "100",
          "-o", str(synth_path)])
    out_path = tmp_path / "resampled.xdf"
    assert main(["resample", str(synth_path), "--rate", "250", "-o", str(out_path)]) == 0
    rec, warnings = parse_recording(out_path.read_bytes())
    assert warnings == []
    assert rec.stream(1).info.nominal_srate == 250.0
    assert rec.stream(1).info.channel_format is ChannelFormat.DOUBLE64
    assert rec.stream(1).sample_count == 5 * 250
    # marker stream passes through untouched
    assert rec.stream(5).info.is_marker
    original, _ = parse_recording(synth_path.read_bytes())
    assert rec.stream(5).sample_count == original.stream(5).sample_count


def test_resample_content_is_faithful(tmp_path):
    synth_path = tmp_path / "synth.xdf"
    main(["synthgen", "--duration", "8", "--noise", "0", "--srate", "100",
          "--seed", "3", "-o", str(synth_path)])
    out_path = tmp_path / "res.xdf"
    main(["resample", str(synth_path), "--rate", "200", "-o", str(out_path)])
    rec, _ = parse_recording(out_path.read_bytes())
    values = rec.stream(1).column(0)
    original, _ = parse_recording(synth_path.read_bytes())
    # compare against the original samples at shared times (every 2nd sample)
    orig_values = original.stream(1).column(0)
    shared = values[:: 2][: len(orig_values)]
    core = slice(200, -200)
    rms = np.sqrt(np.mean((shared[core] - orig_values[: len(shared)][core]) ** 2))
    assert rms < 1e-3


def test_resample_defaults_to_max_rate(tmp_path, capsys):
    synth_path = tmp_path / "synth.xdf"
    main(["synthgen", "--duration", "5", "--noise", "0", "--srate", "250",
          "-o", str(synth_path)])
    out_path = tmp_path / "res.xdf"
    assert main(["resample", str(synth_path), "-o", str(out_path)]) == 0
    rec, _ = parse_recording(out_path.read_bytes())
    assert rec.stream(1).info.nominal_srate == 250.0
