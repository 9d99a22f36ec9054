"""Command-line interface.

Exit codes: 0 success, 1 parse/IO/check failure, 2 warnings treated as
errors (validate), 3 strict-mode rate deviation, 64 usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import warnings as _warnings

import numpy as np

from . import __version__
from .errors import XdfError, XdfWarning
from .events import EventSet, add_event, append_events, derive_events, export_csv
from .model import ChannelFormat, Recording, SampleBlock, StreamData, StreamInfo
from .reader import load
from .resample import common_rate, plan_resample, resample
from .service import DEFAULT_PORT, PORT_ENV_VAR, ServiceState, serve
from .synth import SynthConfig, generate, verify
from .timeline import apply_sync, build_sync_model, effective_rate, resolve_timestamps
from .writer import write_recording
from .xmltree import XmlNode

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_WARNINGS = 2
EXIT_DEVIATION = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="xdfkit", description="XDF recording toolkit")
    parser.add_argument("--version", action="version", version=f"xdfkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("info", help="stream table with effective rates")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 if any stream deviates from its nominal rate")
    p.add_argument("--threshold", type=float, default=0.01,
                   help="relative deviation that counts as significant (default 0.01)")

    p = sub.add_parser("tree", help="print the XML metadata tree")
    p.add_argument("file")
    p.add_argument("--stream", type=int, default=None,
                   help="stream id (default: file header)")

    p = sub.add_parser("validate", help="parse and report warnings")
    p.add_argument("file")
    p.add_argument("--recover", action="store_true",
                   help="resynchronize at boundaries after corrupt chunks")

    p = sub.add_parser("export-csv", help="write decoded events as CSV")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("annotate", help="append an event to the file")
    p.add_argument("file")
    p.add_argument("--onset", type=float, required=True)
    p.add_argument("--duration", type=float, default=0.0)
    p.add_argument("--label", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--write-back", action="store_true",
                       help="append to the input file in place")
    group.add_argument("-o", "--output", help="write the annotated copy here")

    p = sub.add_parser("resample", help="resample regular numeric streams")
    p.add_argument("file")
    p.add_argument("--rate", type=float, default=None,
                   help="target rate in Hz (default: max nominal rate)")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("synthgen", help="generate the simulated phase experiment")
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--srate", type=float, default=500.0)
    p.add_argument("--freq", type=float, default=10.0, help="oscillation frequency (Hz)")
    p.add_argument("--noise", type=float, default=0.5, help="noise sigma")
    p.add_argument("--horizon", type=float, default=0.2, help="prediction horizon (s)")
    p.add_argument("--target-phase", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--window", type=float, default=0.5, help="trailing fit window (s)")
    p.add_argument("--drift", type=float, default=0.0, help="linear clock drift")
    p.add_argument("-o", "--output", required=True)

    p = sub.add_parser("phase-check", help="verify triggers against the target phase")
    p.add_argument("file")
    p.add_argument("--freq", type=float, default=10.0)
    p.add_argument("--target-phase", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=0.2,
                   help="max |circular mean error| in rad (default 0.2)")
    p.add_argument("--limit", type=int, default=20,
                   help="per-event rows to print (0 = all)")

    p = sub.add_parser("serve", help="serve the viewer API")
    p.add_argument("file")
    p.add_argument("--port", type=int, default=None,
                   help=f"port (default ${PORT_ENV_VAR} or {DEFAULT_PORT})")
    p.add_argument("--ui", default=None, help="directory with the built viewer")
    p.add_argument("--recover", action="store_true")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except (XdfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def _load(path, recover=False):
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", XdfWarning)
        return load(path, recover=recover)


def _cmd_info(args) -> int:
    rec, _ = _load(args.file)
    rows = []
    any_deviates = False
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", XdfWarning)
        for sid in sorted(rec.streams):
            stream = rec.stream(sid)
            info = stream.info
            series = apply_sync(
                resolve_timestamps(stream.blocks, info),
                build_sync_model(stream.offsets, sid),
            )
            report = effective_rate(series, info.nominal_srate, args.threshold)
            any_deviates |= report.deviates
            rows.append(
                (
                    str(sid),
                    info.name or "-",
                    info.content_type or "-",
                    info.channel_format.value,
                    str(info.channel_count),
                    _fmt_rate(info.nominal_srate),
                    _fmt_rate(report.effective_srate),
                    "DEVIATES" if report.deviates else "",
                )
            )
    headers = ("id", "name", "type", "format", "ch", "nominal", "effective", "flag")
    _print_table(headers, rows)
    if args.strict and any_deviates:
        return EXIT_DEVIATION
    return EXIT_OK


def _fmt_rate(rate: float) -> str:
    if rate == 0:
        return "irregular"
    return f"{rate:.4f}".rstrip("0").rstrip(".")


def _print_table(headers, rows) -> None:
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())


def _cmd_tree(args) -> int:
    rec, _ = _load(args.file)
    if args.stream is None:
        tree = rec.file_header
    else:
        if args.stream not in rec.streams:
            print(f"error: no stream {args.stream}", file=sys.stderr)
            return EXIT_ERROR
        tree = rec.stream(args.stream).info.header_tree
    _print_tree(tree, 0)
    return EXIT_OK


def _print_tree(node: XmlNode, depth: int) -> None:
    prefix = "  " * depth
    print(f"{prefix}{node.name}: {node.text}" if node.text else f"{prefix}{node.name}")
    for child in node.children:
        _print_tree(child, depth + 1)


def _cmd_validate(args) -> int:
    try:
        _, warnings = _load(args.file, recover=args.recover)
    except (XdfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    for w in warnings:
        print(w)
    if warnings:
        print(f"{len(warnings)} warning(s)")
        return EXIT_WARNINGS
    print("ok")
    return EXIT_OK


def _cmd_export_csv(args) -> int:
    rec, _ = _load(args.file)
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", XdfWarning)
        events = derive_events(rec)
    with open(args.output, "wb") as f:
        f.write(export_csv(events))
    print(f"wrote {len(events)} event(s) to {args.output}")
    return EXIT_OK


def _cmd_annotate(args) -> int:
    events, _ = add_event(EventSet(), args.onset, args.duration, args.label)
    if args.write_back:
        from .events import append_to_file

        append_to_file(args.file, events)
        print(f"appended 1 event to {args.file}")
    else:
        with open(args.file, "rb") as f:
            original = f.read()
        new_bytes = append_events(original, events)
        with open(args.output, "wb") as f:
            f.write(new_bytes)
        print(f"wrote annotated copy to {args.output}")
    return EXIT_OK


def _cmd_resample(args) -> int:
    rec, _ = _load(args.file)
    infos = [s.info for s in rec.streams.values()]
    target = common_rate(infos, args.rate)
    out = _resample_recording(rec, target)
    write_recording(out, args.output)
    print(f"resampled regular numeric streams to {_fmt_rate(target)} Hz -> {args.output}")
    return EXIT_OK


def _resample_recording(rec: Recording, target: float) -> Recording:
    """All regular numeric streams at the target rate, everything synced.

    Output timestamps are on the recorder clock (sync applied, offsets
    dropped); marker and irregular streams pass through with synced stamps.
    """
    streams: dict[int, StreamData] = {}
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", XdfWarning)
        for sid in sorted(rec.streams):
            stream = rec.stream(sid)
            info = stream.info
            series = apply_sync(
                resolve_timestamps(stream.blocks, info),
                build_sync_model(stream.offsets, sid),
            )
            if info.channel_format.is_numeric and info.nominal_srate > 0 and len(series):
                streams[sid] = _resample_stream(stream, series, target)
            else:
                new = StreamData(info)
                if len(series):
                    blocks = []
                    pos = 0
                    for b in stream.blocks:
                        t = series.times[pos:pos + len(b)]
                        pos += len(b)
                        blocks.append(
                            SampleBlock(sid, b.values, t.copy(), np.ones(len(b), dtype=bool))
                        )
                    new.blocks = blocks
                streams[sid] = new
    return Recording(rec.file_header, streams, list(rec.boundary_offsets), 0)


def _resample_stream(stream: StreamData, series, target: float) -> StreamData:
    info = stream.info
    plan = plan_resample(info.nominal_srate, target)
    columns = [
        resample(stream.column(c).astype(np.float64), plan)
        for c in range(info.channel_count)
    ]
    values = np.column_stack(columns).astype("<f8")
    n = len(values)
    t0 = float(series.times[0])
    timestamps = np.zeros(n)
    stamped = np.zeros(n, dtype=bool)
    if n:
        timestamps[0] = t0
        stamped[0] = True

    tree = _retagged_header(info.header_tree, target)
    new_info = StreamInfo(
        stream_id=info.stream_id,
        name=info.name,
        content_type=info.content_type,
        channel_count=info.channel_count,
        nominal_srate=target,
        channel_format=ChannelFormat.DOUBLE64,
        header_tree=tree,
    )
    out = StreamData(new_info)
    out.blocks = [SampleBlock(info.stream_id, values, timestamps, stamped)]
    return out


def _retagged_header(tree: XmlNode, target: float) -> XmlNode:
    def copy(node: XmlNode) -> XmlNode:
        return XmlNode(node.name, node.text, [copy(c) for c in node.children])

    new = copy(tree)
    for name, text in (("nominal_srate", repr(float(target))),
                       ("channel_format", "double64")):
        child = new.child(name)
        if child is None:
            new.children.append(XmlNode(name, text))
        else:
            child.text = text
    return new


def _cmd_synthgen(args) -> int:
    config = SynthConfig(
        duration=args.duration,
        srate=args.srate,
        osc_freq=args.freq,
        noise_sigma=args.noise,
        horizon=args.horizon,
        target_phase=args.target_phase,
        seed=args.seed,
        window=args.window,
        clock_drift=args.drift,
    )
    rec = generate(config)
    write_recording(rec, args.output)
    triggers = rec.stream(5).sample_count
    print(f"wrote {args.output}: 5 streams, {triggers} trigger(s)")
    return EXIT_OK


def _cmd_phase_check(args) -> int:
    rec, _ = _load(args.file)
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", XdfWarning)
        report = verify(rec, args.target_phase, args.freq)
    rows = report.per_event if args.limit == 0 else report.per_event[:args.limit]
    _print_table(
        ("event_time", "true_phase", "error"),
        [(f"{p.event_time:.4f}", f"{p.true_phase:+.4f}", f"{p.error:+.4f}") for p in rows],
    )
    if len(report.per_event) > len(rows):
        print(f"... {len(report.per_event) - len(rows)} more event(s)")
    print(f"events: {report.n_events}  skipped: {report.n_skipped}")
    print(f"circular mean error: {report.circular_mean_error:+.5f} rad")
    print(f"circular std: {report.circular_std:.5f} rad")
    passed = report.defined and abs(report.circular_mean_error) <= args.tol
    print(f"result: {'PASS' if passed else 'FAIL'} (tol {args.tol} rad)")
    return EXIT_OK if passed else EXIT_ERROR


def _cmd_serve(args) -> int:
    rec, warnings = _load(args.file, recover=args.recover)
    state = ServiceState(rec, warnings, path=args.file)
    port = args.port
    if port is None:
        port = int(os.environ.get(PORT_ENV_VAR, DEFAULT_PORT))
    ui = args.ui
    if ui is None and os.path.isdir("frontend/dist"):
        ui = "frontend/dist"
    print(f"serving {args.file} on http://127.0.0.1:{port}")
    serve(state, port, ui)
    return EXIT_OK


_COMMANDS = {
    "info": _cmd_info,
    "tree": _cmd_tree,
    "validate": _cmd_validate,
    "export-csv": _cmd_export_csv,
    "annotate": _cmd_annotate,
    "resample": _cmd_resample,
    "synthgen": _cmd_synthgen,
    "phase-check": _cmd_phase_check,
    "serve": _cmd_serve,
}


if __name__ == "__main__":
    sys.exit(main())
