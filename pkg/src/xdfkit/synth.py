"""Simulated phase-prediction experiment and its post-hoc verifier.

``generate`` builds a five-stream recording: the noisy oscillation, a
zero-phase band-passed copy, the instantaneous phase estimate, the phase
extrapolated by the prediction horizon, and a marker stream with one trigger
per upward crossing of the target phase. ``verify`` replays the recording,
re-estimates the true phase at every trigger with an independent centered fit,
and reports circular error statistics.

Phase estimation is a single-frequency least-squares fit y ~ a*cos + b*sin
over a trailing window; the fitted signal equals A*sin(2*pi*f*tau + phi) at
the window end with phi = atan2(a, b). Prediction is linear extrapolation:
phi + 2*pi*f*horizon, wrapped to (-pi, pi].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import butter, sosfiltfilt

from .errors import (
    ConfigError,
    EdgeError,
    MissingStreamError,
    PhaseUndefinedError,
    WindowError,
)
from .model import (
    ChannelFormat,
    ClockOffsetRecord,
    Recording,
    SampleBlock,
    StreamData,
    StreamInfo,
)
from .timeline import apply_sync, build_sync_model, resolve_timestamps
from .xmltree import XmlNode

TRIGGER_LABEL = "trigger"


def wrap_phase(x):
    """Wrap angle(s) to the half-open interval (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=np.float64), 2.0 * np.pi)


@dataclass(frozen=True)
class SynthConfig:
    duration: float = 60.0
    srate: float = 500.0
    osc_freq: float = 10.0
    noise_sigma: float = 0.5
    horizon: float = 0.2
    target_phase: float = 0.0
    seed: int = 0
    window: float = 0.5
    clock_drift: float = 0.0

    def validate(self) -> None:
        if not (0 < self.osc_freq < self.srate / 2):
            raise ConfigError(
                f"osc_freq must be in (0, srate/2), got {self.osc_freq} at {self.srate} Hz"
            )
        if self.horizon < 0:
            raise ConfigError(f"horizon must be >= 0, got {self.horizon}")
        if self.window <= 2.0 / self.osc_freq:
            raise ConfigError(
                f"window must exceed two cycles ({2.0 / self.osc_freq:.3f} s), "
                f"got {self.window}"
            )
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if not (-math.pi <= self.target_phase < math.pi):
            raise ConfigError(f"target_phase must lie in [-pi, pi), got {self.target_phase}")
        if self.duration < max(2.0 * self.window, 0.5):
            raise ConfigError(f"duration {self.duration} too short for the fit window")
        if abs(self.clock_drift) >= 0.5:
            raise ConfigError(f"clock_drift {self.clock_drift} is not a plausible clock")


def _basis(length: int, srate: float, f: float) -> tuple[np.ndarray, np.ndarray]:
    """cos/sin basis on the trailing window, time relative to the window end."""
    tau = (np.arange(length) - (length - 1)) / srate
    w = 2.0 * np.pi * f
    return np.cos(w * tau), np.sin(w * tau)


def _solve_phase(c, s, p, q):
    """2x2 normal equations for y ~ a*cos + b*sin given p = y.c and q = y.s."""
    cc = float(c @ c)
    ss = float(s @ s)
    cs = float(c @ s)
    det = cc * ss - cs * cs
    a = (ss * p - cs * q) / det
    b = (cc * q - cs * p) / det
    return a, b


def predict_phase(window_samples, srate: float, f: float, horizon: float) -> float:
    """Phase at the window end, extrapolated ``horizon`` seconds ahead."""
    y = np.asarray(window_samples, dtype=np.float64)
    if y.ndim != 1:
        raise WindowError("window must be one-dimensional")
    if (len(y) - 1) / srate < 2.0 / f - 1e-12:
        raise WindowError(
            f"window of {len(y)} samples at {srate} Hz is shorter than 2 cycles of {f} Hz"
        )
    c, s = _basis(len(y), srate, f)
    a, b = _solve_phase(c, s, float(y @ c), float(y @ s))
    phi = math.atan2(a, b)
    return float(wrap_phase(phi + 2.0 * np.pi * f * horizon))


def sliding_phase(signal, srate: float, f: float, window: float, horizon: float) -> np.ndarray:
    """predict_phase evaluated at every index where the trailing window fits.

    Output k corresponds to signal index k + win_len - 1; identical math to
    predict_phase, vectorized with one matrix product.
    """
    y = np.asarray(signal, dtype=np.float64)
    win_len = int(round(window * srate))
    if win_len < 2 or win_len > len(y):
        raise WindowError(f"window of {win_len} samples does not fit signal of {len(y)}")
    c, s = _basis(win_len, srate, f)
    cc, ss, cs = float(c @ c), float(s @ s), float(c @ s)
    det = cc * ss - cs * cs
    windows = np.lib.stride_tricks.sliding_window_view(y, win_len)
    p = windows @ c
    q = windows @ s
    a = (ss * p - cs * q) / det
    b = (cc * q - cs * p) / det
    return wrap_phase(np.arctan2(a, b) + 2.0 * np.pi * f * horizon)


def oracle_phase(signal, srate: float, f: float, t: float) -> float:
    """Ground-truth estimator: symmetric 4-cycle fit centered at ``t``.

    Deliberately windowed differently from predict_phase so the two stay
    independent checks of each other.
    """
    y = np.asarray(signal, dtype=np.float64)
    half = 2.0 / f
    t_end = (len(y) - 1) / srate
    if t < half - 1e-9 or t > t_end - half + 1e-9:
        raise EdgeError(f"t={t:.4f} closer than {half:.4f} s to a signal edge")
    i_lo = int(np.ceil((t - half) * srate - 1e-9))
    i_hi = int(np.floor((t + half) * srate + 1e-9))
    idx = np.arange(i_lo, i_hi + 1)
    tau = idx / srate - t
    w = 2.0 * np.pi * f
    c, s = np.cos(w * tau), np.sin(w * tau)
    seg = y[i_lo:i_hi + 1]
    a, b = _solve_phase(c, s, float(seg @ c), float(seg @ s))
    if math.hypot(a, b) < 1e-12:
        raise PhaseUndefinedError(f"no oscillation at {f} Hz around t={t:.4f}")
    return float(wrap_phase(math.atan2(a, b)))


def _find_triggers(
    pred: np.ndarray, times: np.ndarray, target: float, f: float, horizon: float
) -> np.ndarray:
    """Interpolated upward crossings of the target phase, one per cycle."""
    d = wrap_phase(pred - target)
    rising = (d[:-1] < 0) & (d[1:] >= 0) & (d[1:] - d[:-1] < np.pi)
    candidates = np.flatnonzero(rising)
    refractory = (1.0 / f) * (1.0 - 1e-6)  # slack keeps exact one-per-cycle spacing
    out = []
    last = -np.inf
    for i in candidates:
        frac = -d[i] / (d[i + 1] - d[i])
        t_cross = times[i] + frac * (times[i + 1] - times[i])
        if t_cross - last >= refractory:
            out.append(t_cross + horizon)
            last = t_cross
    return np.asarray(out)


def _chunked_blocks(
    sid: int, values: np.ndarray, times_local: np.ndarray, block_len: int
) -> list[SampleBlock]:
    """Per-second chunks with only the first sample of each chunk stamped."""
    blocks = []
    for start in range(0, len(values), block_len):
        chunk = values[start:start + block_len]
        stamped = np.zeros(len(chunk), dtype=bool)
        stamped[0] = True
        timestamps = np.zeros(len(chunk))
        timestamps[0] = times_local[start]
        blocks.append(SampleBlock(sid, chunk.reshape(-1, 1), timestamps, stamped))
    return blocks


_STAGES = (
    ("raw", "EEG"),
    ("filtered", "EEG"),
    ("phase", "Phase"),
    ("predicted-phase", "Phase"),
    ("triggers", "Markers"),
)


def generate(config: SynthConfig) -> Recording:
    """Simulate the five processing stages into one multi-stream recording."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    srate, f = config.srate, config.osc_freq
    n = int(round(config.duration * srate))
    t = np.arange(n) / srate
    phi0 = float(rng.uniform(-np.pi, np.pi))
    raw = np.sin(2.0 * np.pi * f * t + phi0) + rng.normal(0.0, config.noise_sigma, n)

    # stage 2: zero-phase band-pass around the oscillation (8-12 Hz at f=10)
    band = (0.8 * f, min(1.2 * f, 0.49 * srate))
    sos = butter(4, band, btype="bandpass", fs=srate, output="sos")
    filtered = sosfiltfilt(sos, raw)

    # phase at every sample: trailing-window fits once the window is full,
    # backward linear extrapolation from the first fit during the warmup, so
    # the phase streams span the whole recording (one trigger per cycle)
    win_len = int(round(config.window * srate))
    fitted = sliding_phase(raw, srate, f, config.window, 0.0)
    warmup = wrap_phase(
        fitted[0] - 2.0 * np.pi * f * (np.arange(win_len - 1, 0, -1) / srate)
    )
    phase_now = np.concatenate([warmup, fitted])
    phase_pred = wrap_phase(phase_now + 2.0 * np.pi * f * config.horizon)
    trigger_times = _find_triggers(phase_pred, t, config.target_phase, f, config.horizon)

    drift = config.clock_drift
    to_local = (lambda x: x / (1.0 + drift)) if drift else (lambda x: x)

    streams: dict[int, StreamData] = {}
    block_len = max(int(round(srate)), 1)
    numeric = [
        (1, raw, t, srate),
        (2, filtered, t, srate),
        (3, phase_now, t, srate),
        (4, phase_pred, t, srate),
    ]
    for sid, values, times, rate in numeric:
        name, ctype = _STAGES[sid - 1]
        info = _stage_info(sid, name, ctype, rate, ChannelFormat.DOUBLE64)
        data = StreamData(info)
        local = to_local(times)
        data.blocks = _chunked_blocks(sid, values.astype("<f8"), local, block_len)
        streams[sid] = data

    name, ctype = _STAGES[4]
    info = _stage_info(5, name, ctype, 0.0, ChannelFormat.STRING)
    marker = StreamData(info)
    local_triggers = to_local(trigger_times)
    marker.blocks = [
        SampleBlock(
            5,
            [[TRIGGER_LABEL] for _ in local_triggers],
            np.asarray(local_triggers, dtype=np.float64),
            np.ones(len(local_triggers), dtype=bool),
        )
    ]
    streams[5] = marker

    knot_times = np.arange(0.0, config.duration + 5.0, 5.0)
    for sid, data in streams.items():
        data.offsets = [
            ClockOffsetRecord(sid, float(k), float(drift * k)) for k in knot_times
        ]
        _attach_footer(data)

    return Recording(
        file_header=XmlNode("info", "", [XmlNode("version", "1.0")]),
        streams=streams,
        boundary_offsets=[0],
    )


def _stage_info(
    sid: int, name: str, ctype: str, srate: float, fmt: ChannelFormat
) -> StreamInfo:
    srate_text = repr(float(srate)) if srate else "0"
    tree = XmlNode(
        "info",
        "",
        [
            XmlNode("name", name),
            XmlNode("type", ctype),
            XmlNode("channel_count", "1"),
            XmlNode("nominal_srate", srate_text),
            XmlNode("channel_format", fmt.value),
        ],
    )
    return StreamInfo(sid, name, ctype, 1, srate, fmt, tree)


def _attach_footer(data: StreamData) -> None:
    from .events import format_float
    from .model import StreamFooter

    series = resolve_timestamps(data.blocks, data.info)
    if len(series) == 0:
        first = last = 0.0
    else:
        first, last = float(series.times[0]), float(series.times[-1])
    tree = XmlNode(
        "info",
        "",
        [
            XmlNode("first_timestamp", format_float(first)),
            XmlNode("last_timestamp", format_float(last)),
            XmlNode("sample_count", str(data.sample_count)),
        ],
    )
    data.info.footer = StreamFooter(first, last, data.sample_count, tree)


@dataclass
class PhaseSample:
    event_time: float
    true_phase: float
    error: float


@dataclass
class PhaseReport:
    per_event: list[PhaseSample] = field(default_factory=list)
    circular_mean_error: float = math.nan
    circular_std: float = math.nan
    n_events: int = 0
    n_skipped: int = 0

    @property
    def defined(self) -> bool:
        return self.n_events > 0


def circular_stats(errors: np.ndarray) -> tuple[float, float]:
    """Mean direction and circular std from the resultant of unit phasors."""
    z = np.exp(1j * np.asarray(errors, dtype=np.float64)).mean()
    mean = float(wrap_phase(math.atan2(z.imag, z.real)))
    r = min(abs(z), 1.0)  # |z| can tip past 1 by an ulp when errors coincide
    std = math.sqrt(max(0.0, -2.0 * math.log(r))) if r > 0 else math.inf
    return mean, std


def verify(rec: Recording, target_phase: float, f: float) -> PhaseReport:
    """Check that recorded triggers landed on the target phase of the raw signal."""
    raw = _find_raw_stream(rec)
    markers = rec.marker_streams()
    if not markers:
        raise MissingStreamError("recording has no marker stream to verify")

    srate = raw.info.nominal_srate
    raw_series = apply_sync(
        resolve_timestamps(raw.blocks, raw.info),
        build_sync_model(raw.offsets, raw.info.stream_id),
    )
    signal = raw.column(0).astype(np.float64)
    t0 = float(raw_series.times[0]) if len(raw_series) else 0.0

    onsets: list[float] = []
    for stream in markers:
        series = apply_sync(
            resolve_timestamps(stream.blocks, stream.info),
            build_sync_model(stream.offsets, stream.info.stream_id),
        )
        onsets.extend(float(x) for x in series.times)
    onsets.sort()

    per_event: list[PhaseSample] = []
    skipped = 0
    for onset in onsets:
        try:
            true_phase = oracle_phase(signal, srate, f, onset - t0)
        except (EdgeError, PhaseUndefinedError):
            skipped += 1
            continue
        error = float(wrap_phase(true_phase - target_phase))
        per_event.append(PhaseSample(onset, true_phase, error))

    if not per_event:
        return PhaseReport([], math.nan, math.nan, 0, skipped)
    mean, std = circular_stats(np.array([p.error for p in per_event]))
    return PhaseReport(per_event, mean, std, len(per_event), skipped)


def _find_raw_stream(rec: Recording) -> StreamData:
    named = [
        s
        for s in rec.streams.values()
        if s.info.name == "raw" and s.info.channel_format.is_numeric
    ]
    if named:
        return named[0]
    regular = [
        s
        for s in rec.numeric_streams()
        if s.info.nominal_srate > 0 and s.sample_count > 0
    ]
    if not regular:
        raise MissingStreamError("recording has no regular numeric stream to verify against")
    return min(regular, key=lambda s: s.info.stream_id)
