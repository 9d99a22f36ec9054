"""Per-stream timeline work: timestamp resolution, clock sync, rate audit,
gap detection, display scaling and min/max envelope tiles.

Everything here is pure over immutable inputs; callers parallelize freely.
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateError,
    MissingStampError,
    WindowError,
    XdfWarning,
)
from .model import ClockOffsetRecord, SampleBlock, StreamInfo


@dataclass
class TimestampSeries:
    stream_id: int
    times: np.ndarray
    explicit: np.ndarray  # per-sample: stamped in the file vs deduced here

    def __len__(self) -> int:
        return len(self.times)


def resolve_timestamps(blocks: list[SampleBlock], info: StreamInfo) -> TimestampSeries:
    """Fill omitted stamps as previous + 1/nominal_srate; keep explicit ones verbatim.

    Deduced stamps are produced by sequential accumulation, so
    times[i] == times[i-1] + step holds exactly in double precision.
    """
    n = sum(len(b) for b in blocks)
    times = np.zeros(n, dtype=np.float64)
    explicit = np.zeros(n, dtype=bool)
    pos = 0
    for b in blocks:
        m = len(b)
        explicit[pos:pos + m] = b.stamped
        times[pos:pos + m] = np.where(b.stamped, b.timestamps, 0.0)
        pos += m

    if n == 0:
        return TimestampSeries(info.stream_id, times, explicit)

    if info.nominal_srate <= 0:
        if not explicit.all():
            missing = int(np.flatnonzero(~explicit)[0])
            raise MissingStampError(
                f"stream {info.stream_id}: irregular-rate sample {missing} has no timestamp"
            )
        return TimestampSeries(info.stream_id, times, explicit)

    if not explicit[0]:
        raise MissingStampError(
            f"stream {info.stream_id}: first sample of a regular stream must be stamped"
        )
    step = 1.0 / info.nominal_srate
    anchors = np.flatnonzero(explicit)
    stops = np.append(anchors[1:], n)
    for a, b in zip(anchors, stops):
        if b - a < 2:
            continue
        seg = np.empty(b - a, dtype=np.float64)
        seg[0] = times[a]
        seg[1:] = step
        np.add.accumulate(seg, out=seg)
        times[a + 1:b] = seg[1:]
    return TimestampSeries(info.stream_id, times, explicit)


@dataclass
class SyncModel:
    """Piecewise-linear stream-to-recorder clock correction.

    Constant extrapolation beyond both end knots; no knots means identity.
    """

    stream_id: int
    knot_times: np.ndarray
    knot_offsets: np.ndarray

    @property
    def mode(self) -> str:
        if len(self.knot_times) == 0:
            return "identity"
        if len(self.knot_times) == 1:
            return "constant"
        return "interpolate"

    @property
    def knots(self) -> list[tuple[float, float]]:
        return list(zip(self.knot_times.tolist(), self.knot_offsets.tolist()))

    def offset_at(self, t):
        if len(self.knot_times) == 0:
            return np.zeros_like(np.asarray(t, dtype=np.float64))
        if len(self.knot_times) == 1:
            return np.full_like(np.asarray(t, dtype=np.float64), self.knot_offsets[0])
        return np.interp(t, self.knot_times, self.knot_offsets)

    def correct(self, t):
        return np.asarray(t, dtype=np.float64) + self.offset_at(t)


def build_sync_model(
    offsets: list[ClockOffsetRecord],
    stream_id: int | None = None,
    method: str = "interpolate",
) -> SyncModel:
    """Build the clock correction from measured offsets.

    ``method="linear_fit"`` replaces interpolation with a trimmed least-squares
    line through the measurements, for clocks that drift but measure noisily.
    """
    sid = stream_id if stream_id is not None else (offsets[0].stream_id if offsets else 0)
    if not offsets:
        return SyncModel(sid, np.empty(0), np.empty(0))
    t = np.array([r.collection_time for r in offsets], dtype=np.float64)
    off = np.array([r.offset for r in offsets], dtype=np.float64)
    order = np.argsort(t, kind="stable")
    t, off = t[order], off[order]
    uniq, inverse, counts = np.unique(t, return_inverse=True, return_counts=True)
    if len(uniq) != len(t):
        _warnings.warn(
            f"stream {sid}: {len(t) - len(uniq)} duplicate clock-offset times "
            "collapsed to their mean",
            XdfWarning,
            stacklevel=2,
        )
        sums = np.zeros(len(uniq))
        np.add.at(sums, inverse, off)
        off = sums / counts
        t = uniq
    if method == "linear_fit" and len(t) >= 2:
        t, off = _trimmed_line_knots(t, off)
    elif method not in ("interpolate", "linear_fit"):
        raise ValueError(f"unknown sync method {method!r}")
    return SyncModel(sid, t, off)


def _trimmed_line_knots(t: np.ndarray, off: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares line, refit after trimming the worst 20% residuals."""
    slope, intercept = np.polyfit(t, off, 1)
    resid = np.abs(off - (slope * t + intercept))
    keep = max(2, int(np.ceil(0.8 * len(t))))
    idx = np.argsort(resid, kind="stable")[:keep]
    slope, intercept = np.polyfit(t[idx], off[idx], 1)
    ends = np.array([t[0], t[-1]])
    return ends, slope * ends + intercept


def apply_sync(series: TimestampSeries, model: SyncModel) -> TimestampSeries:
    if series.stream_id != model.stream_id:
        raise ValueError(
            f"series stream {series.stream_id} != model stream {model.stream_id}"
        )
    return TimestampSeries(series.stream_id, model.correct(series.times), series.explicit)


@dataclass
class RateReport:
    stream_id: int
    nominal_srate: float
    effective_srate: float
    relative_deviation: float
    deviates: bool


def effective_rate(
    series: TimestampSeries, nominal: float, threshold: float = 0.01
) -> RateReport:
    """(N-1)/span rate check against the declared nominal rate.

    Streams with fewer than two samples report nominal as effective (warning);
    irregular streams (nominal 0) report their effective rate but never flag.
    """
    n = len(series)
    if n < 2:
        _warnings.warn(
            f"stream {series.stream_id}: fewer than 2 samples, effective rate undefined",
            XdfWarning,
            stacklevel=2,
        )
        return RateReport(series.stream_id, nominal, nominal, 0.0, False)
    span = float(series.times[-1] - series.times[0])
    if span <= 0:
        raise DegenerateError(
            f"stream {series.stream_id}: non-increasing timestamps (span {span})"
        )
    effective = (n - 1) / span
    if nominal > 0:
        deviation = abs(effective - nominal) / nominal
        return RateReport(series.stream_id, nominal, effective, deviation, deviation > threshold)
    return RateReport(series.stream_id, nominal, effective, 0.0, False)


def dejitter_timestamps(series: TimestampSeries, nominal: float) -> TimestampSeries:
    """Optional smoothing: per-segment least-squares line of time vs index.

    Off by default everywhere; recorded stamps are trusted unless the caller
    explicitly asks for this. Gap boundaries are preserved.
    """
    if nominal <= 0 or len(series) < 2:
        return series
    times = series.times.copy()
    for a, b in detect_gaps(series, nominal):
        if b - a < 2:
            continue
        idx = np.arange(b - a, dtype=np.float64)
        slope, intercept = np.polyfit(idx, times[a:b], 1)
        times[a:b] = intercept + slope * idx
    return TimestampSeries(series.stream_id, times, series.explicit)


def detect_gaps(series: TimestampSeries, nominal: float) -> list[tuple[int, int]]:
    """Contiguous segments split where dt > max(1 s, 2 sample intervals)."""
    if nominal <= 0:
        raise ValueError("gap detection needs a regular nominal rate")
    n = len(series)
    if n == 0:
        return []
    threshold = max(1.0, 2.0 / nominal)
    breaks = np.flatnonzero(np.diff(series.times) > threshold) + 1
    edges = np.concatenate(([0], breaks, [n]))
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


@dataclass
class ScaleInfo:
    offset: float
    gain: float


def auto_scale(channel) -> ScaleInfo:
    """Robust display scaling: 2nd-98th percentile range mapped onto [-1, 1]."""
    values = np.asarray(channel, dtype=np.float64)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return ScaleInfo(0.0, 1.0)
    lo, hi = np.percentile(values, [2.0, 98.0])
    if hi <= lo:
        return ScaleInfo(float(lo), 1.0)
    return ScaleInfo(float((lo + hi) / 2.0), float(2.0 / (hi - lo)))


@dataclass
class EnvelopeTile:
    bucket_index: int
    t_start: float
    t_end: float
    min_value: float
    max_value: float
    sample_count: int


def envelope_tiles(
    channel,
    series: TimestampSeries,
    t0: float,
    t1: float,
    buckets: int,
) -> list[EnvelopeTile]:
    """Equal-width min/max buckets over [t0, t1); empty buckets have count 0."""
    if t0 >= t1:
        raise WindowError(f"window [{t0}, {t1}) is empty")
    if buckets < 1:
        raise ValueError("buckets must be >= 1")
    values = np.asarray(channel, dtype=np.float64)
    times = series.times
    width = (t1 - t0) / buckets
    mask = (times >= t0) & (times < t1)
    idx = np.floor((times[mask] - t0) / width).astype(np.int64)
    np.clip(idx, 0, buckets - 1, out=idx)
    mins = np.full(buckets, np.inf)
    maxs = np.full(buckets, -np.inf)
    counts = np.zeros(buckets, dtype=np.int64)
    np.minimum.at(mins, idx, values[mask])
    np.maximum.at(maxs, idx, values[mask])
    np.add.at(counts, idx, 1)
    tiles = []
    for b in range(buckets):
        empty = counts[b] == 0
        tiles.append(
            EnvelopeTile(
                bucket_index=b,
                t_start=t0 + b * width,
                t_end=t0 + (b + 1) * width,
                min_value=0.0 if empty else float(mins[b]),
                max_value=0.0 if empty else float(maxs[b]),
                sample_count=int(counts[b]),
            )
        )
    return tiles
