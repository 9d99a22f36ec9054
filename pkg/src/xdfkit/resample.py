"""Polyphase rational-rate conversion.

The ratio to/from must be (within 1e-9) a rational L/M with denominator at
most 1000. The anti-alias/anti-image lowpass is a Kaiser-windowed sinc with
80 dB stopband and a transition band 5% of the lower Nyquist, cut at the
upsampled rate L*from_rate. Each polyphase branch is renormalized to exactly
unit DC gain, so constant signals pass through unchanged, and the group delay
is compensated so output sample k sits at time k/to_rate after the first
input sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.signal import firwin, kaiserord, upfirdn

from .errors import NoRegularStreamError, RateError
from .model import StreamInfo

RATIO_TOLERANCE = 1e-9
MAX_DENOMINATOR = 1000


@dataclass(frozen=True)
class ResamplePlan:
    from_rate: float
    to_rate: float
    up_factor: int
    down_factor: int
    filter_taps: int
    stopband_attenuation: float

    @property
    def is_identity(self) -> bool:
        return self.up_factor == 1 and self.down_factor == 1


def plan_resample(
    from_rate: float, to_rate: float, stopband_db: float = 80.0
) -> ResamplePlan:
    if not (from_rate > 0 and to_rate > 0):
        raise RateError(f"rates must be positive, got {from_rate} -> {to_rate}")
    ratio = to_rate / from_rate
    frac = Fraction(ratio).limit_denominator(MAX_DENOMINATOR)
    if frac.numerator < 1 or abs(float(frac) - ratio) > RATIO_TOLERANCE:
        raise RateError(
            f"ratio {to_rate}/{from_rate} is not a usable rational "
            f"(denominator <= {MAX_DENOMINATOR} within {RATIO_TOLERANCE})"
        )
    up, down = frac.numerator, frac.denominator
    if up == 1 and down == 1:
        return ResamplePlan(from_rate, to_rate, 1, 1, 0, stopband_db)
    taps, _ = _filter_params(up, down, stopband_db)
    return ResamplePlan(from_rate, to_rate, up, down, taps, stopband_db)


def _filter_params(up: int, down: int, stopband_db: float) -> tuple[int, float]:
    # frequencies as fractions of the upsampled Nyquist (firwin's fs=2 norm)
    lower_nyquist = min(1.0 / up, 1.0 / down)
    transition = 0.05 * lower_nyquist
    taps, beta = kaiserord(stopband_db, transition)
    taps |= 1  # odd length keeps the group delay at an integer tap
    return taps, beta


@lru_cache(maxsize=32)
def _design_filter(up: int, down: int, stopband_db: float) -> np.ndarray:
    taps, beta = _filter_params(up, down, stopband_db)
    lower_nyquist = min(1.0 / up, 1.0 / down)
    cutoff = lower_nyquist * 0.975  # stopband edge lands on the lower Nyquist
    h = firwin(taps, cutoff, window=("kaiser", beta))
    h = h * up
    # force unit DC gain per polyphase branch: constants map to constants
    for p in range(up):
        h[p::up] /= h[p::up].sum()
    h.flags.writeable = False  # cached and shared
    return h


def resample(signal, plan: ResamplePlan) -> np.ndarray:
    """Rate-convert one channel; output length is ceil(n * L / M)."""
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("resample works on one channel at a time")
    if plan.is_identity:
        return x.copy()
    if x.size == 0:
        return x.copy()
    up, down = plan.up_factor, plan.down_factor
    h = _design_filter(up, down, plan.stopband_attenuation)
    half = (len(h) - 1) // 2
    n_out = -(-(x.size * up) // down)
    # pad the filter front so its delay is a whole number of output samples
    pre_pad = (down - half % down) % down
    h_padded = np.concatenate([np.zeros(pre_pad), h]) if pre_pad else h
    skip = (half + pre_pad) // down
    y = upfirdn(h_padded, x, up, down)
    if len(y) < skip + n_out:
        y = np.concatenate([y, np.zeros(skip + n_out - len(y))])
    return y[skip:skip + n_out]


def common_rate(infos: list[StreamInfo], user_rate: float | None = None) -> float:
    """Target rate for resampling: the user's choice, else the max nominal rate."""
    regular = [i.nominal_srate for i in infos if i.nominal_srate > 0]
    if not regular:
        raise NoRegularStreamError("no regular-rate stream to derive a common rate from")
    if user_rate is not None:
        if user_rate <= 0:
            raise RateError(f"common rate must be positive, got {user_rate}")
        return float(user_rate)
    return float(max(regular))
