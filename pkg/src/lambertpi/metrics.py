"""Peak overshoot and settling time of a unit-step response.

The final value is taken as exactly 1: integral action gives the loop unit
DC gain, so the setpoint is the reference for both metrics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotSettledError

__all__ = [
    "DEFAULT_BAND_PCT",
    "STEADY_STATE_TOL",
    "ResponseMetrics",
    "compute_metrics",
    "peak_overshoot",
    "settling_time",
]

DEFAULT_BAND_PCT = 2.0
STEADY_STATE_TOL = 1e-3


@dataclass(frozen=True)
class ResponseMetrics:
    overshoot_pct: float
    settling_time: float  # math.inf when not settled
    peak_time: float
    settled: bool
    band_pct: float = DEFAULT_BAND_PCT

    def to_dict(self) -> dict:
        return {
            "overshoot_pct": self.overshoot_pct,
            "settling_time": self.settling_time if self.settled else None,
            "settled": self.settled,
            "peak_time": self.peak_time,
            "band_pct": self.band_pct,
        }


def peak_overshoot(resp) -> tuple[float, float]:
    """Return ``(overshoot_pct, peak_time)``.

    Raises NotSettledError if the last sample is more than 1e-3 from the
    setpoint, since the overshoot of an unfinished transient is meaningless.
    """
    y = np.asarray(resp.output_y)
    if abs(y[-1] - 1.0) > STEADY_STATE_TOL:
        raise NotSettledError(
            f"response ends at y={y[-1]:.6g} at t={resp.times[-1]:.6g}; extend the horizon"
        )
    i = int(np.argmax(y))
    return max(0.0, (float(y[i]) - 1.0) * 100.0), float(resp.times[i])


def settling_time(resp, band_pct: float = DEFAULT_BAND_PCT) -> tuple[float, bool]:
    """Last exit from the ``+/- band_pct`` band around 1.

    The exit instant is linearly interpolated between the last sample
    outside the band and the next one. Returns ``(math.inf, False)`` if the
    final sample is still outside.
    """
    if not band_pct > 0:
        raise ValueError(f"band_pct must be positive, got {band_pct}")
    band = band_pct / 100.0
    y = np.asarray(resp.output_y)
    t = np.asarray(resp.times)
    outside = np.flatnonzero(np.abs(y - 1.0) > band)
    if outside.size == 0:
        return float(t[0]), True
    i = int(outside[-1])
    if i == len(y) - 1:
        return math.inf, False
    level = 1.0 + band if y[i] > 1.0 else 1.0 - band
    frac = (level - y[i]) / (y[i + 1] - y[i])
    return float(t[i] + frac * (t[i + 1] - t[i])), True


def compute_metrics(resp, band_pct: float = DEFAULT_BAND_PCT) -> ResponseMetrics:
    os_pct, t_peak = peak_overshoot(resp)
    ts, settled = settling_time(resp, band_pct)
    return ResponseMetrics(os_pct, ts, t_peak, settled, band_pct)
