"""Gamma-based PI tuning, the gamma sweep, and the CHR comparison.

Overshoot depends on gamma alone (the reduced loop is a function of ``t/L``),
so the overshoot-to-gamma inversion runs once on the normalized loop with
``L = 1`` and the resulting gamma is mapped to any plant through
``gains_from_gamma``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

from scipy.optimize import bisect

from .errors import DomainError, UnreachableTargetError
from .metrics import DEFAULT_BAND_PCT, STEADY_STATE_TOL, ResponseMetrics, compute_metrics
from .model import FotdPlant, PiGains, PolePair, closed_loop_poles, gains_from_gamma
from .schemas import SWEEP_CSV_HEADER
from .simulator import (
    DEFAULT_HORIZON_DELAYS,
    DEFAULT_STEPS_PER_DELAY,
    SimConfig,
    settling_horizon,
    simulate_general,
    simulate_reduced,
)

__all__ = [
    "CHR_NO_OVERSHOOT",
    "CHR_OVERSHOOT_20",
    "GAMMA_NO_OVERSHOOT",
    "GAMMA_OVERSHOOT_20",
    "SCHEMA_VERSION",
    "ComparisonRow",
    "ComparisonTable",
    "SweepRow",
    "TuningReport",
    "TuningSpec",
    "chr_compare",
    "normalized_overshoot",
    "sweep",
    "sweep_to_csv",
    "tune_no_overshoot",
    "tune_target_overshoot",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"

# Published CHR PI set-point rules, as (kp * K*L/T, ki * K*L).
CHR_NO_OVERSHOOT = (0.35, 0.29)
CHR_OVERSHOOT_20 = (0.6, 0.6)

GAMMA_NO_OVERSHOOT = 1.0
GAMMA_OVERSHOOT_20 = 1.8837

# overshoot inversion bracket and tolerance
GAMMA_LOW = 1.0 + 1e-3
GAMMA_HIGH = 3.0
GAMMA_XTOL = 1e-4
MAX_TARGET_PCT = 40.0
# targets below this are not resolved by the simulation and get clamped
OVERSHOOT_RESOLUTION_PCT = 1e-3


@dataclass(frozen=True)
class TuningSpec:
    kind: str  # "no_overshoot" or "target_overshoot"
    target_pct: float | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "target_pct": self.target_pct}


@dataclass(frozen=True)
class ComparisonRow:
    method: str  # "chr" or "lambert_w"
    case: str  # "no_overshoot" or "overshoot_20"
    kp_coef: float  # kp * K * L / T
    ki_coef: float  # ki * K * L
    gains: PiGains
    gamma: float  # K * ki * e * L
    metrics: ResponseMetrics

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "case": self.case,
            "kp_coef": self.kp_coef,
            "ki_coef": self.ki_coef,
            "gains": {"kp": self.gains.kp, "ki": self.gains.ki},
            "gamma": self.gamma,
            "metrics": self.metrics.to_dict(),
        }


@dataclass
class TuningReport:
    plant: FotdPlant
    spec: TuningSpec
    gamma: float
    gains: PiGains
    poles: PolePair
    metrics: ResponseMetrics
    chr: ComparisonRow | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "plant": {"K": self.plant.K, "T": self.plant.T, "L": self.plant.L},
            "spec": self.spec.to_dict(),
            "gamma": self.gamma,
            "regime": self.poles.regime.value,
            "gains": {"kp": self.gains.kp, "ki": self.gains.ki},
            "poles": [{"re": s.real, "im": s.imag} for s in self.poles],
            "metrics": self.metrics.to_dict(),
            "chr": None if self.chr is None else self.chr.to_dict(),
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)


@dataclass(frozen=True)
class SweepRow:
    gamma: float
    overshoot_pct: float
    ts_over_L: float
    settled: bool = True


def _require_positive_gain(plant: FotdPlant):
    if not plant.K > 0:
        raise DomainError(f"tuning rules assume a positive process gain, got K={plant.K}")


def _steady_response(plant, gains, cfg, max_doublings=4):
    resp = simulate_general(plant, gains, cfg)
    for _ in range(max_doublings):
        if abs(resp.output_y[-1] - 1.0) <= STEADY_STATE_TOL:
            break
        cfg = cfg.with_horizon(2.0 * cfg.horizon)
        resp = simulate_general(plant, gains, cfg)
    return resp


def _plant_config(plant, gamma=None, step_h=None, horizon=None):
    cfg = SimConfig.for_plant(plant, step_h=step_h, horizon=horizon)
    if horizon is None and gamma is not None and gamma < math.e * math.pi / 2:
        cfg = cfg.with_horizon(max(cfg.horizon, settling_horizon(gamma, plant.L)))
    return cfg


def _simulated_metrics(plant, gains, gamma, band_pct, step_h, horizon):
    cfg = _plant_config(plant, gamma, step_h, horizon)
    return compute_metrics(_steady_response(plant, gains, cfg), band_pct)


def _chr_row(plant, case, band_pct, step_h=None, horizon=None) -> ComparisonRow:
    a, b = CHR_NO_OVERSHOOT if case == "no_overshoot" else CHR_OVERSHOOT_20
    K, T, L = plant.K, plant.T, plant.L
    gains = PiGains(kp=a * T / (K * L), ki=b / (K * L))
    gamma = K * gains.ki * math.e * L
    cfg = SimConfig.for_plant(plant, step_h=step_h, horizon=horizon)
    metrics = compute_metrics(_steady_response(plant, gains, cfg), band_pct)
    return ComparisonRow("chr", case, a, b, gains, gamma, metrics)


def _lambert_row(plant, case, gamma, band_pct, step_h=None, horizon=None) -> ComparisonRow:
    gains = gains_from_gamma(plant, gamma)
    metrics = _simulated_metrics(plant, gains, gamma, band_pct, step_h, horizon)
    K, T, L = plant.K, plant.T, plant.L
    return ComparisonRow(
        "lambert_w", case, gains.kp * K * L / T, gains.ki * K * L, gains, gamma, metrics
    )


@lru_cache(maxsize=4096)
def normalized_overshoot(gamma: float, steps_per_delay: int = DEFAULT_STEPS_PER_DELAY) -> float:
    """Peak overshoot (%) of the reduced loop with ``L = 1`` at ``gamma``."""
    cfg = SimConfig.for_delay(1.0, step_h=1.0 / steps_per_delay, horizon=settling_horizon(gamma, 1.0))
    y = simulate_reduced(gamma / math.e, 1.0, cfg).output_y
    return max(0.0, (float(y.max()) - 1.0) * 100.0)


def tune_no_overshoot(plant: FotdPlant, band_pct=DEFAULT_BAND_PCT, step_h=None, horizon=None) -> TuningReport:
    """Critically damped tuning, ``gamma = 1``: ``kp = T/(e K L)``, ``ki = 1/(e K L)``."""
    _require_positive_gain(plant)
    gamma = GAMMA_NO_OVERSHOOT
    gains = gains_from_gamma(plant, gamma)
    return TuningReport(
        plant=plant,
        spec=TuningSpec("no_overshoot"),
        gamma=gamma,
        gains=gains,
        poles=closed_loop_poles(plant, gamma),
        metrics=_simulated_metrics(plant, gains, gamma, band_pct, step_h, horizon),
        chr=_chr_row(plant, "no_overshoot", band_pct, step_h, horizon),
    )


def tune_target_overshoot(
    plant: FotdPlant, target_pct: float, band_pct=DEFAULT_BAND_PCT, step_h=None, horizon=None
) -> TuningReport:
    """Find gamma in (1, 3] whose step response overshoots by ``target_pct``.

    Overshoot grows monotonically with gamma above 1, so plain bisection on
    the normalized loop is enough. Targets below 1e-3 % or below what
    ``gamma = 1 + 1e-3`` already produces are clamped to that gamma and
    flagged in ``warnings``.
    """
    _require_positive_gain(plant)
    if not 0 < target_pct <= MAX_TARGET_PCT:
        raise DomainError(f"target overshoot must be in (0, {MAX_TARGET_PCT:g}] %, got {target_pct}")
    warnings = []
    os_low = normalized_overshoot(GAMMA_LOW)
    os_high = normalized_overshoot(GAMMA_HIGH)
    if target_pct > os_high:
        raise UnreachableTargetError(
            f"target {target_pct}% exceeds the {os_high:.3f}% overshoot at gamma={GAMMA_HIGH:g}"
        )
    if target_pct <= max(os_low, OVERSHOOT_RESOLUTION_PCT):
        gamma = GAMMA_LOW
        msg = (
            f"target {target_pct}% is below the overshoot resolution "
            f"({max(os_low, OVERSHOOT_RESOLUTION_PCT):.3g}%); clamped to gamma={GAMMA_LOW}"
        )
        log.warning(msg)
        warnings.append(msg)
    else:
        gamma = bisect(lambda g: normalized_overshoot(g) - target_pct, GAMMA_LOW, GAMMA_HIGH, xtol=GAMMA_XTOL)

    gains = gains_from_gamma(plant, gamma)
    chr_row = _chr_row(plant, "overshoot_20", band_pct, step_h, horizon) if target_pct == 20 else None
    return TuningReport(
        plant=plant,
        spec=TuningSpec("target_overshoot", float(target_pct)),
        gamma=gamma,
        gains=gains,
        poles=closed_loop_poles(plant, gamma),
        metrics=_simulated_metrics(plant, gains, gamma, band_pct, step_h, horizon),
        chr=chr_row,
        warnings=warnings,
    )


def _sweep_row(gamma, band_pct, steps_per_delay, min_horizon):
    horizon = max(min_horizon, settling_horizon(gamma, 1.0))
    cfg = SimConfig.for_delay(1.0, step_h=1.0 / steps_per_delay, horizon=horizon)
    resp = simulate_reduced(gamma / math.e, 1.0, cfg)
    m = compute_metrics(resp, band_pct)
    return SweepRow(gamma, m.overshoot_pct, m.settling_time, m.settled)


def sweep(
    gamma_min: float,
    gamma_max: float,
    step: float,
    band_pct=DEFAULT_BAND_PCT,
    steps_per_delay=DEFAULT_STEPS_PER_DELAY,
    min_horizon=DEFAULT_HORIZON_DELAYS,
    workers: int | None = None,
) -> list[SweepRow]:
    """Overshoot and ``Ts/L`` on the gamma grid ``gamma_min, gamma_min + step, ...``.

    Each row runs the normalized reduced loop. The horizon is stretched past
    ``min_horizon`` delays when the slowest pole needs it, which is what
    lets overdamped rows down to gamma = 0.1 actually settle.
    """
    if not 0 < gamma_min < gamma_max:
        raise DomainError("sweep needs 0 < gamma_min < gamma_max")
    if not step > 0:
        raise DomainError("sweep step must be positive")
    n = int(math.floor((gamma_max - gamma_min) / step + 1e-9)) + 1
    gammas = [round(gamma_min + i * step, 12) for i in range(n)]
    if any(not g < math.e * math.pi / 2 for g in gammas):
        raise DomainError("gamma grid reaches the stability limit e*pi/2")

    def run(g):
        return _sweep_row(g, band_pct, steps_per_delay, min_horizon)

    if workers == 1:
        return [run(g) for g in gammas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, gammas))


def sweep_to_csv(rows, fh=None):
    out = io.StringIO() if fh is None else fh
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for r in rows:
        writer.writerow([f"{r.gamma:.17g}", f"{r.overshoot_pct:.17g}", f"{r.ts_over_L:.17g}"])
    return out.getvalue() if fh is None else None


# published CHR-comparison multipliers carry this many decimals
_PUBLISHED_DECIMALS = {"no_overshoot": 2, "overshoot_20": 1}


@dataclass
class ComparisonTable:
    plant: FotdPlant
    rows: list[ComparisonRow]

    def row(self, method: str, case: str) -> ComparisonRow:
        for r in self.rows:
            if r.method == method and r.case == case:
                return r
        raise KeyError((method, case))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "plant": {"K": self.plant.K, "T": self.plant.T, "L": self.plant.L},
            "rows": [r.to_dict() for r in self.rows],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False)

    def to_csv(self, fh=None):
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(
            ["method", "case", "kp_coef", "ki_coef", "kp", "ki", "gamma", "overshoot_pct", "settling_time", "settled"]
        )
        for r in self.rows:
            m = r.metrics
            writer.writerow(
                [r.method, r.case]
                + [f"{v:.17g}" for v in (r.kp_coef, r.ki_coef, r.gains.kp, r.gains.ki, r.gamma)]
                + [f"{m.overshoot_pct:.17g}", f"{m.settling_time:.17g}", str(m.settled).lower()]
            )
        return out.getvalue() if fh is None else None

    def format_table(self) -> str:
        """Human-readable table with multipliers at the published precision."""
        lines = [
            f"{'method':<10} {'case':<13} {'kp*KL/T':>8} {'ki*KL':>8} {'gamma':>8} {'OS %':>8} {'Ts/L':>8}"
        ]
        for r in self.rows:
            d = _PUBLISHED_DECIMALS[r.case]
            ts = r.metrics.settling_time / self.plant.L
            lines.append(
                f"{r.method:<10} {r.case:<13} {r.kp_coef:>8.{d}f} {r.ki_coef:>8.{d}f} "
                f"{r.gamma:>8.4f} {r.metrics.overshoot_pct:>8.3f} {ts:>8.3f}"
            )
        return "\n".join(lines)


def chr_compare(plant: FotdPlant, band_pct=DEFAULT_BAND_PCT, step_h=None, horizon=None) -> ComparisonTable:
    """Simulate CHR and Lambert W tunings for both cases on ``plant``.

    All four rows go through the general loop, since the CHR gains do not
    satisfy ``kp = T*ki``.
    """
    _require_positive_gain(plant)
    rows = [
        _chr_row(plant, "no_overshoot", band_pct, step_h, horizon),
        _chr_row(plant, "overshoot_20", band_pct, step_h, horizon),
        _lambert_row(plant, "no_overshoot", GAMMA_NO_OVERSHOOT, band_pct, step_h, horizon),
        _lambert_row(plant, "overshoot_20", GAMMA_OVERSHOOT_20, band_pct, step_h, horizon),
    ]
    return ComparisonTable(plant, rows)

