"""Unit-step response of the PI + FOTD loop by fixed-step RK4.

Two loop forms are integrated:

* ``general``: plant and PI controller in state form, valid for any gains.
* ``reduced``: ``y' = A (r(t-L) - y(t-L))`` with ``A = K*ki``, which is the
  same loop once ``kp = T*ki`` cancels the plant pole.

``method_of_steps_reference`` builds the exact piecewise-polynomial
solution of the reduced loop and serves as an independent check.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
from numpy.polynomial import Polynomial

from . import _kernels
from .errors import DomainError, UnstableResponseError
from .lambertw import Branch, lambert_w
from .model import FotdPlant, PiGains
from .schemas import STEP_RESPONSE_CSV_HEADER

__all__ = [
    "DEFAULT_HORIZON_DELAYS",
    "DEFAULT_STEPS_PER_DELAY",
    "LoopForm",
    "SimConfig",
    "StepResponse",
    "method_of_steps_reference",
    "settling_horizon",
    "simulate",
    "simulate_general",
    "simulate_reduced",
]

DEFAULT_STEPS_PER_DELAY = 500
DEFAULT_HORIZON_DELAYS = 40.0
MIN_HORIZON_DELAYS = 10.0


class LoopForm(str, Enum):
    GENERAL = "general"
    REDUCED = "reduced"


@dataclass(frozen=True)
class SimConfig:
    """Integration step, end time and loop form.

    ``step_h`` must divide the plant delay; use :meth:`for_plant` or
    :meth:`for_delay` to get a config with that enforced.
    """

    step_h: float
    horizon: float
    loop_form: LoopForm = LoopForm.GENERAL

    @classmethod
    def for_delay(cls, L, step_h=None, horizon=None, loop_form=LoopForm.GENERAL, T=None):
        if step_h is None:
            base = L if T is None else min(T, L)
            step_h = base / DEFAULT_STEPS_PER_DELAY
        if not step_h > 0:
            raise DomainError(f"step_h must be positive, got {step_h}")
        n_delay = max(1, round(L / step_h))
        step_h = L / n_delay
        if horizon is None:
            horizon = DEFAULT_HORIZON_DELAYS * L
        return cls(step_h=step_h, horizon=float(horizon), loop_form=LoopForm(loop_form))

    @classmethod
    def for_plant(cls, plant: FotdPlant, step_h=None, horizon=None, loop_form=LoopForm.GENERAL):
        return cls.for_delay(plant.L, step_h, horizon, loop_form, T=plant.T)

    def with_horizon(self, horizon: float) -> "SimConfig":
        return replace(self, horizon=float(horizon))

    def delay_steps(self, L: float) -> int:
        """Number of steps per delay; raises if the config is unusable for ``L``."""
        if not self.step_h > 0:
            raise DomainError(f"step_h must be positive, got {self.step_h}")
        if self.horizon < MIN_HORIZON_DELAYS * L * (1 - 1e-12):
            raise DomainError(f"horizon {self.horizon} is shorter than {MIN_HORIZON_DELAYS:g} delays")
        n = round(L / self.step_h)
        if n < 1 or abs(n * self.step_h - L) > 1e-9 * L:
            raise DomainError(f"step_h={self.step_h!r} does not divide the delay L={L!r}")
        return n

    def n_steps(self) -> int:
        return int(round(self.horizon / self.step_h))


@dataclass
class StepResponse:
    """Sampled closed-loop step response (setpoint 1 from ``t = 0``)."""

    times: np.ndarray
    output_y: np.ndarray
    control_u: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def step_h(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def to_csv(self, fh=None):
        """Write ``t,y,u`` rows at 17 significant digits.

        Returns the text when ``fh`` is None.
        """
        out = io.StringIO() if fh is None else fh
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(STEP_RESPONSE_CSV_HEADER)
        for t, y, u in zip(self.times, self.output_y, self.control_u):
            writer.writerow([f"{t:.17g}", f"{y:.17g}", f"{u:.17g}"])
        if fh is None:
            return out.getvalue()
        return None

    @classmethod
    def from_csv(cls, fh) -> "StepResponse":
        reader = csv.reader(fh)
        header = next(reader)
        if header != STEP_RESPONSE_CSV_HEADER:
            raise ValueError(f"unexpected step-response header {header!r}")
        data = np.array([[float(v) for v in row] for row in reader if row])
        return cls(data[:, 0].copy(), data[:, 1].copy(), data[:, 2].copy())


def _time_grid(cfg: SimConfig) -> np.ndarray:
    return np.arange(cfg.n_steps() + 1) * cfg.step_h


def _check_status(status: int, times: np.ndarray):
    if status >= 0:
        t = float(times[status])
        raise UnstableResponseError(f"|y| exceeded {_kernels.DIVERGENCE_LIMIT:g} at t={t:.6g}", time=t)


def simulate_general(plant: FotdPlant, gains: PiGains, cfg: SimConfig | None = None) -> StepResponse:
    if cfg is None:
        cfg = SimConfig.for_plant(plant)
    n_delay = cfg.delay_steps(plant.L)
    times = _time_grid(cfg)
    x, q, status = _kernels.general_loop(
        float(plant.K), float(plant.T), float(gains.kp), float(gains.ki), n_delay, cfg.step_h, len(times) - 1
    )
    _check_status(status, times)
    u = gains.kp * (1.0 - x) + gains.ki * q
    return StepResponse(times, x, u, meta={"loop_form": LoopForm.GENERAL.value})


def simulate_reduced(A: float, L: float, cfg: SimConfig | None = None) -> StepResponse:
    """Step response of ``y' = A (r(t-L) - y(t-L))``.

    ``control_u`` holds the undelayed drive ``A (r - y)``.
    """
    if not A > 0:
        raise DomainError(f"loop gain A = K*ki must be positive, got {A}")
    if not L > 0:
        raise DomainError(f"delay must be positive, got {L}")
    if cfg is None:
        cfg = SimConfig.for_delay(L, loop_form=LoopForm.REDUCED)
    n_delay = cfg.delay_steps(L)
    times = _time_grid(cfg)
    y, status = _kernels.reduced_loop(float(A), n_delay, cfg.step_h, len(times) - 1)
    _check_status(status, times)
    return StepResponse(times, y, A * (1.0 - y), meta={"loop_form": LoopForm.REDUCED.value})


def simulate(plant: FotdPlant, gains: PiGains, cfg: SimConfig | None = None) -> StepResponse:
    """Dispatch on ``cfg.loop_form``; the reduced form demands ``kp = T*ki``."""
    if cfg is None:
        cfg = SimConfig.for_plant(plant)
    if cfg.loop_form is LoopForm.REDUCED:
        if not math.isclose(gains.kp, plant.T * gains.ki, rel_tol=1e-12, abs_tol=0.0):
            raise DomainError("reduced loop form requires kp = T*ki")
        return simulate_reduced(plant.K * gains.ki, plant.L, cfg)
    return simulate_general(plant, gains, cfg)


def method_of_steps_reference(A: float, L: float, n_segments: int, step_h: float | None = None) -> StepResponse:
    """Exact solution of the reduced loop on ``[0, n_segments*L]``.

    On segment ``k`` (``t = kL + tau``) the solution is the polynomial
    ``p_k(tau) = p_{k-1}(L) + A * integral_0^tau (1 - p_{k-1}(s)) ds``
    with ``p_0 = 0``, so segment ``k`` has degree ``k``.
    """
    if n_segments < 2:
        raise DomainError("method of steps needs at least two segments")
    if n_segments > 6:
        raise DomainError("method of steps reference is limited to six segments")
    if step_h is None:
        step_h = L / DEFAULT_STEPS_PER_DELAY
    n_delay = max(1, round(L / step_h))
    step_h = L / n_delay

    pieces = [Polynomial([0.0])]
    for _ in range(1, n_segments):
        prev = pieces[-1]
        pieces.append(prev(L) + (A * (1.0 - prev)).integ())

    n = n_segments * n_delay + 1
    idx = np.arange(n)
    seg = np.minimum(idx // n_delay, n_segments - 1)
    tau = (idx - seg * n_delay) * step_h
    y = np.empty(n)
    for k, p in enumerate(pieces):
        mask = seg == k
        y[mask] = p(tau[mask])
    times = idx * step_h
    return StepResponse(times, y, A * (1.0 - y), meta={"loop_form": "method_of_steps"})


def settling_horizon(gamma: float, L: float, decades: float = 5.0) -> float:
    """Horizon long enough for the slowest mode to decay ``decades`` decades.

    Never shorter than the default ``40 L``; overdamped loops with small
    gamma have a dominant pole near zero and need far longer.
    """
    z0 = lambert_w(Branch.PRINCIPAL, -gamma / math.e)
    rate = -z0.real
    if not rate > 0:
        raise DomainError(f"gamma={gamma} gives a non-decaying loop")
    need = math.ceil(decades * math.log(10.0) / rate)
    return max(DEFAULT_HORIZON_DELAYS, float(need)) * L
