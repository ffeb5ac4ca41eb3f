"""FOTD plant, PI gains and the gamma parameterization of the loop.

With ``kp = T * ki`` the controller zero cancels the plant pole and the
closed-loop characteristic equation reduces to ``s + K*ki*exp(-s*L) = 0``.
Writing ``gamma = K*ki*e*L`` its roots are ``s = W_k(-gamma/e) / L``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError
from .lambertw import Branch, lambert_w

__all__ = [
    "CRITICAL_TOL",
    "Damping",
    "FotdPlant",
    "GammaSpec",
    "PiGains",
    "PolePair",
    "characteristic_residual",
    "classify_damping",
    "closed_loop_poles",
    "gains_from_gamma",
    "gamma_from_gains",
]

CRITICAL_TOL = 1e-12


class Damping(str, Enum):
    OVERDAMPED = "overdamped"
    CRITICALLY_DAMPED = "critically_damped"
    UNDERDAMPED = "underdamped"


@dataclass(frozen=True)
class FotdPlant:
    """First-order plant with dead time, ``K exp(-sL) / (sT + 1)``."""

    K: float
    T: float
    L: float

    def __post_init__(self):
        for name in ("K", "T", "L"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"plant parameter {name} must be finite")
        if self.T <= 0:
            raise DomainError(f"time constant T must be positive, got {self.T}")
        if self.L <= 0:
            raise DomainError(f"delay L must be positive, got {self.L}")
        if self.K == 0:
            raise DomainError("process gain K must be nonzero")


@dataclass(frozen=True)
class PiGains:
    kp: float
    ki: float

    def __post_init__(self):
        if not (math.isfinite(self.kp) and math.isfinite(self.ki)):
            raise DomainError(f"PI gains must be finite, got kp={self.kp}, ki={self.ki}")


def classify_damping(gamma: float) -> Damping:
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if gamma < 1.0 - CRITICAL_TOL:
        return Damping.OVERDAMPED
    if gamma > 1.0 + CRITICAL_TOL:
        return Damping.UNDERDAMPED
    return Damping.CRITICALLY_DAMPED


@dataclass(frozen=True)
class GammaSpec:
    """Dimensionless loop parameter ``K*ki*e*L``."""

    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise DomainError(f"gamma must be positive and finite, got {self.gamma}")

    @property
    def regime(self) -> Damping:
        return classify_damping(self.gamma)


@dataclass(frozen=True)
class PolePair:
    """Closed-loop poles from the ``W_0`` (``s1``) and ``W_-1`` (``s2``) branches."""

    s1: complex
    s2: complex
    regime: Damping

    def __iter__(self):
        yield self.s1
        yield self.s2


def gains_from_gamma(plant: FotdPlant, gamma: float) -> PiGains:
    if not (math.isfinite(gamma) and gamma > 0):
        raise DomainError(f"gamma must be positive, got {gamma}")
    ki = gamma / (plant.K * math.e * plant.L)
    return PiGains(kp=plant.T * ki, ki=ki)


def gamma_from_gains(plant: FotdPlant, gains: PiGains) -> GammaSpec:
    if not gains.ki > 0:
        raise DomainError(f"integral gain must be positive, got {gains.ki}")
    return GammaSpec(plant.K * gains.ki * math.e * plant.L)


def closed_loop_poles(plant: FotdPlant, gamma: float) -> PolePair:
    """Dominant closed-loop pole pair for the loop tuned at ``gamma``.

    Poles scale as ``1/L`` and do not depend on ``K`` or ``T`` once the
    ``kp = T*ki`` relation holds.
    """
    regime = classify_damping(gamma)
    L = plant.L
    if regime is Damping.CRITICALLY_DAMPED:
        s = complex(-1.0 / L, 0.0)
        return PolePair(s, s, regime)
    z = -gamma / math.e
    w0 = lambert_w(Branch.PRINCIPAL, z)
    w1 = lambert_w(Branch.SECONDARY, z)
    return PolePair(w0 / L, w1 / L, regime)


def characteristic_residual(plant: FotdPlant, gains: PiGains, s: complex) -> float:
    """``|s + K*ki*exp(-s*L)|`` for the reduced loop."""
    return abs(s + plant.K * gains.ki * cmath.exp(-s * plant.L))
