"""Lambert W on the two real-axis branches used for delay-loop poles.

Only branches ``k = 0`` and ``k = -1`` are provided, evaluated at real
arguments. For ``-1/e <= z < 0`` both branches are real; for ``z < -1/e``
they form a complex-conjugate pair with ``W_0`` in the upper half plane.
"""

from __future__ import annotations

import cmath
import math
from enum import IntEnum

from .errors import DomainError, InvalidBranchError

__all__ = [
    "Branch",
    "BRANCH_POINT",
    "lambert_w",
    "lambert_w_residual",
]

#: The common argument where ``W_0`` and ``W_-1`` meet, ``-1/e``.
BRANCH_POINT = -math.exp(-1.0)

_STEP_TOL = 1e-14
_MAX_ITER = 50
# |e*z + 1| below this uses the branch-point series as the starting guess
_SERIES_RADIUS = 0.2


class Branch(IntEnum):
    PRINCIPAL = 0
    SECONDARY = -1

    @classmethod
    def coerce(cls, k) -> "Branch":
        if isinstance(k, bool):
            raise InvalidBranchError(f"branch index must be 0 or -1, got {k!r}")
        try:
            return cls(k)
        except ValueError:
            raise InvalidBranchError(f"branch index must be 0 or -1, got {k!r}") from None


def _series_guess(z, sign: int):
    # w ~ -1 + p - p**2/3 with p = +/- sqrt(2(e z + 1))
    q = 2.0 * (math.e * z + 1.0)
    p = math.sqrt(q) if q >= 0.0 else 1j * math.sqrt(-q)
    p *= sign
    return -1.0 + p - p * p / 3.0


def _halley(w, z, exp):
    for _ in range(_MAX_ITER):
        ew = exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= _STEP_TOL * (1.0 + abs(w)):
            break
    return w


def _real_branch(branch: Branch, z: float) -> float:
    if z == 0.0:
        return 0.0
    if branch is Branch.PRINCIPAL:
        if abs(math.e * z + 1.0) < _SERIES_RADIUS:
            w = _series_guess(z, +1)
        elif z < 3.0:
            w = math.log1p(z)
        else:
            lz = math.log(z)
            w = lz - math.log(lz)
    else:
        if z > -0.1:
            lz = math.log(-z)
            w = lz - math.log(-lz)
        else:
            w = _series_guess(z, -1)
    w = w.real if isinstance(w, complex) else w
    if w == -1.0:
        return -1.0
    return _halley(w, z, math.exp)


def _upper_complex(z: float) -> complex:
    # W_0(z) for real z < -1/e; W_-1(z) is its conjugate.
    if abs(math.e * z + 1.0) < 2.0:
        w = _series_guess(z, +1)
    else:
        l1 = cmath.log(complex(z, 0.0))
        w = l1 - cmath.log(l1)
    if w == -1.0:
        return complex(-1.0, 0.0)
    return _halley(complex(w), z, cmath.exp)


def lambert_w(branch, z: float, real_only: bool = False) -> complex:
    """Evaluate ``W_k(z)`` for real ``z`` on branch ``k`` in ``{0, -1}``.

    The result is returned as a Python ``complex``. On the real segment
    ``[-1/e, 0)`` (and for ``z >= 0`` on ``k = 0``) the imaginary part is
    exactly zero. Below ``-1/e`` the principal branch returns the root with
    positive imaginary part and ``k = -1`` returns its conjugate.

    Raises
    ------
    InvalidBranchError
        If ``branch`` is not 0 or -1.
    DomainError
        If ``z`` is not finite, if ``k = -1`` with ``z >= 0``, or if
        ``real_only`` is set and ``z < -1/e``.
    """
    branch = Branch.coerce(branch)
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"lambert_w requires a finite argument, got {z!r}")
    if branch is Branch.SECONDARY and z >= 0.0:
        raise DomainError(f"W_-1 is only evaluated for z < 0, got {z!r}")

    if z == BRANCH_POINT:
        return complex(-1.0, 0.0)
    if z > BRANCH_POINT:
        return complex(_real_branch(branch, z), 0.0)
    if real_only:
        raise DomainError(f"W_{int(branch)}({z!r}) is not real below -1/e")

    w = _upper_complex(z)
    if not (w.imag > 0.0 and w.imag < math.pi):
        raise ArithmeticError(f"Halley iteration left the principal branch at z={z!r}: {w!r}")
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise ArithmeticError(f"non-finite Lambert W value at z={z!r}")
    return w if branch is Branch.PRINCIPAL else w.conjugate()


def lambert_w_residual(w: complex, z: float) -> float:
    """Return ``|w * exp(w) - z|``."""
    w = complex(w)
    return abs(w * cmath.exp(w) - z)
