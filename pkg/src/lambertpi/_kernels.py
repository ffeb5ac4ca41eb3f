"""Compiled RK4 loops for the delayed closed loop.

The step ``h`` divides the delay ``L = N h``, so every RK4 stage of step
``i`` reads the delayed signal from exactly one past interval, ``i - N``.
A ring buffer of ``N`` slots holds, per interval, one-sided end values and
slopes; the half-step value comes from the cubic Hermite interpolant on
that interval. Jumps in the delayed signal (the step input) therefore only
ever sit on interval ends. Zeroed slots are the zero pre-history.
"""

import numpy as np
from numba import njit

DIVERGENCE_LIMIT = 1e6


@njit(cache=True, nogil=True)
def _hermite_mid(v0, v1, d0, d1, h):
    return 0.5 * (v0 + v1) + 0.125 * h * (d0 - d1)


@njit(cache=True, nogil=True)
def reduced_loop(A, n_delay, h, n_steps):
    """Integrate ``y' = A (r(t-L) - y(t-L))`` with ``L = n_delay * h``.

    Returns ``(y, status)`` where ``status`` is ``-1`` on success or the
    index at which ``|y|`` exceeded the divergence limit.
    """
    n = n_steps + 1
    y = np.zeros(n)
    # per-interval Hermite data of the error signal e = r - y
    ev0 = np.zeros(n_delay)
    ev1 = np.zeros(n_delay)
    ed0 = np.zeros(n_delay)
    ed1 = np.zeros(n_delay)
    for i in range(n_steps):
        m = i % n_delay
        a0 = ev0[m]
        a1 = ev1[m]
        am = _hermite_mid(a0, a1, ed0[m], ed1[m], h)
        k1 = A * a0
        k2 = A * am
        k4 = A * a1
        yn = y[i]
        y1 = yn + h / 6.0 * (k1 + 4.0 * k2 + k4)
        y[i + 1] = y1
        if abs(y1) > DIVERGENCE_LIMIT:
            return y, i + 1
        # r = 1 on [t_i, t_{i+1}] for t_i >= 0
        ev0[m] = 1.0 - yn
        ev1[m] = 1.0 - y1
        ed0[m] = -k1
        ed1[m] = -k4
    return y, -1


@njit(cache=True, nogil=True)
def general_loop(K, T, kp, ki, n_delay, h, n_steps):
    """Integrate the PI + FOTD loop in state form.

    Plant ``x' = (-x + K u(t-L)) / T``, integrator ``q' = 1 - x``, control
    ``u = kp (1 - x) + ki q``; all states and ``u`` are zero before ``t = 0``.
    Returns ``(x, q, status)`` with ``status`` as in ``reduced_loop``.
    """
    n = n_steps + 1
    x = np.zeros(n)
    q = np.zeros(n)
    uv0 = np.zeros(n_delay)
    uv1 = np.zeros(n_delay)
    ud0 = np.zeros(n_delay)
    ud1 = np.zeros(n_delay)
    inv_t = 1.0 / T
    for i in range(n_steps):
        m = i % n_delay
        b0 = uv0[m]
        b1 = uv1[m]
        bm = _hermite_mid(b0, b1, ud0[m], ud1[m], h)
        xn = x[i]
        qn = q[i]
        k1x = (-xn + K * b0) * inv_t
        x2 = xn + 0.5 * h * k1x
        k2x = (-x2 + K * bm) * inv_t
        x3 = xn + 0.5 * h * k2x
        k3x = (-x3 + K * bm) * inv_t
        x4 = xn + h * k3x
        k4x = (-x4 + K * b1) * inv_t
        x1 = xn + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        q1 = qn + h / 6.0 * ((1.0 - xn) + 2.0 * (1.0 - x2) + 2.0 * (1.0 - x3) + (1.0 - x4))
        x[i + 1] = x1
        q[i + 1] = q1
        if abs(x1) > DIVERGENCE_LIMIT:
            return x, q, i + 1
        xdot1 = (-x1 + K * b1) * inv_t
        uv0[m] = kp * (1.0 - xn) + ki * qn
        uv1[m] = kp * (1.0 - x1) + ki * q1
        ud0[m] = -kp * k1x + ki * (1.0 - xn)
        ud1[m] = -kp * xdot1 + ki * (1.0 - x1)
    return x, q, -1
