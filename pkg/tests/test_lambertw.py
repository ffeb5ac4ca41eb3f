import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lambertpi.errors import DomainError, InvalidBranchError
from lambertpi.lambertw import BRANCH_POINT, Branch, lambert_w, lambert_w_residual

from conftest import bisect_root

# fixed point of w*exp(w) = 1, from bisection on [0.5, 0.6]
OMEGA = 0.567143290409784


def _tol(z):
    return 1e-12 * max(1.0, abs(z))


def test_zero():
    assert lambert_w(0, 0.0) == 0j


def test_branch_point_exact():
    assert lambert_w(0, -1 / math.e) == complex(-1.0, 0.0)
    assert lambert_w(-1, -1 / math.e) == complex(-1.0, 0.0)


def test_omega_matches_bisection_oracle():
    oracle = bisect_root(lambda w: w * math.exp(w) - 1.0, 0.5, 0.6)
    assert oracle == pytest.approx(OMEGA, abs=1e-15)
    w = lambert_w(0, 1.0)
    assert w.imag == 0.0
    assert w.real == pytest.approx(OMEGA, abs=1e-14)


def test_underdamped_argument_is_complex_upper():
    z = -1.8837 / math.e
    w = lambert_w(0, z)
    assert w.imag > 0
    assert lambert_w_residual(w, z) <= 1e-12
    # mpmath: W_0(-1.8837/e) = -0.5717945059883183 + 1.0862626638345988j
    assert w == pytest.approx(complex(-0.5717945059883183, 1.0862626638345988), abs=1e-14)


def test_real_branches_match_bisection():
    z = -0.5 / math.e
    f = lambda w: w * math.exp(w) - z  # noqa: E731
    assert lambert_w(0, z).real == pytest.approx(bisect_root(f, -1.0, 0.0), abs=1e-14)
    assert lambert_w(-1, z).real == pytest.approx(bisect_root(f, -40.0, -1.0), abs=1e-13)


def test_residual_helper():
    assert lambert_w_residual(-1.0, -1 / math.e) == pytest.approx(0.0, abs=1e-16)
    assert lambert_w_residual(0.0, 0.0) == 0.0
    assert lambert_w_residual(complex(-1.0, 0.5), -1 / math.e) > 0.0


def test_identity_on_grid():
    zs = np.concatenate([np.linspace(-5.0, -1e-9, 1200), [0.0]])
    for z in zs:
        for k in (0, -1):
            if k == -1 and z >= 0:
                continue
            w = lambert_w(k, z)
            assert math.isfinite(w.real) and math.isfinite(w.imag)
            assert lambert_w_residual(w, z) <= _tol(z), (k, z, w)


@pytest.mark.parametrize("z", np.linspace(BRANCH_POINT, 0, 50)[1:-1])
def test_branch_ordering(z):
    w0 = lambert_w(0, z)
    wm1 = lambert_w(-1, z)
    assert w0.imag == 0.0 and wm1.imag == 0.0
    assert wm1.real < -1.0 < w0.real < 0.0


@pytest.mark.parametrize("z", [-0.37, -0.5, -1.0, -2.5, -5.0, -50.0])
def test_conjugacy_below_branch_point(z):
    w0 = lambert_w(0, z)
    wm1 = lambert_w(-1, z)
    assert w0.imag > 0 > wm1.imag
    assert abs(w0 - wm1.conjugate()) <= 1e-12


def test_continuity_at_branch_point():
    for z in (BRANCH_POINT + 1e-8, BRANCH_POINT - 1e-8):
        for k in (0, -1):
            assert abs(lambert_w(k, z) - (-1.0)) <= 1e-3


def test_errors():
    with pytest.raises(InvalidBranchError):
        lambert_w(1, -0.1)
    with pytest.raises(InvalidBranchError):
        lambert_w(-2, -0.1)
    with pytest.raises(DomainError):
        lambert_w(0, -1.0, real_only=True)
    with pytest.raises(DomainError):
        lambert_w(-1, 0.5)
    with pytest.raises(DomainError):
        lambert_w(0, float("nan"))
    assert lambert_w(Branch.SECONDARY, -0.2) == lambert_w(-1, -0.2)


@settings(max_examples=300, deadline=None)
@given(z=st.floats(min_value=-5.0, max_value=-1e-9), k=st.sampled_from([0, -1]))
def test_identity_property(z, k):
    w = lambert_w(k, z)
    assert abs(w * cmath.exp(w) - z) <= _tol(z)


@settings(max_examples=100, deadline=None)
@given(z=st.floats(min_value=0.0, max_value=1e6))
def test_principal_branch_positive_reals(z):
    w = lambert_w(0, z)
    assert w.imag == 0.0 and w.real >= 0.0
    assert lambert_w_residual(w, z) <= _tol(z)
