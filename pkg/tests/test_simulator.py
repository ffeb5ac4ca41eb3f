import io
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from lambertpi.errors import DomainError, UnstableResponseError
from lambertpi.model import FotdPlant, PiGains, closed_loop_poles, gains_from_gamma
from lambertpi.simulator import (
    LoopForm,
    SimConfig,
    StepResponse,
    method_of_steps_reference,
    settling_horizon,
    simulate,
    simulate_general,
    simulate_reduced,
)

E = math.e
NINE_PLANTS = [FotdPlant(K, T, L) for K, T, L in [
    (1, 1, 1), (2, 5, 0.5), (0.5, 0.2, 2), (1, 3, 1), (3, 1, 0.4),
    (0.7, 2, 1.5), (1.5, 0.5, 0.5), (1, 10, 1), (2, 1, 3),
]]


def _reduced(gamma, L=1.0, horizon=None, step_h=None):
    cfg = SimConfig.for_delay(L, step_h=step_h, horizon=horizon)
    return simulate_reduced(gamma / (E * L), L, cfg)


def test_config_forces_step_to_divide_delay():
    cfg = SimConfig.for_delay(1.0, step_h=0.0031)
    n = cfg.delay_steps(1.0)
    assert n * cfg.step_h == pytest.approx(1.0, rel=1e-12)
    plant_cfg = SimConfig.for_plant(FotdPlant(1, 0.5, 2.0))
    assert plant_cfg.step_h == pytest.approx(0.001)
    assert plant_cfg.horizon == 80.0


def test_config_rejects_bad_settings():
    with pytest.raises(DomainError):
        SimConfig(0.003, 40.0).delay_steps(1.0)
    with pytest.raises(DomainError):
        SimConfig(0.002, 5.0).delay_steps(1.0)
    with pytest.raises(DomainError):
        SimConfig.for_delay(1.0, step_h=-1.0)


def test_dead_time_is_exact_both_forms(unit_plant):
    gains = gains_from_gamma(unit_plant, 1.5)
    for resp in (simulate_general(unit_plant, gains), _reduced(1.5)):
        before = resp.times < 1.0
        assert np.all(resp.output_y[before] == 0.0)
        assert resp.output_y[resp.times > 1.0][0] > 0.0
        assert resp.times[0] == 0.0
        assert np.allclose(np.diff(resp.times), resp.step_h, rtol=0, atol=1e-12)


def test_general_final_value(unit_plant):
    gains = PiGains(1 / E, 1 / E)
    cfg = SimConfig.for_plant(unit_plant, horizon=30.0)
    resp = simulate_general(unit_plant, gains, cfg)
    assert resp.output_y[-1] == pytest.approx(1.0, abs=1e-4)
    # u settles at 1/K for unit output
    assert resp.control_u[-1] == pytest.approx(1.0, abs=1e-3)
    assert resp.control_u[0] == pytest.approx(1 / E)


def test_general_matches_reduced_unit_plant(unit_plant):
    gains = PiGains(1 / E, 1 / E)
    cfg = SimConfig.for_plant(unit_plant)
    g = simulate_general(unit_plant, gains, cfg)
    r = simulate_reduced(unit_plant.K * gains.ki, unit_plant.L, cfg)
    assert np.max(np.abs(g.output_y - r.output_y)) <= 1e-6


@pytest.mark.parametrize("plant", NINE_PLANTS, ids=lambda p: f"K{p.K}-T{p.T}-L{p.L}")
def test_general_matches_reduced_nine_plants(plant):
    for gamma in (1.0, 1.8837):
        gains = gains_from_gamma(plant, gamma)
        cfg = SimConfig.for_plant(plant, horizon=20 * plant.L)
        g = simulate(plant, gains, cfg)
        r = simulate(plant, gains, SimConfig.for_plant(plant, horizon=20 * plant.L, loop_form=LoopForm.REDUCED))
        assert np.max(np.abs(g.output_y - r.output_y)) <= 1e-6


def test_chr_twenty_percent_is_stable_with_overshoot(unit_plant):
    resp = simulate_general(unit_plant, PiGains(0.6, 0.6))
    assert abs(resp.output_y[-1] - 1.0) < 1e-3
    assert resp.output_y.max() > 1.01


def test_reduced_rejects_mismatched_gains(unit_plant):
    cfg = SimConfig.for_plant(unit_plant, loop_form=LoopForm.REDUCED)
    with pytest.raises(DomainError):
        simulate(unit_plant, PiGains(0.35, 0.29), cfg)
    with pytest.raises(DomainError):
        simulate_reduced(-1.0, 1.0)


def test_reduced_first_segments():
    A = 1 / E
    resp = _reduced(1.0)
    t, y = resp.times, resp.output_y
    seg1 = (t >= 1.0) & (t < 2.0)
    assert np.max(np.abs(y[seg1] - A * (t[seg1] - 1.0))) <= 1e-14
    assert y[np.searchsorted(t, 2.0)] == pytest.approx(A, abs=1e-14)


def test_reduced_time_scaling():
    a = _reduced(1.0, L=1.0)
    b = _reduced(1.0, L=2.0, horizon=80.0)
    assert np.allclose(b.times, 2.0 * a.times, rtol=0, atol=1e-9)
    assert np.max(np.abs(a.output_y - b.output_y)) <= 1e-12


def test_twenty_percent_peak():
    resp = _reduced(1.8837)
    assert resp.output_y.max() == pytest.approx(1.20, abs=0.01)


def test_method_of_steps_segments():
    A, L = 0.7, 1.5
    ref = method_of_steps_reference(A, L, 3, step_h=L / 300)
    t, y = ref.times, ref.output_y
    s0 = t < L
    s1 = (t >= L) & (t < 2 * L)
    s2 = (t >= 2 * L) & (t <= 3 * L)
    assert np.all(y[s0] == 0.0)
    assert np.allclose(y[s1], A * (t[s1] - L), rtol=0, atol=1e-15)
    tau = t[s2] - 2 * L
    assert np.allclose(y[s2], A * L + A * tau - A**2 * tau**2 / 2, rtol=0, atol=1e-14)
    with pytest.raises(DomainError):
        method_of_steps_reference(A, L, 1)


@pytest.mark.parametrize("gamma", [0.1, 1.0, 1.8837])
def test_oracle_equivalence_three_delays(gamma):
    L = 1.0
    resp = _reduced(gamma, L, horizon=10.0)
    ref = method_of_steps_reference(gamma / E, L, 3)
    n = len(ref.times)
    assert np.array_equal(resp.times[:n], ref.times)
    assert np.max(np.abs(resp.output_y[:n] - ref.output_y)) <= 1e-6


@pytest.mark.parametrize("gamma", [1.0, 1.8837])
def test_fourth_order_convergence(gamma):
    errors = []
    for n in (10, 20, 40):
        resp = _reduced(gamma, 1.0, horizon=10.0, step_h=1.0 / n)
        ref = method_of_steps_reference(gamma / E, 1.0, 6, step_h=1.0 / n)
        m = len(ref.times)
        errors.append(np.max(np.abs(resp.output_y[:m] - ref.output_y)))
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    for p in orders:
        assert abs(p - 4.0) <= 0.5, orders


def test_final_value_with_settling_horizon():
    for gamma in np.round(np.arange(0.1, 2.0001, 0.1), 10):
        resp = _reduced(gamma, horizon=settling_horizon(gamma, 1.0))
        assert abs(resp.output_y[-1] - 1.0) <= 1e-3, gamma


def test_final_value_at_forty_delays_where_dominant_pole_allows():
    for gamma in np.round(np.arange(0.5, 2.0001, 0.1), 10):
        resp = _reduced(gamma)
        assert resp.horizon == pytest.approx(40.0)
        assert abs(resp.output_y[-1] - 1.0) <= 1e-3, gamma


def test_slow_overdamped_tail_follows_dominant_pole():
    # at gamma = 0.1 the slowest pole is ~ -0.038/L, so 40 L cannot settle
    resp = _reduced(0.1)
    err = 1.0 - resp.output_y
    assert err[-1] > 0.1
    i30, i40 = np.searchsorted(resp.times, [30.0, 40.0])
    rate = math.log(err[i40] / err[i30]) / 10.0
    s1 = closed_loop_poles(FotdPlant(1, 1, 1), 0.1).s1
    assert rate == pytest.approx(s1.real, rel=1e-3)


def test_unstable_gains_are_reported(unit_plant):
    gains = gains_from_gamma(unit_plant, 8.0)
    with pytest.raises(UnstableResponseError) as info:
        simulate_general(unit_plant, gains, SimConfig.for_plant(unit_plant, horizon=200.0))
    assert info.value.time is not None
    with pytest.raises(UnstableResponseError):
        simulate_reduced(8.0 / E, 1.0, SimConfig.for_delay(1.0, horizon=200.0))


def test_csv_round_trip():
    resp = _reduced(1.8837, horizon=10.0)
    text = resp.to_csv()
    assert text.splitlines()[0] == "t,y,u"
    assert len(text.splitlines()) == len(resp.times) + 1
    back = StepResponse.from_csv(io.StringIO(text))
    assert np.array_equal(back.times, resp.times)
    assert np.array_equal(back.output_y, resp.output_y)
    assert np.array_equal(back.control_u, resp.control_u)


def test_deterministic_across_threads(unit_plant):
    gains = gains_from_gamma(unit_plant, 1.3)
    ref = simulate_general(unit_plant, gains).output_y
    with ThreadPoolExecutor(4) as pool:
        outs = list(pool.map(lambda _: simulate_general(unit_plant, gains).output_y, range(8)))
    for o in outs:
        assert np.array_equal(o, ref)
