import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import axis, x_only
from nacelle_tmd.errors import MotionError, NumericalFailure
from nacelle_tmd.frames import NacelleMotionSample, euler_to_rotation, rot_z
from nacelle_tmd.harness.oracle import inertial_oracle
from nacelle_tmd.harness.profiles import MotionProfile, constant_yaw_rate
from nacelle_tmd.integrate import (
    ForceSchedule,
    MotionSeries,
    grid_size,
    rk4_step,
    sample_motion,
    sample_motion_grid,
    simulate,
)
from nacelle_tmd.io import write_result_csv
from nacelle_tmd.tmd_core import ControlMode, TmdAxisParams, TmdConfig
from oracles import crossing_times, peak_values


def at_rest(t_end):
    return MotionSeries.constant(NacelleMotionSample.at_rest(0.0), t_end)


def two_sample(acc0, acc1):
    z = np.zeros(3)
    return MotionSeries.from_samples([
        NacelleMotionSample(0.0, np.array(acc0, float), np.eye(3), z, z),
        NacelleMotionSample(1.0, np.array(acc1, float), rot_z(0.2), z, z),
    ])


class TestSampleMotion:
    def test_exact_at_samples(self):
        series = two_sample([0, 0, 0], [2, 0, 0])
        s = sample_motion(series, 1.0)
        np.testing.assert_array_equal(s.accel_P_global, [2, 0, 0])
        np.testing.assert_array_equal(s.R_NG, series.R_NG[1])

    def test_midpoint(self):
        s = sample_motion(two_sample([0, 0, 0], [2, 0, 0]), 0.5)
        np.testing.assert_allclose(s.accel_P_global, [1, 0, 0], atol=1e-15)
        # blended rotation is re-orthonormalized and lies between the ends
        np.testing.assert_allclose(s.R_NG @ s.R_NG.T, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(s.R_NG, rot_z(0.1), atol=1e-14)

    def test_constant_series(self):
        sample = NacelleMotionSample(0.0, np.array([1.0, -2.0, 3.0]), euler_to_rotation(0.1, 0.2, 0.3),
                                     np.array([0.1, 0.0, 0.2]), np.array([0.0, 0.3, 0.0]))
        series = MotionSeries.constant(sample, 5.0)
        for t in (0.0, 1.234, 5.0):
            s = sample_motion(series, t)
            np.testing.assert_allclose(s.accel_P_global, sample.accel_P_global, rtol=0, atol=1e-15)
            np.testing.assert_allclose(s.R_NG, sample.R_NG, atol=1e-15)
            np.testing.assert_allclose(s.omega_global, sample.omega_global, atol=1e-15)

    def test_out_of_range_names_t_and_span(self):
        with pytest.raises(MotionError, match=r"t = 1\.5 s .*\[0, 1\]"):
            sample_motion(two_sample([0, 0, 0], [1, 0, 0]), 1.5)

    def test_grid_matches_scalar(self):
        profile = MotionProfile(angles=(((0.3, 1.1, 0.2),), ((0.2, 0.7, 1.0),), ()),
                                translation=(((0.1, 2.0, 0.0),), (), ()), rates=(0.0, 0.0, 1.0))
        series = profile.to_series(2.0, 0.01)
        ts = np.linspace(0.0, 2.0, 333)
        acc, R, om, al = sample_motion_grid(series, ts)
        for k, t in enumerate(ts):
            s = sample_motion(series, t)
            np.testing.assert_allclose(R[k], s.R_NG, atol=1e-15)
            np.testing.assert_allclose(acc[k], s.accel_P_global, atol=1e-15)
            np.testing.assert_allclose(al[k], s.alpha_global, atol=1e-15)

    def test_series_validation(self):
        z = np.zeros(3)
        with pytest.raises(MotionError, match="at least 2"):
            MotionSeries(np.array([0.0]), np.zeros((1, 3)), np.eye(3)[None], np.zeros((1, 3)), np.zeros((1, 3)))
        with pytest.raises(MotionError, match="strictly increasing"):
            MotionSeries.from_samples([NacelleMotionSample(1.0, z, np.eye(3), z, z),
                                       NacelleMotionSample(1.0, z, np.eye(3), z, z)])


class TestRk4:
    def test_zero_derivative(self):
        s = np.array([0.1, -2.0, 3.0, 4.0])
        np.testing.assert_array_equal(rk4_step(lambda t, s, c: np.zeros(4), s, 0.0, 0.1), s)

    def test_exponential_decay_one_step(self):
        out = rk4_step(lambda t, s, c: -s, np.array([1.0]), 0.0, 0.1)
        assert abs(out[0] - 0.9048375) < 1e-7

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_failure_carries_time(self):
        with pytest.raises(NumericalFailure, match="t = 2.5"):
            rk4_step(lambda t, s, c: s / 0.0 if t > 2.5 else s, np.array([1.0]), 2.5, 0.1)

    def test_rejects_nonpositive_dt(self):
        with pytest.raises(ValueError):
            rk4_step(lambda t, s, c: s, np.array([1.0]), 0.0, 0.0)

    def test_oscillator_amplitude_drift(self):
        cfg = x_only(k=100.0, initial_disp=0.1)
        res = simulate(at_rest(2 * math.pi), cfg, 1e-3)
        amp = np.hypot(res.states[:, 0], res.states[:, 1] / 10.0)
        assert np.abs(amp - 0.1).max() < 1e-6


def test_grid_size_and_times():
    res = simulate(at_rest(1.0), x_only(initial_disp=0.1), 0.3)
    assert len(res) == grid_size(1.0, 0.3) == 4
    np.testing.assert_allclose(res.t, [0.0, 0.3, 0.6, 0.9])
    assert res.metadata["steps"] == 3 and res.metadata["dt"] == 0.3
    assert len(simulate(at_rest(1.0), x_only(), 0.1)) == 11


def test_initial_state_and_static_record():
    cfg = TmdConfig(axis(initial_disp=0.05), axis(mass=2.0, initial_disp=-0.02))
    res = simulate(at_rest(0.1), cfg, 0.05)
    np.testing.assert_array_equal(res.states[0], [0.05, 0.0, -0.02, 0.0])
    t, state, loads = res.record(0)
    assert t == 0.0 and state.x == 0.05
    np.testing.assert_allclose(loads.force_G[2], -3.0 * 9.81)


def test_horizon_beyond_series():
    with pytest.raises(MotionError, match="exceeds"):
        simulate(at_rest(1.0), x_only(), 1e-2, horizon=2.0)


def test_undamped_period():
    res = simulate(at_rest(7.0), x_only(k=100.0, initial_disp=0.1), 1e-3)
    np.testing.assert_allclose(res.states[:, 0], 0.1 * np.cos(10.0 * res.t), atol=1e-8)
    period = np.diff(crossing_times(res.t, res.states[:, 0])).mean()
    assert period == pytest.approx(2 * math.pi / 10, rel=1e-4)


def test_log_decrement():
    res = simulate(at_rest(5.0), x_only(k=100.0, c=2.0, initial_disp=0.1), 1e-3)
    _, peaks = peak_values(res.t, res.states[:, 0], res.states[:, 1])
    dec = np.log(peaks[:-1] / peaks[1:])
    zeta = 0.1
    assert dec.mean() == pytest.approx(2 * math.pi * zeta / math.sqrt(1 - zeta**2), abs=1e-3)
    assert dec.mean() == pytest.approx(0.6315, abs=1e-3)


def test_yaw_rate_softening():
    series = constant_yaw_rate(3.0).to_series(6.0, 1e-3)
    res = simulate(series, x_only(k=100.0, initial_disp=0.1), 1e-3)
    period = np.diff(crossing_times(res.t, res.states[:, 0])).mean()
    assert 2 * math.pi / period == pytest.approx(math.sqrt(91.0), rel=1e-3)


def test_resonant_base_excitation():
    # x_P'' = A sin(w t) at w = sqrt(k/m); steady amplitude A / (2 zeta w^2).
    A, w, zeta = 0.5, 10.0, 0.1
    cfg = x_only(k=100.0, c=2 * zeta * w)
    profile = MotionProfile(translation=(((-A / w**2, w, 0.0),), (), ()))
    long = simulate(profile.to_series(30.0, 1e-3), cfg, 1e-3)
    tail = long.t > 25.0
    amp = np.abs(long.states[tail, 0]).max()
    assert amp == pytest.approx(A / (2 * zeta * w**2), rel=1e-4)

    series = profile.to_series(3.0, 1e-3)
    core = simulate(series, cfg, 1e-3)
    ref = inertial_oracle(series, cfg)
    scale = np.abs(ref.states[:, 0]).max()
    assert np.abs(core.states[:, 0] - ref.states[:, 0]).max() <= 1e-5 * scale


def _damped_endpoint(dt):
    res = simulate(at_rest(1.0), x_only(k=100.0, c=2.0, initial_disp=0.1), dt)
    return res.states[-1]


def test_fourth_order_convergence():
    dt = 0.02
    ref = _damped_endpoint(dt / 16)
    ratio = np.linalg.norm(_damped_endpoint(dt) - ref) / np.linalg.norm(_damped_endpoint(dt / 2) - ref)
    assert 12.0 <= ratio <= 20.0


def energy_audit(res, cfg):
    ax = cfg.x_axis
    x, xd = res.states[:, 0], res.states[:, 1]
    energy = 0.5 * ax.mass * xd**2 + 0.5 * ax.k * x**2
    dissipated = np.trapezoid(ax.c * xd**2, res.t)
    return (energy[0] - energy[-1] - dissipated) / dissipated


def test_energy_audit():
    cfg = x_only(k=100.0, c=0.5, initial_disp=0.1)
    res = simulate(at_rest(10.0), cfg, 1e-3)
    assert abs(energy_audit(res, cfg)) < 1e-4


def test_stop_contact_contained():
    # A soft spring lets gravity on a steep pitch push the mass into the stop.
    cfg = TmdConfig(axis(mass=2.0, k=10.0, initial_disp=0.0, stop_max=0.05, stop_min=-0.05,
                         stop_stiffness=1e6, stop_damping=1e4), TmdAxisParams.disabled())
    profile = MotionProfile(angles=((), ((0.8, 2.0, 0.0),), ()))
    dt = 0.1 / math.sqrt(1e6 / 2.0)
    res = simulate(profile.to_series(3.0, 1e-3), cfg, dt)
    over = np.maximum(np.abs(res.states[:, 0]) - 0.05, 0.0)
    assert over.max() > 0.0
    assert over.max() < 5e-3
    assert np.all(res.stop[:, 0][over == 0.0] == 0.0)


def test_active_schedule_applies_only_in_active_mode():
    sched = ForceSchedule(np.array([0.0, 1.0]), np.array([[2.0, 0.0], [2.0, 0.0]]))
    passive = x_only(k=0.0)
    active = TmdConfig(passive.x_axis, passive.y_axis, control_mode=ControlMode.ACTIVE)
    assert np.all(simulate(at_rest(1.0), passive, 0.01, sched).states == 0.0)
    res = simulate(at_rest(1.0), active, 0.01, sched)
    assert res.states[-1, 0] == pytest.approx(0.5 * 2.0 * 1.0**2, rel=1e-12)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_numerical_failure_reports_time():
    # A stiff stop at a huge step size blows up.
    cfg = TmdConfig(axis(initial_disp=0.0, stop_max=1e-3, stop_min=-1e-3, stop_stiffness=1e12,
                         stop_damping=0.0), TmdAxisParams.disabled())
    profile = MotionProfile(translation=(((1.0, 3.0, 0.0),), (), ()))
    with pytest.raises(NumericalFailure, match="at t ="):
        simulate(profile.to_series(20.0, 0.01), cfg, 0.01)


@settings(max_examples=20, deadline=None)
@given(st.floats(1e-3, 0.05), st.integers(0, 1000))
def test_deterministic(dt, seed):
    rng = np.random.default_rng(seed)
    cfg = TmdConfig(axis(mass=2.0, k=50.0, c=1.0, initial_disp=0.05),
                    axis(mass=3.0, k=80.0, c=1.0))
    profile = MotionProfile(translation=(((rng.uniform(0, 0.3), 2.0, 0.0),), (), ()),
                            angles=(((rng.uniform(0, 0.2), 1.0, 0.0),), (), ()))
    series = profile.to_series(0.5, 0.01)
    a = write_result_csv(simulate(series, cfg, dt))
    b = write_result_csv(simulate(series, cfg, dt))
    assert a == b
