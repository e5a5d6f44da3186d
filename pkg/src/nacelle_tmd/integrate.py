"""Fixed-step RK4 integration of the TMD states under prescribed nacelle motion."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import MotionError, NumericalFailure
from .frames import NacelleMotionNacelleFrame, NacelleMotionSample, as_rotation, gram_schmidt
from .tmd_core import (
    ZERO_FORCE,
    ControlMode,
    ConstraintForces,
    ExternalForce,
    LoadOutput,
    TmdConfig,
    TmdState,
    active_force,
    output_loads,
    state_derivative,
)

# Query times this close (relative) to a sample timestamp return the sample itself.
SNAP_TOL = 1e-9


@dataclass(frozen=True)
class MotionSeries:
    """Nacelle motion samples stored column-wise.

    Attributes
    ----------
    t : (n,) array
    accel_P : (n, 3) array, global frame
    R_NG : (n, 3, 3) array
    omega : (n, 3) array, global frame
    alpha : (n, 3) array, global frame
    """

    t: np.ndarray
    accel_P: np.ndarray
    R_NG: np.ndarray
    omega: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        n = t.shape[0] if t.ndim == 1 else -1
        shapes = {"accel_P": (n, 3), "R_NG": (n, 3, 3), "omega": (n, 3), "alpha": (n, 3)}
        if n < 2:
            raise MotionError("motion series needs at least 2 samples")
        for name, shape in shapes.items():
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise MotionError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise MotionError(f"{name} contains non-finite values")
            object.__setattr__(self, name, arr)
        if not np.all(np.isfinite(t)):
            raise MotionError("time column contains non-finite values")
        bad = np.nonzero(np.diff(t) <= 0.0)[0]
        if bad.size:
            i = int(bad[0]) + 1
            raise MotionError(f"time is not strictly increasing at sample {i} "
                              f"(t = {t[i]:.9g} after {t[i - 1]:.9g})")
        object.__setattr__(self, "t", t)

    @classmethod
    def from_samples(cls, samples: Sequence[NacelleMotionSample]) -> "MotionSeries":
        return cls(
            t=np.array([s.t for s in samples], dtype=float),
            accel_P=np.array([s.accel_P_global for s in samples], dtype=float),
            R_NG=np.array([as_rotation(s.R_NG) for s in samples]),
            omega=np.array([s.omega_global for s in samples], dtype=float),
            alpha=np.array([s.alpha_global for s in samples], dtype=float),
        )

    @classmethod
    def constant(cls, sample: NacelleMotionSample, t_end: float, t_start: float = 0.0) -> "MotionSeries":
        """Two-sample series holding ``sample`` over ``[t_start, t_end]``."""
        return cls.from_samples([dataclasses.replace(sample, t=t_start),
                                 dataclasses.replace(sample, t=t_end)])

    def __len__(self) -> int:
        return self.t.shape[0]

    def __getitem__(self, i: int) -> NacelleMotionSample:
        return NacelleMotionSample(float(self.t[i]), self.accel_P[i], self.R_NG[i],
                                   self.omega[i], self.alpha[i])

    @property
    def span(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])


def _locate(t_grid: np.ndarray, t: float) -> tuple[int, float]:
    """Index ``i`` and weight ``w`` so that t = (1-w) t[i] + w t[i+1]; w is 0.0
    exactly when t snaps onto a sample."""
    t0, t1 = t_grid[0], t_grid[-1]
    tol = SNAP_TOL * max(1.0, abs(t0), abs(t1))
    if t < t0 - tol or t > t1 + tol:
        raise MotionError(f"t = {t:.9g} s is outside the motion series span "
                          f"[{t0:.9g}, {t1:.9g}] s")
    i = int(np.searchsorted(t_grid, t, side="right")) - 1
    i = min(max(i, 0), len(t_grid) - 1)
    if abs(t - t_grid[i]) <= tol:
        return i, 0.0
    if i + 1 < len(t_grid) and abs(t_grid[i + 1] - t) <= tol:
        return i + 1, 0.0
    return i, (t - t_grid[i]) / (t_grid[i + 1] - t_grid[i])


def sample_motion(series: MotionSeries, t: float) -> NacelleMotionSample:
    """Linearly interpolated motion at time ``t``.

    The rotation matrix is blended entrywise and then re-orthonormalized.
    Sample timestamps return the stored sample unchanged.
    """
    i, w = _locate(series.t, t)
    if w == 0.0:
        s = series[i]
        return dataclasses.replace(s, t=float(t))
    v = 1.0 - w
    R = gram_schmidt(v * series.R_NG[i] + w * series.R_NG[i + 1])
    return NacelleMotionSample(
        t=float(t),
        accel_P_global=v * series.accel_P[i] + w * series.accel_P[i + 1],
        R_NG=R,
        omega_global=v * series.omega[i] + w * series.omega[i + 1],
        alpha_global=v * series.alpha[i] + w * series.alpha[i + 1],
    )


def sample_motion_grid(series: MotionSeries, ts: np.ndarray):
    """Vectorized :func:`sample_motion` over an increasing array of times.

    Returns ``(accel_P, R_NG, omega, alpha)`` stacked along the first axis.
    """
    ts = np.asarray(ts, dtype=float)
    t_grid = series.t
    t0, t1 = t_grid[0], t_grid[-1]
    tol = SNAP_TOL * max(1.0, abs(t0), abs(t1))
    if ts.size and (ts[0] < t0 - tol or ts[-1] > t1 + tol):
        bad = ts[0] if ts[0] < t0 - tol else ts[-1]
        raise MotionError(f"t = {bad:.9g} s is outside the motion series span "
                          f"[{t0:.9g}, {t1:.9g}] s")
    i = np.clip(np.searchsorted(t_grid, ts, side="right") - 1, 0, len(t_grid) - 2)
    w = (ts - t_grid[i]) / (t_grid[i + 1] - t_grid[i])
    w[np.abs(ts - t_grid[i]) <= tol] = 0.0
    snap_hi = np.abs(t_grid[i + 1] - ts) <= tol
    i[snap_hi] += 1
    w[snap_hi] = 0.0
    j = np.minimum(i + 1, len(t_grid) - 1)
    v = 1.0 - w

    def lerp(a):
        return v[:, None] * a[i] + w[:, None] * a[j]

    R = v[:, None, None] * series.R_NG[i] + w[:, None, None] * series.R_NG[j]
    exact = w == 0.0
    R[~exact] = gram_schmidt(R[~exact])
    R[exact] = series.R_NG[i[exact]]
    return lerp(series.accel_P), R, lerp(series.omega), lerp(series.alpha)


@dataclass(frozen=True)
class ForceSchedule:
    """External force command sampled in time, linearly interpolated."""

    t: np.ndarray
    forces: np.ndarray  # (n, 2): f_x, f_y

    def __call__(self, t: float) -> ExternalForce:
        i, w = _locate(np.asarray(self.t, dtype=float), t)
        f = np.asarray(self.forces, dtype=float)
        if w == 0.0:
            return ExternalForce(float(f[i, 0]), float(f[i, 1]))
        v = (1.0 - w) * f[i] + w * f[i + 1]
        return ExternalForce(float(v[0]), float(v[1]))


def rk4_step(deriv: Callable, s: np.ndarray, t: float, dt: float, context=None) -> np.ndarray:
    """One classical Runge-Kutta step of ``s' = deriv(t, s, context)``."""
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    s = np.asarray(s, dtype=float)
    try:
        k1 = deriv(t, s, context)
        k2 = deriv(t + 0.5 * dt, s + 0.5 * dt * k1, context)
        k3 = deriv(t + 0.5 * dt, s + 0.5 * dt * k2, context)
        k4 = deriv(t + dt, s + dt * k3, context)
    except NumericalFailure as exc:
        raise NumericalFailure("integration failed: " + str(exc), t) from exc
    out = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise NumericalFailure("integration produced a non-finite state", t)
    return out


def config_digest(cfg: TmdConfig) -> str:
    payload = json.dumps(dataclasses.asdict(cfg), sort_keys=True, default=float)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class SimResult:
    """Time histories on the integration grid.

    ``states`` columns are (x, x_dot, y, y_dot); ``constraints`` columns are
    (fy_tmdx, fz_tmdx, fx_tmdy, fz_tmdy); ``stop`` columns are (fstop_x,
    fstop_y).
    """

    t: np.ndarray
    states: np.ndarray
    force_G: np.ndarray
    moment_G: np.ndarray
    stop: np.ndarray
    constraints: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.t.shape[0]

    def record(self, i: int) -> tuple[float, TmdState, LoadOutput]:
        return (
            float(self.t[i]),
            TmdState(*map(float, self.states[i])),
            LoadOutput(self.force_G[i], self.moment_G[i],
                       ConstraintForces(*map(float, self.constraints[i])),
                       float(self.stop[i, 0]), float(self.stop[i, 1])),
        )

    def records(self) -> Iterator[tuple[float, TmdState, LoadOutput]]:
        for i in range(len(self)):
            yield self.record(i)


def grid_size(span: float, dt: float) -> int:
    """Number of output records, floor(span/dt) + 1, robust to round-off."""
    return int(math.floor(span / dt * (1.0 + 1e-12) + 1e-9)) + 1


class _MotionInputs:
    """Nacelle-frame inputs precomputed on the half-step grid t0 + k dt/2,
    which holds every RK4 stage time."""

    def __init__(self, series: MotionSeries, cfg: TmdConfig, schedule, t0: float, dt: float, n: int):
        self.cfg = cfg
        self.t0 = t0
        self.h = 0.5 * dt
        ts = t0 + self.h * np.arange(2 * n - 1)
        acc, R, om, al = sample_motion_grid(series, ts)
        # rows of R are nacelle axes: v_N = R v_G
        acc_N = np.einsum("kij,kj->ki", R, acc)
        om_N = np.einsum("kij,kj->ki", R, om)
        al_N = np.einsum("kij,kj->ki", R, al)
        g_N = -cfg.gravity * R[:, :, 2]
        self.R = R
        self.u = [NacelleMotionNacelleFrame(*row) for row in zip(acc_N, om_N, al_N, g_N)]
        if schedule is None or cfg.control_mode != ControlMode.ACTIVE:
            self.f = [ZERO_FORCE] * len(ts)
        else:
            self.f = [active_force(cfg.control_mode, schedule(float(t))) for t in ts]

    def index(self, t: float) -> int:
        return int(round((t - self.t0) / self.h))

    def __call__(self, t: float):
        k = self.index(t)
        return self.R[k], self.u[k], self.f[k]


def _tmd_rhs(t: float, s: np.ndarray, inputs: _MotionInputs) -> np.ndarray:
    k = inputs.index(t)
    return state_derivative(s, inputs.u[k], inputs.cfg, inputs.f[k])


def simulate(series: MotionSeries, cfg: TmdConfig, dt: float, f_ext_schedule=None,
             horizon: float | None = None) -> SimResult:
    """Integrate both TMDs over the motion series with fixed-step RK4.

    Parameters
    ----------
    series : MotionSeries
        Prescribed nacelle motion; must cover ``[t_first, t_first + horizon]``.
    cfg : TmdConfig
    dt : float
        Step size (s). Stop contact needs dt <= 0.1 / sqrt(k_S / m).
    f_ext_schedule : callable or ForceSchedule, optional
        Command ``t -> ExternalForce``; ignored in passive mode.
    horizon : float, optional
        Simulated duration; defaults to the full series span.
    """
    cfg.validate()
    if not (dt > 0.0 and math.isfinite(dt)):
        raise ValueError(f"dt must be a positive finite number, got {dt!r}")
    t0, t_last = series.span
    span = t_last - t0 if horizon is None else float(horizon)
    if span < 0.0 or t0 + span > t_last + SNAP_TOL * max(1.0, abs(t_last)):
        raise MotionError(f"horizon {span:.9g} s exceeds the motion series span "
                          f"[{t0:.9g}, {t_last:.9g}] s")
    n = grid_size(span, dt)
    times = t0 + dt * np.arange(n)

    inputs = _MotionInputs(series, cfg, f_ext_schedule, t0, dt, n)
    states = np.empty((n, 4))
    force = np.empty((n, 3))
    moment = np.empty((n, 3))
    stop = np.empty((n, 2))
    cons = np.empty((n, 4))

    s = np.array(cfg.initial_state(), dtype=float)
    for i, t in enumerate(times):
        if i > 0:
            s = rk4_step(_tmd_rhs, s, float(times[i - 1]), dt, inputs)
        R, u, f_ext = inputs(float(t))
        loads = output_loads(s, u, R, cfg, f_ext)
        states[i] = s
        force[i] = loads.force_G
        moment[i] = loads.moment_G
        stop[i] = (loads.stop_fx, loads.stop_fy)
        cons[i] = loads.constraints
    if not (np.all(np.isfinite(force)) and np.all(np.isfinite(moment))):
        bad = int(np.nonzero(~np.isfinite(force).all(axis=1) | ~np.isfinite(moment).all(axis=1))[0][0])
        raise NumericalFailure("non-finite reaction load", float(times[bad]))

    meta = {"dt": dt, "config_digest": config_digest(cfg), "steps": n - 1}
    return SimResult(times, states, force, moment, stop, cons, meta)
