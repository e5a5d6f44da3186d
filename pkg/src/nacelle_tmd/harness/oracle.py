"""Independent inertial-frame check of the TMD equations of motion.

Each damper is simulated as a free point mass in a frame that translates
with P but keeps the global orientation. The rail is enforced by stiff
penalty spring-dampers on the two off-track components of the nacelle-frame
offset ``d = R (r - r_P)``; the track spring, damper, stop and actuator act
along the remaining component. Only Newton's second law, the orientation
history R(t) and its time derivative are used; none of the rotating-frame
force terms appear anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from ..errors import OracleInvalidError
from ..frames import skew
from ..integrate import MotionSeries, SimResult, config_digest, grid_size
from ..tmd_core import ControlMode, TmdConfig

DRIFT_LIMIT = 1e-4


@dataclass(frozen=True)
class PenaltyOracleConfig:
    penalty_stiffness: float = 1e9
    penalty_damping: float = 1e5
    dt_oracle: float = 1e-6

    def validate(self, masses) -> "PenaltyOracleConfig":
        if not (self.penalty_stiffness > 0 and self.penalty_damping > 0 and self.dt_oracle > 0):
            raise ValueError("penalty oracle parameters must all be positive")
        for m in masses:
            limit = 0.2 / math.sqrt(self.penalty_stiffness / m)
            if self.dt_oracle > limit:
                raise ValueError(f"dt_oracle {self.dt_oracle:g} s exceeds the penalty stability "
                                 f"limit {limit:.3g} s for mass {m:g} kg")
        return self


@numba.njit(cache=True)
def _interval(ts, t, i):
    n = ts.shape[0]
    while i < n - 2 and t >= ts[i + 1]:
        i += 1
    while i > 0 and t < ts[i]:
        i -= 1
    return i


@numba.njit(cache=True)
def _kinematics(ts, Rs, Rds, acc, fext, t, i, R, Rd, a, f):
    """Cubic Hermite R and its derivative, linear a_P and f_ext, at time t."""
    i = _interval(ts, t, i)
    h = ts[i + 1] - ts[i]
    s = (t - ts[i]) / h
    s2 = s * s
    s3 = s2 * s
    h00 = 2 * s3 - 3 * s2 + 1
    h10 = (s3 - 2 * s2 + s) * h
    h01 = -2 * s3 + 3 * s2
    h11 = (s3 - s2) * h
    d00 = (6 * s2 - 6 * s) / h
    d10 = 3 * s2 - 4 * s + 1
    d01 = (-6 * s2 + 6 * s) / h
    d11 = 3 * s2 - 2 * s
    for r in range(3):
        for c in range(3):
            R[r, c] = (h00 * Rs[i, r, c] + h10 * Rds[i, r, c]
                       + h01 * Rs[i + 1, r, c] + h11 * Rds[i + 1, r, c])
            Rd[r, c] = (d00 * Rs[i, r, c] + d10 * Rds[i, r, c]
                        + d01 * Rs[i + 1, r, c] + d11 * Rds[i + 1, r, c])
    for k in range(3):
        a[k] = (1 - s) * acc[i, k] + s * acc[i + 1, k]
    for k in range(2):
        f[k] = (1 - s) * fext[i, k] + s * fext[i + 1, k]
    return i


@numba.njit(cache=True)
def _stop(pos, vel, smax, smin, ks, cs):
    if pos > smax:
        if vel <= 0.0:
            return -ks * (pos - smax)
        return -(ks * (pos - smax) + cs * vel)
    if pos < smin:
        if vel >= 0.0:
            return -ks * (pos - smin)
        return -(ks * (pos - smin) + cs * vel)
    return 0.0


@numba.njit(cache=True)
def _forces(state, R, Rd, a, f, axis, m, k, c, smax, smin, ks, cs, g, kp, cp, deriv, fint_G, fint_N, d, dd):
    """Interaction force on one mass and its state derivative (in place)."""
    for r in range(3):
        d[r] = R[r, 0] * state[0] + R[r, 1] * state[1] + R[r, 2] * state[2]
        dd[r] = (Rd[r, 0] * state[0] + Rd[r, 1] * state[1] + Rd[r, 2] * state[2]
                 + R[r, 0] * state[3] + R[r, 1] * state[4] + R[r, 2] * state[5])
    for r in range(3):
        if r == axis:
            fint_N[r] = -k * d[r] - c * dd[r] + _stop(d[r], dd[r], smax, smin, ks, cs) + f[axis]
        else:
            fint_N[r] = -kp * d[r] - cp * dd[r]
    for r in range(3):
        fint_G[r] = R[0, r] * fint_N[0] + R[1, r] * fint_N[1] + R[2, r] * fint_N[2]
    deriv[0] = state[3]
    deriv[1] = state[4]
    deriv[2] = state[5]
    deriv[3] = fint_G[0] / m - a[0]
    deriv[4] = fint_G[1] / m - a[1]
    deriv[5] = fint_G[2] / m - a[2] - g


@numba.njit(cache=True)
def _run(ts, Rs, Rds, acc, fext, enabled, x0, m, k, c, smax, smin, ks, cs,
         g, kp, cp, dt, n_out, stride, out_state, out_force, out_moment, out_fint):
    nm = 2
    R = np.empty((3, 3))
    Rd = np.empty((3, 3))
    Rm = np.empty((3, 3))
    Rdm = np.empty((3, 3))
    Re = np.empty((3, 3))
    Rde = np.empty((3, 3))
    a = np.empty(3)
    am = np.empty(3)
    ae = np.empty(3)
    f = np.empty(2)
    fm = np.empty(2)
    fe = np.empty(2)
    S = np.zeros((nm, 6))
    tmp = np.empty(6)
    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    fG = np.empty(3)
    fN = np.empty(3)
    d = np.empty(3)
    dd = np.empty(3)
    max_drift = 0.0
    t0 = ts[0]
    i = _kinematics(ts, Rs, Rds, acc, fext, t0, 0, R, Rd, a, f)

    # Start on the rail at rest relative to the nacelle, with off-track
    # springs preloaded to the static reaction of the initial sample.
    # Second derivative of the Hermite segment at its left end.
    h = ts[1] - ts[0]
    Rdd0 = (6.0 * (Rs[1] - Rs[0]) / (h * h) - (4.0 * Rds[0] + 2.0 * Rds[1]) / h)
    for j in range(nm):
        if not enabled[j]:
            continue
        d[:] = 0.0
        d[j] = x0[j]
        need_G = np.empty(3)
        for r in range(3):
            acc_pt = a[r] + Rdd0[0, r] * d[0] + Rdd0[1, r] * d[1] + Rdd0[2, r] * d[2]
            need_G[r] = m[j] * acc_pt
        need_G[2] += m[j] * g
        for r in range(3):
            if r != j:
                d[r] = -(R[r, 0] * need_G[0] + R[r, 1] * need_G[1] + R[r, 2] * need_G[2]) / kp
        for r in range(3):
            S[j, r] = R[0, r] * d[0] + R[1, r] * d[1] + R[2, r] * d[2]
            S[j, 3 + r] = Rd[0, r] * d[0] + Rd[1, r] * d[1] + Rd[2, r] * d[2]

    n_steps = (n_out - 1) * stride
    out_i = 0
    for step in range(n_steps + 1):
        t = t0 + step * dt
        if step % stride == 0:
            for r in range(3):
                out_force[out_i, r] = 0.0
                out_moment[out_i, r] = 0.0
            for j in range(nm):
                if not enabled[j]:
                    out_state[out_i, 2 * j] = x0[j]
                    out_state[out_i, 2 * j + 1] = 0.0
                    continue
                _forces(S[j], R, Rd, a, f, j, m[j], k[j], c[j], smax[j], smin[j], ks[j], cs[j],
                        g, kp, cp, k1, fG, fN, d, dd)
                out_state[out_i, 2 * j] = d[j]
                out_state[out_i, 2 * j + 1] = dd[j]
                for r in range(3):
                    out_fint[out_i, j, r] = fN[r]
                    out_force[out_i, r] -= fG[r]
                # moment about P of the reaction -fG applied at S[j, :3]
                out_moment[out_i, 0] -= S[j, 1] * fG[2] - S[j, 2] * fG[1]
                out_moment[out_i, 1] -= S[j, 2] * fG[0] - S[j, 0] * fG[2]
                out_moment[out_i, 2] -= S[j, 0] * fG[1] - S[j, 1] * fG[0]
            out_i += 1
        if step == n_steps:
            break
        i = _kinematics(ts, Rs, Rds, acc, fext, t + 0.5 * dt, i, Rm, Rdm, am, fm)
        i = _kinematics(ts, Rs, Rds, acc, fext, t + dt, i, Re, Rde, ae, fe)
        for j in range(nm):
            if not enabled[j]:
                continue
            s = S[j]
            _forces(s, R, Rd, a, f, j, m[j], k[j], c[j], smax[j], smin[j], ks[j], cs[j],
                    g, kp, cp, k1, fG, fN, d, dd)
            for q in range(6):
                tmp[q] = s[q] + 0.5 * dt * k1[q]
            _forces(tmp, Rm, Rdm, am, fm, j, m[j], k[j], c[j], smax[j], smin[j], ks[j], cs[j],
                    g, kp, cp, k2, fG, fN, d, dd)
            for q in range(6):
                tmp[q] = s[q] + 0.5 * dt * k2[q]
            _forces(tmp, Rm, Rdm, am, fm, j, m[j], k[j], c[j], smax[j], smin[j], ks[j], cs[j],
                    g, kp, cp, k3, fG, fN, d, dd)
            for q in range(6):
                tmp[q] = s[q] + dt * k3[q]
            _forces(tmp, Re, Rde, ae, fe, j, m[j], k[j], c[j], smax[j], smin[j], ks[j], cs[j],
                    g, kp, cp, k4, fG, fN, d, dd)
            for q in range(6):
                s[q] += dt / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q])
            for r in range(3):
                if r != j:
                    dr = Re[r, 0] * s[0] + Re[r, 1] * s[1] + Re[r, 2] * s[2]
                    if abs(dr) > max_drift:
                        max_drift = abs(dr)
                    if not math.isfinite(dr):
                        return max_drift, t + dt
        R[:, :] = Re
        Rd[:, :] = Rde
        a[:] = ae
        f[:] = fe
    return max_drift, -1.0


def _rotation_rates(series: MotionSeries) -> np.ndarray:
    """dR_NG/dt at each sample from the sampled angular velocity."""
    out = np.empty_like(series.R_NG)
    for i in range(len(series)):
        R = series.R_NG[i]
        out[i] = -skew(R @ series.omega[i]) @ R
    return out


def inertial_oracle(series: MotionSeries, cfg: TmdConfig,
                    oracle_cfg: PenaltyOracleConfig = PenaltyOracleConfig(),
                    dt_out: float = 1e-3, horizon: float | None = None,
                    f_ext_schedule=None) -> SimResult:
    """Simulate the enabled dampers as penalty-constrained point masses.

    The two masses never interact, so both axes may be enabled in one run.
    Returns a :class:`SimResult` on the ``dt_out`` grid whose constraint
    columns are the penalty (rail) forces in nacelle components and whose
    ``metadata['max_drift']`` is the largest off-track excursion seen.

    Raises
    ------
    OracleInvalidError
        If any off-track excursion exceeds 1e-4 m.
    """
    cfg.validate()
    axes = (cfg.x_axis, cfg.y_axis)
    enabled = np.array([a.dof_enabled for a in axes])
    masses = [a.mass for a in axes if a.dof_enabled]
    oracle_cfg.validate(masses)
    stride = int(round(dt_out / oracle_cfg.dt_oracle))
    if stride < 1 or abs(stride * oracle_cfg.dt_oracle - dt_out) > 1e-9 * dt_out:
        raise ValueError("dt_out must be an integer multiple of dt_oracle")
    t0, t1 = series.span
    span = t1 - t0 if horizon is None else horizon
    n_out = grid_size(span, dt_out)

    fext = np.zeros((len(series), 2))
    if f_ext_schedule is not None and cfg.control_mode == ControlMode.ACTIVE:
        fext = np.array([tuple(f_ext_schedule(float(t))) for t in series.t], dtype=float)

    def col(name):
        return np.array([getattr(a, name) for a in axes], dtype=float)

    out_state = np.zeros((n_out, 4))
    out_force = np.zeros((n_out, 3))
    out_moment = np.zeros((n_out, 3))
    out_fint = np.zeros((n_out, 2, 3))
    max_drift, t_fail = _run(
        series.t, series.R_NG, _rotation_rates(series), series.accel_P, fext,
        enabled, col("initial_disp"), np.where(enabled, col("mass"), 1.0),
        col("k"), col("c"), col("stop_max"), col("stop_min"),
        col("stop_stiffness"), col("stop_damping"), float(cfg.gravity),
        oracle_cfg.penalty_stiffness, oracle_cfg.penalty_damping, oracle_cfg.dt_oracle,
        n_out, stride, out_state, out_force, out_moment, out_fint)
    if t_fail >= 0.0:
        raise OracleInvalidError("penalty oracle produced non-finite state", t_fail)
    if max_drift > DRIFT_LIMIT:
        raise OracleInvalidError(f"off-track drift {max_drift:.3g} m exceeds {DRIFT_LIMIT:g} m")

    times = t0 + dt_out * np.arange(n_out)
    stop = np.zeros((n_out, 2))
    cons = np.column_stack([out_fint[:, 0, 1], out_fint[:, 0, 2],
                            out_fint[:, 1, 0], out_fint[:, 1, 2]])
    for j, ax in enumerate(axes):
        if ax.dof_enabled:
            stop[:, j] = out_fint[:, j, j] + ax.k * out_state[:, 2 * j] + ax.c * out_state[:, 2 * j + 1]
    fext_out = np.zeros((n_out, 2))
    if f_ext_schedule is not None and cfg.control_mode == ControlMode.ACTIVE:
        fext_out = np.array([tuple(f_ext_schedule(float(t))) for t in times], dtype=float)
    stop -= fext_out * enabled
    meta = {"dt": dt_out, "dt_oracle": oracle_cfg.dt_oracle, "config_digest": config_digest(cfg),
            "steps": (n_out - 1) * stride, "max_drift": max_drift}
    return SimResult(times, out_state, out_force, out_moment, stop, cons, meta)
