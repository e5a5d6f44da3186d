"""Equations of motion and reaction loads for two orthogonal nacelle TMDs.

TMD_X slides along the nacelle x (fore-aft) axis and TMD_Y along the
nacelle y (side-side) axis. Everything here is a pure function of the TMD
state, the nacelle-frame inputs and the configuration.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, NumericalFailure
from .frames import NacelleMotionNacelleFrame, rotate_to_global


class ControlMode(enum.IntEnum):
    PASSIVE = 1
    ACTIVE = 2


# Input-file key for every TmdAxisParams field, per axis.
AXIS_KEYS = {
    "x": {
        "mass": "TMD_X_M", "k": "TMD_X_K", "c": "TMD_X_C",
        "dof_enabled": "TMD_X_DOF", "initial_disp": "TMD_X_DSP",
        "stop_max": "TMD_X_DWSP", "stop_min": "TMD_X_UWSP",
        "stop_stiffness": "TMD_X_K_SX", "stop_damping": "TMD_X_C_SX",
    },
    "y": {
        "mass": "TMD_Y_M", "k": "TMD_Y_K", "c": "TMD_Y_C",
        "dof_enabled": "TMD_Y_DOF", "initial_disp": "TMD_Y_DSP",
        "stop_max": "TMD_Y_PLSP", "stop_min": "TMD_Y_NLSP",
        "stop_stiffness": "TMD_Y_K_S", "stop_damping": "TMD_Y_C_S",
    },
}


@dataclass(frozen=True)
class TmdAxisParams:
    """Parameters of one single-DOF damper (SI units)."""

    mass: float
    k: float
    c: float
    dof_enabled: bool = True
    initial_disp: float = 0.0
    stop_max: float = 1.0
    stop_min: float = -1.0
    stop_stiffness: float = 0.0
    stop_damping: float = 0.0

    @classmethod
    def disabled(cls) -> "TmdAxisParams":
        return cls(mass=0.0, k=0.0, c=0.0, dof_enabled=False)

    def problems(self, axis: str) -> list[str]:
        keys = AXIS_KEYS[axis]
        out = []
        for name in ("mass", "k", "c", "initial_disp", "stop_max", "stop_min",
                     "stop_stiffness", "stop_damping"):
            if not math.isfinite(getattr(self, name)):
                out.append(f"{keys[name]} must be finite")
        if out:
            return out
        if self.dof_enabled and self.mass <= 0.0:
            out.append(f"{keys['mass']} must be > 0 when {keys['dof_enabled']} is True "
                       f"(got {self.mass:g})")
        for name in ("mass", "k", "c", "stop_stiffness", "stop_damping"):
            if getattr(self, name) < 0.0:
                out.append(f"{keys[name]} must be >= 0 (got {getattr(self, name):g})")
        if not self.stop_min < self.stop_max:
            out.append(f"{keys['stop_min']} ({self.stop_min:g}) must be less than "
                       f"{keys['stop_max']} ({self.stop_max:g})")
        elif not self.stop_min <= self.initial_disp <= self.stop_max:
            out.append(f"{keys['initial_disp']} ({self.initial_disp:g}) must lie within "
                       f"[{keys['stop_min']}, {keys['stop_max']}]")
        return out


@dataclass(frozen=True)
class TmdConfig:
    """Both dampers plus the shared settings.

    A disabled axis is treated as absent: zero mass, zero loads, state held
    at its initial displacement. ``mount_P`` is carried for callers that
    transport loads to another node; the load equations themselves use
    displacements about P only.
    """

    x_axis: TmdAxisParams
    y_axis: TmdAxisParams
    gravity: float = 9.81
    mount_P: tuple[float, float, float] = (0.0, 0.0, 0.0)
    control_mode: ControlMode = ControlMode.PASSIVE

    def problems(self) -> list[str]:
        out = self.x_axis.problems("x") + self.y_axis.problems("y")
        if not (math.isfinite(self.gravity) and self.gravity >= 0.0):
            out.append(f"GRAVITY must be finite and >= 0 (got {self.gravity:g})")
        if not all(math.isfinite(v) for v in self.mount_P):
            out.append("TMD_P_X/TMD_P_Y/TMD_P_Z must be finite")
        if self.control_mode not in (ControlMode.PASSIVE, ControlMode.ACTIVE):
            out.append(f"TMD_CMODE must be 1 (passive) or 2 (active), got {self.control_mode!r}")
        return out

    def validate(self) -> "TmdConfig":
        problems = self.problems()
        if problems:
            raise ConfigError("invalid TMD configuration: " + "; ".join(problems))
        return self

    def initial_state(self) -> "TmdState":
        return TmdState(self.x_axis.initial_disp, 0.0, self.y_axis.initial_disp, 0.0)


class TmdState(NamedTuple):
    x: float
    x_dot: float
    y: float
    y_dot: float


class ExternalForce(NamedTuple):
    f_x: float = 0.0
    f_y: float = 0.0


ZERO_FORCE = ExternalForce(0.0, 0.0)


class ConstraintForces(NamedTuple):
    """Track reactions on the masses, nacelle-frame components (N)."""

    fy_tmdx: float
    fz_tmdx: float
    fx_tmdy: float
    fz_tmdy: float


@dataclass(frozen=True)
class LoadOutput:
    force_G: np.ndarray
    moment_G: np.ndarray
    constraints: ConstraintForces
    stop_fx: float
    stop_fy: float
    mount_P: tuple[float, float, float] = field(default=(0.0, 0.0, 0.0))


def stop_force(pos: float, vel: float, axis: TmdAxisParams) -> float:
    """Penalty force from the end stops of a track.

    Zero inside ``[stop_min, stop_max]``. Beyond a stop the spring always
    acts; the damper only acts while the mass is still moving outward.
    """
    if pos > axis.stop_max:
        dx = pos - axis.stop_max
        if vel <= 0.0:
            return -axis.stop_stiffness * dx
        return -(axis.stop_stiffness * dx + axis.stop_damping * vel)
    if pos < axis.stop_min:
        dx = pos - axis.stop_min
        if vel >= 0.0:
            return -axis.stop_stiffness * dx
        return -(axis.stop_stiffness * dx + axis.stop_damping * vel)
    return 0.0


def active_force(mode: ControlMode, command: ExternalForce) -> ExternalForce:
    """Passive mode ignores any command; active mode passes it through."""
    if mode == ControlMode.PASSIVE:
        return ZERO_FORCE
    return ExternalForce(float(command[0]), float(command[1]))


def state_derivative(s, u: NacelleMotionNacelleFrame, cfg: TmdConfig,
                     f_ext: ExternalForce = ZERO_FORCE) -> np.ndarray:
    """Time derivative (x_dot, x_ddot, y_dot, y_ddot) of the TMD state.

    Raises :class:`NumericalFailure` if the result is not finite.
    """
    x, xd, y, yd = s
    wx, wy, wz = u.omega_N
    ax_P, ay_P, _ = u.accel_P_N
    gx, gy, _ = u.gravity_N
    ex = cfg.x_axis
    ey = cfg.y_axis

    if ex.dof_enabled:
        fsx = stop_force(x, xd, ex)
        xdd = ((wy * wy + wz * wz - ex.k / ex.mass) * x - (ex.c / ex.mass) * xd
               - ax_P + gx + (f_ext[0] + fsx) / ex.mass)
    else:
        xd = xdd = 0.0
    if ey.dof_enabled:
        fsy = stop_force(y, yd, ey)
        ydd = ((wx * wx + wz * wz - ey.k / ey.mass) * y - (ey.c / ey.mass) * yd
               - ay_P + gy + (f_ext[1] + fsy) / ey.mass)
    else:
        yd = ydd = 0.0

    if not all(map(math.isfinite, (xd, xdd, yd, ydd))):
        raise NumericalFailure("non-finite TMD state derivative")
    return np.array([xd, xdd, yd, ydd])


def state_space_matrices(s, u: NacelleMotionNacelleFrame, cfg: TmdConfig,
                         f_ext: ExternalForce = ZERO_FORCE) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(A, B)`` with ``state_derivative == A @ s + B``.

    A depends on the nacelle rates only; B carries the base acceleration,
    gravity, external force and (state-dependent) stop force. Rows of a
    disabled axis are zero.
    """
    x, xd, y, yd = s
    wx, wy, wz = u.omega_N
    A = np.zeros((4, 4))
    B = np.zeros(4)
    ex, ey = cfg.x_axis, cfg.y_axis
    if ex.dof_enabled:
        A[0, 1] = 1.0
        A[1, 0] = wy**2 + wz**2 - ex.k / ex.mass
        A[1, 1] = -ex.c / ex.mass
        B[1] = (-u.accel_P_N[0] + u.gravity_N[0]
                + (f_ext[0] + stop_force(x, xd, ex)) / ex.mass)
    if ey.dof_enabled:
        A[2, 3] = 1.0
        A[3, 2] = wx**2 + wz**2 - ey.k / ey.mass
        A[3, 3] = -ey.c / ey.mass
        B[3] = (-u.accel_P_N[1] + u.gravity_N[1]
                + (f_ext[1] + stop_force(y, yd, ey)) / ey.mass)
    return A, B


def constraint_forces(s, u: NacelleMotionNacelleFrame, cfg: TmdConfig) -> ConstraintForces:
    """Off-track reactions that keep each mass on its rail."""
    x, xd, y, yd = s
    wx, wy, wz = u.omega_N
    alx, aly, alz = u.alpha_N
    ax_P, ay_P, az_P = u.accel_P_N
    gx, gy, gz = u.gravity_N

    fy_x = fz_x = fx_y = fz_y = 0.0
    if cfg.x_axis.dof_enabled:
        m = cfg.x_axis.mass
        fy_x = m * (-gy + ay_P + (alz + wx * wy) * x + 2.0 * wz * xd)
        fz_x = m * (-gz + az_P - (aly - wx * wz) * x - 2.0 * wy * xd)
    if cfg.y_axis.dof_enabled:
        m = cfg.y_axis.mass
        fx_y = m * (-gx + ax_P - (alz - wx * wy) * y - 2.0 * wz * yd)
        fz_y = m * (-gz + az_P + (alx + wy * wz) * y + 2.0 * wx * yd)
    return ConstraintForces(fy_x, fz_x, fx_y, fz_y)


def nacelle_frame_loads(s, u: NacelleMotionNacelleFrame, cfg: TmdConfig,
                        f_ext: ExternalForce = ZERO_FORCE):
    """Reaction force and moment on the nacelle in nacelle components.

    Returns ``(force_N, moment_N, constraints, stop_fx, stop_fy)``.
    """
    x, xd, y, yd = s
    ex, ey = cfg.x_axis, cfg.y_axis
    cf = constraint_forces(s, u, cfg)

    fx_row = fy_row = 0.0
    fsx = fsy = 0.0
    if ex.dof_enabled:
        fsx = stop_force(x, xd, ex)
        fx_row = ex.k * x + ex.c * xd - fsx - f_ext[0]
    else:
        x = 0.0
    if ey.dof_enabled:
        fsy = stop_force(y, yd, ey)
        fy_row = ey.k * y + ey.c * yd - fsy - f_ext[1]
    else:
        y = 0.0

    force_N = np.array([fx_row - cf.fx_tmdy,
                        fy_row - cf.fy_tmdx,
                        -cf.fz_tmdx - cf.fz_tmdy])
    moment_N = np.array([-cf.fz_tmdy * y,
                         cf.fz_tmdx * x,
                         -cf.fy_tmdx * x + cf.fx_tmdy * y])
    return force_N, moment_N, cf, fsx, fsy


def output_loads(s, u: NacelleMotionNacelleFrame, R: np.ndarray, cfg: TmdConfig,
                 f_ext: ExternalForce = ZERO_FORCE) -> LoadOutput:
    """Reaction force and moment the TMDs exert on the nacelle, global frame.

    Moments are taken about the mount origin P. The sign of ``f_ext`` follows
    the actuator convention: a commanded force on the mass reacts on the
    nacelle.
    """
    force_N, moment_N, cf, fsx, fsy = nacelle_frame_loads(s, u, cfg, f_ext)
    return LoadOutput(
        force_G=rotate_to_global(R, force_N),
        moment_G=rotate_to_global(R, moment_N),
        constraints=cf,
        stop_fx=fsx,
        stop_fy=fsy,
        mount_P=cfg.mount_P,
    )
