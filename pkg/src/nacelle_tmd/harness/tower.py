"""Closed-loop demo: a modal tower top carrying the nacelle TMDs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ConfigError, NumericalFailure
from ..frames import NacelleMotionNacelleFrame
from ..integrate import grid_size, rk4_step
from ..tmd_core import ZERO_FORCE, TmdConfig, nacelle_frame_loads, state_derivative


@dataclass(frozen=True)
class TowerModel:
    """Modal mass, stiffness and damping for fore-aft (x) and side-side (y)."""

    mass_fa: float
    stiffness_fa: float
    damping_fa: float
    mass_ss: float
    stiffness_ss: float
    damping_ss: float

    @classmethod
    def symmetric(cls, mass: float, stiffness: float, damping: float) -> "TowerModel":
        return cls(mass, stiffness, damping, mass, stiffness, damping)

    @property
    def M(self) -> np.ndarray:
        return np.array([self.mass_fa, self.mass_ss])

    @property
    def K(self) -> np.ndarray:
        return np.array([self.stiffness_fa, self.stiffness_ss])

    @property
    def C(self) -> np.ndarray:
        return np.array([self.damping_fa, self.damping_ss])

    @property
    def omega_fa(self) -> float:
        return math.sqrt(self.stiffness_fa / self.mass_fa)

    def validate(self, allow_zero_damping: bool = True) -> "TowerModel":
        for name in ("mass_fa", "stiffness_fa", "mass_ss", "stiffness_ss"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ConfigError(f"tower {name} must be > 0, got {v!r}")
        for name in ("damping_fa", "damping_ss"):
            v = getattr(self, name)
            if not (math.isfinite(v) and (v > 0.0 or (allow_zero_damping and v == 0.0))):
                raise ConfigError(f"tower {name} must be positive, got {v!r}")
        return self


@dataclass
class CoupledResult:
    """Coupled trajectory: ``states`` columns are (q_x, q_x_dot, q_y, q_y_dot,
    x, x_dot, y, y_dot); ``tmd_force`` is the TMD reaction on the tower top."""

    t: np.ndarray
    states: np.ndarray
    tmd_force: np.ndarray
    excitation: np.ndarray

    def rms(self, column: int = 0) -> float:
        return float(np.sqrt(np.mean(self.states[:, column] ** 2)))


def _level_inputs(accel_xy, g):
    return NacelleMotionNacelleFrame(
        accel_P_N=np.array([accel_xy[0], accel_xy[1], 0.0]),
        omega_N=np.zeros(3), alpha_N=np.zeros(3), gravity_N=np.array([0.0, 0.0, -g]))


class _Coupled:
    def __init__(self, tower: TowerModel, cfg: TmdConfig, excitation: Callable):
        self.M, self.K, self.C = tower.M, tower.K, tower.C
        self.cfg = cfg
        self.excitation = excitation
        # The reaction is affine in the tower-top acceleration through the
        # constraint forces; its slope does not depend on the TMD state.
        zero = np.zeros(4)
        f0 = nacelle_frame_loads(zero, _level_inputs((0.0, 0.0), cfg.gravity), cfg)[0][:2]
        J = np.empty((2, 2))
        for j in range(2):
            e = np.zeros(2)
            e[j] = 1.0
            J[:, j] = nacelle_frame_loads(zero, _level_inputs(e, cfg.gravity), cfg)[0][:2] - f0
        self.lhs = np.diag(self.M) - J

    def tower_accel(self, t, s):
        q, qd, tmd = s[[0, 2]], s[[1, 3]], s[4:]
        f0 = nacelle_frame_loads(tmd, _level_inputs((0.0, 0.0), self.cfg.gravity), self.cfg)[0][:2]
        rhs = -self.K * q - self.C * qd + f0 + np.asarray(self.excitation(t), dtype=float)
        return np.linalg.solve(self.lhs, rhs)

    def __call__(self, t, s, _ctx=None):
        qdd = self.tower_accel(t, s)
        tmd_d = state_derivative(s[4:], _level_inputs(qdd, self.cfg.gravity), self.cfg, ZERO_FORCE)
        out = np.array([s[1], qdd[0], s[3], qdd[1], *tmd_d])
        if not np.all(np.isfinite(out)):
            raise NumericalFailure("non-finite coupled derivative", t)
        return out


def coupled_tower_simulate(tower: TowerModel, cfg: TmdConfig, excitation: Callable,
                           dt: float, horizon: float) -> CoupledResult:
    """Integrate tower top plus TMDs as one ODE with RK4.

    ``excitation(t)`` returns the (x, y) force on the tower top. The tower
    top acceleration drives the TMDs; their reaction force loads the tower.
    """
    tower.validate()
    cfg.validate()
    if not dt > 0.0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    n = grid_size(horizon, dt)
    rhs = _Coupled(tower, cfg, excitation)
    t = dt * np.arange(n)
    states = np.empty((n, 8))
    force = np.empty((n, 2))
    exc = np.empty((n, 2))
    s = np.zeros(8)
    s[4:] = cfg.initial_state()
    for i in range(n):
        if i > 0:
            s = rk4_step(rhs, s, float(t[i - 1]), dt)
        qdd = rhs.tower_accel(float(t[i]), s)
        states[i] = s
        force[i] = nacelle_frame_loads(s[4:], _level_inputs(qdd, cfg.gravity), cfg)[0][:2]
        exc[i] = excitation(float(t[i]))
    return CoupledResult(t, states, force, exc)


def coupled_energy(tower: TowerModel, cfg: TmdConfig, states: np.ndarray) -> np.ndarray:
    """Mechanical energy of tower plus TMDs for each state row."""
    qx, qxd, qy, qyd, x, xd, y, yd = states.T
    e = 0.5 * (tower.mass_fa * qxd**2 + tower.stiffness_fa * qx**2
               + tower.mass_ss * qyd**2 + tower.stiffness_ss * qy**2)
    ax, ay = cfg.x_axis, cfg.y_axis
    if ax.dof_enabled:
        e = e + 0.5 * ax.mass * ((qxd + xd) ** 2 + qyd**2) + 0.5 * ax.k * x**2
    if ay.dof_enabled:
        e = e + 0.5 * ay.mass * (qxd**2 + (qyd + yd) ** 2) + 0.5 * ay.k * y**2
    return e


class Multisine:
    """Deterministic broadband force: equal-amplitude tones with Schroeder
    phases, one signal per direction."""

    def __init__(self, w_min: float, w_max: float, n_tones: int = 120,
                 amplitude: float = 1.0, direction=(1.0, 0.0)):
        self.w = np.linspace(w_min, w_max, n_tones)
        k = np.arange(1, n_tones + 1)
        self.phase = -np.pi * k * (k - 1) / n_tones
        self.scale = amplitude * math.sqrt(2.0 / n_tones)
        self.direction = np.asarray(direction, dtype=float)

    def __call__(self, t: float) -> np.ndarray:
        return self.scale * np.sum(np.cos(self.w * t + self.phase)) * self.direction


def no_excitation(t: float) -> np.ndarray:
    return np.zeros(2)
