"""Core-versus-oracle comparison runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..integrate import MotionSeries, simulate
from ..tmd_core import TmdAxisParams, TmdConfig
from .oracle import PenaltyOracleConfig, inertial_oracle
from .profiles import MotionProfile, verification_suite

POSITION_TOL = 1e-4
FORCE_TOL = 1e-3


def default_verify_config() -> TmdConfig:
    """Two dampers with distinct tunings, stops well outside the motion."""
    return TmdConfig(
        x_axis=TmdAxisParams(mass=2.0, k=50.0, c=1.0, initial_disp=0.05,
                             stop_max=5.0, stop_min=-5.0, stop_stiffness=1e6, stop_damping=1e4),
        y_axis=TmdAxisParams(mass=3.0, k=108.0, c=1.5, initial_disp=-0.03,
                             stop_max=5.0, stop_min=-5.0, stop_stiffness=1e6, stop_damping=1e4),
    )


@dataclass(frozen=True)
class VerifyReport:
    name: str
    max_position_error: float
    max_force_error: float
    max_moment_error: float
    max_constraint_error: float
    max_drift: float

    @property
    def passed(self) -> bool:
        return self.max_position_error < POSITION_TOL and self.max_force_error < FORCE_TOL

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.name:<12} pos_err={self.max_position_error:.3e} m  "
                f"force_err={self.max_force_error:.3e} N  "
                f"moment_err={self.max_moment_error:.3e} N*m  "
                f"drift={self.max_drift:.3e} m  {status}")


def compare_series(series: MotionSeries, cfg: TmdConfig, dt: float = 1e-3,
                   horizon: float | None = None,
                   oracle_cfg: PenaltyOracleConfig = PenaltyOracleConfig(),
                   name: str = "series") -> VerifyReport:
    """Run core and oracle on one series and report the worst differences.

    The core's RK4 stages only see exact samples when the series is sampled
    at ``dt / 2``.
    """
    core = simulate(series, cfg, dt, horizon=horizon)
    orc = inertial_oracle(series, cfg, oracle_cfg, dt_out=dt, horizon=horizon)
    pos = np.abs(core.states[:, [0, 2]] - orc.states[:, [0, 2]]).max()
    return VerifyReport(
        name=name,
        max_position_error=float(pos),
        max_force_error=float(np.abs(core.force_G - orc.force_G).max()),
        max_moment_error=float(np.abs(core.moment_G - orc.moment_G).max()),
        max_constraint_error=float(np.abs(core.constraints - orc.constraints).max()),
        max_drift=float(orc.metadata["max_drift"]),
    )


def verify_profile(profile: MotionProfile, cfg: TmdConfig, dt: float = 1e-3,
                   horizon: float = 10.0,
                   oracle_cfg: PenaltyOracleConfig = PenaltyOracleConfig()) -> VerifyReport:
    series = profile.to_series(horizon, 0.5 * dt)
    return compare_series(series, cfg, dt, horizon, oracle_cfg, name=profile.name)


def run_suite(cfg: TmdConfig | None = None, n_profiles: int = 10, dt: float = 1e-3,
              horizon: float = 10.0,
              oracle_cfg: PenaltyOracleConfig = PenaltyOracleConfig()) -> list[VerifyReport]:
    cfg = default_verify_config() if cfg is None else cfg
    return [verify_profile(p, cfg, dt, horizon, oracle_cfg)
            for p in verification_suite()[:n_profiles]]
