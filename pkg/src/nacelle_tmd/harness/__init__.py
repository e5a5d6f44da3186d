"""Verification oracle, coupled tower demo and passive tuner."""

from .oracle import PenaltyOracleConfig, inertial_oracle
from .profiles import MotionProfile, constant_yaw_rate, verification_suite
from .tower import CoupledResult, Multisine, TowerModel, coupled_energy, coupled_tower_simulate
from .tune import TuneResult, den_hartog, grid_search_hinf, tune_passive
from .verify import VerifyReport, compare_series, default_verify_config, run_suite, verify_profile

__all__ = [
    "CoupledResult",
    "MotionProfile",
    "Multisine",
    "PenaltyOracleConfig",
    "TowerModel",
    "TuneResult",
    "VerifyReport",
    "compare_series",
    "constant_yaw_rate",
    "coupled_energy",
    "coupled_tower_simulate",
    "default_verify_config",
    "den_hartog",
    "grid_search_hinf",
    "inertial_oracle",
    "run_suite",
    "tune_passive",
    "verification_suite",
    "verify_profile",
]
