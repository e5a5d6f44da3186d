"""Nacelle-mounted tuned mass dampers in a moving, rotating frame."""

from .errors import ConfigError, MotionError, NumericalFailure, OracleInvalidError
from .frames import (
    NacelleMotionNacelleFrame,
    NacelleMotionSample,
    euler_to_rotation,
    gravity_in_nacelle,
    rotate_to_global,
    rotate_to_nacelle,
)
from .integrate import ForceSchedule, MotionSeries, SimResult, rk4_step, sample_motion, simulate
from .io import parse_config, read_motion_csv, render_config, write_result_csv
from .tmd_core import (
    ConstraintForces,
    ControlMode,
    ExternalForce,
    LoadOutput,
    TmdAxisParams,
    TmdConfig,
    TmdState,
    active_force,
    constraint_forces,
    output_loads,
    state_derivative,
    state_space_matrices,
    stop_force,
)

__version__ = "0.1.0"
