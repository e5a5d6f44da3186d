"""Rotation and frame utilities for nacelle kinematics.

Vectors are numpy arrays of shape (3,). Rotation matrices are (3, 3) arrays
mapping global-frame components onto nacelle-frame components (R_NG).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REPAIR_TOL = 1e-6
REJECT_TOL = 1e-3


class RotationError(ValueError):
    """Raised when a supplied matrix is too far from a proper rotation."""


def orthonormality_defect(R: np.ndarray) -> float:
    """Largest entry of |R^T R - I|."""
    R = np.asarray(R, dtype=float)
    return float(np.max(np.abs(R.T @ R - np.eye(3))))


def gram_schmidt(R: np.ndarray) -> np.ndarray:
    """One Gram-Schmidt pass over the rows of ``R`` (or of each matrix in a stack).

    Rows are the nacelle axes expressed in global components, so
    orthonormalizing them keeps the first axis direction fixed.
    """
    R = np.asarray(R, dtype=float)
    r1, r2, r3 = R[..., 0, :], R[..., 1, :], R[..., 2, :]

    def unit(v):
        return v / np.sqrt(np.sum(v * v, axis=-1, keepdims=True))

    def dot(a, b):
        return np.sum(a * b, axis=-1, keepdims=True)

    e1 = unit(r1)
    e2 = unit(r2 - dot(r2, e1) * e1)
    e3 = unit(r3 - dot(r3, e1) * e1 - dot(r3, e2) * e2)
    return np.stack([e1, e2, e3], axis=-2)


def as_rotation(R, *, repair_tol: float = REPAIR_TOL,
                reject_tol: float = REJECT_TOL) -> np.ndarray:
    """Validate a user-supplied rotation matrix.

    Matrices whose orthonormality defect exceeds ``repair_tol`` get one
    Gram-Schmidt pass; above ``reject_tol`` (or with a negative determinant)
    a :class:`RotationError` is raised.
    """
    R = np.array(R, dtype=float).reshape(3, 3)
    if not np.all(np.isfinite(R)):
        raise RotationError("rotation matrix contains non-finite entries")
    defect = orthonormality_defect(R)
    if defect > reject_tol:
        raise RotationError(
            f"rotation matrix is not orthonormal (defect {defect:.3g} > {reject_tol:g})")
    if np.linalg.det(R) < 0.0:
        raise RotationError("rotation matrix has determinant -1 (reflection)")
    if defect > repair_tol:
        R = gram_schmidt(R)
    return R


def rotate_to_nacelle(R: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Express the global-frame vector ``v`` in nacelle components (R v)."""
    return R @ v


def rotate_to_global(R: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Express the nacelle-frame vector ``v`` in global components (R^T v)."""
    return R.T @ v


def gravity_in_nacelle(R: np.ndarray, g: float) -> np.ndarray:
    """Gravitational acceleration (0, 0, -g) expressed in the nacelle frame."""
    return R @ np.array([0.0, 0.0, -g])


def rot_x(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def euler_to_rotation(theta: float, phi: float, psi: float) -> np.ndarray:
    """Build R_NG = Rx(theta) Ry(phi) Rz(psi).

    This is an input convenience only. The angle rates are *not* the
    angular velocity components except near zero angles; angular velocity
    must always be supplied separately.
    """
    return rot_x(theta) @ rot_y(phi) @ rot_z(psi)


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix: skew(a) @ b == a x b."""
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


@dataclass(frozen=True)
class NacelleMotionSample:
    """Prescribed nacelle kinematics at one instant, in global components.

    Attributes
    ----------
    t : float
        Time (s).
    accel_P_global : np.ndarray
        Translational acceleration of the mount origin P (m/s^2).
    R_NG : np.ndarray
        Global-to-nacelle rotation matrix.
    omega_global : np.ndarray
        Nacelle angular velocity (rad/s).
    alpha_global : np.ndarray
        Nacelle angular acceleration (rad/s^2).
    """

    t: float
    accel_P_global: np.ndarray
    R_NG: np.ndarray
    omega_global: np.ndarray
    alpha_global: np.ndarray

    @classmethod
    def at_rest(cls, t: float = 0.0, R_NG=None) -> "NacelleMotionSample":
        R = np.eye(3) if R_NG is None else np.asarray(R_NG, dtype=float)
        z = np.zeros(3)
        return cls(t, z, R, z, z)


@dataclass(frozen=True)
class NacelleMotionNacelleFrame:
    """Nacelle kinematics and gravity expressed in nacelle components.

    ``omega_N`` is read as (theta_dot, phi_dot, psi_dot), i.e. rates about
    the nacelle x, y and z axes; ``alpha_N`` likewise.
    """

    accel_P_N: np.ndarray
    omega_N: np.ndarray
    alpha_N: np.ndarray
    gravity_N: np.ndarray

    @classmethod
    def from_sample(cls, sample: NacelleMotionSample, g: float) -> "NacelleMotionNacelleFrame":
        R = sample.R_NG
        return cls(
            accel_P_N=rotate_to_nacelle(R, sample.accel_P_global),
            omega_N=rotate_to_nacelle(R, sample.omega_global),
            alpha_N=rotate_to_nacelle(R, sample.alpha_global),
            gravity_N=gravity_in_nacelle(R, g),
        )

    @classmethod
    def quiescent(cls, g: float = 9.81, R_NG=None) -> "NacelleMotionNacelleFrame":
        return cls.from_sample(NacelleMotionSample.at_rest(R_NG=R_NG), g)
