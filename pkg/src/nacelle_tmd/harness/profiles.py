"""Analytic nacelle motion profiles used for verification runs.

A profile prescribes the translation of P and the Euler angles of the
nacelle as sums of sinusoids (plus an optional constant rate per angle).
Angular velocity and acceleration are obtained exactly from the rotation
matrix and its time derivatives, so they are consistent with R at every
instant regardless of the Euler sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..integrate import MotionSeries

# (amplitude, angular frequency rad/s, phase rad)
Harmonic = tuple[float, float, float]


def _harmonics(terms, t):
    """Value, first and second derivative of sum A sin(w t + p)."""
    t = np.asarray(t, dtype=float)
    v, d1, d2 = np.zeros_like(t), np.zeros_like(t), np.zeros_like(t)
    for a, w, p in terms:
        s, c = np.sin(w * t + p), np.cos(w * t + p)
        v += a * s
        d1 += a * w * c
        d2 -= a * w * w * s
    return v, d1, d2


def _elementary(axis: int, a):
    """Rotation about a coordinate axis and its first two angle derivatives,
    stacked along the leading axis of ``a``."""
    P = np.zeros((3, 3))
    P[axis, axis] = 1.0
    K = np.zeros((3, 3))
    j, k = (axis + 1) % 3, (axis + 2) % 3
    K[k, j], K[j, k] = 1.0, -1.0
    Q = np.eye(3) - P
    c = np.cos(a)[:, None, None]
    s = np.sin(a)[:, None, None]
    return P + c * Q + s * K, -s * Q + c * K, -c * Q - s * K


def _vee(W):
    return np.stack([W[:, 2, 1], W[:, 0, 2], W[:, 1, 0]], axis=-1)


@dataclass(frozen=True)
class MotionProfile:
    translation: tuple[tuple[Harmonic, ...], tuple[Harmonic, ...], tuple[Harmonic, ...]] = ((), (), ())
    angles: tuple[tuple[Harmonic, ...], tuple[Harmonic, ...], tuple[Harmonic, ...]] = ((), (), ())
    rates: tuple[float, float, float] = (0.0, 0.0, 0.0)
    initial_angles: tuple[float, float, float] = (0.0, 0.0, 0.0)
    name: str = field(default="profile", compare=False)

    def angle_terms(self, t):
        out = []
        for i in range(3):
            v, d1, d2 = _harmonics(self.angles[i], t)
            out.append((self.initial_angles[i] + self.rates[i] * t + v, self.rates[i] + d1, d2))
        return out

    def kinematics_grid(self, ts):
        """Stacked ``(accel_P_G, R_NG, omega_G, alpha_G)`` at the times ``ts``."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        acc = np.stack([_harmonics(self.translation[i], ts)[2] for i in range(3)], axis=-1)
        F, F1, F2 = [], [], []
        for i, (a, rate, accel) in enumerate(self.angle_terms(ts)):
            E, dE, ddE = _elementary(i, a)
            r = rate[:, None, None]
            F.append(E)
            F1.append(dE * r)
            F2.append(ddE * r * r + dE * accel[:, None, None])
        R = F[0] @ F[1] @ F[2]
        Rd = F1[0] @ F[1] @ F[2] + F[0] @ F1[1] @ F[2] + F[0] @ F[1] @ F1[2]
        Rdd = (F2[0] @ F[1] @ F[2] + F[0] @ F2[1] @ F[2] + F[0] @ F[1] @ F2[2]
               + 2.0 * (F1[0] @ F1[1] @ F[2] + F1[0] @ F[1] @ F1[2] + F[0] @ F1[1] @ F1[2]))
        Rt = R.swapaxes(-1, -2)
        omega_N = _vee(-Rd @ Rt)
        alpha_N = _vee(-Rdd @ Rt - Rd @ Rd.swapaxes(-1, -2))
        return (acc, R, np.einsum("kji,kj->ki", R, omega_N),
                np.einsum("kji,kj->ki", R, alpha_N))

    def kinematics(self, t: float):
        """Return ``(accel_P_G, R_NG, omega_G, alpha_G)`` at time ``t``."""
        acc, R, om, al = self.kinematics_grid([t])
        return acc[0], R[0], om[0], al[0]

    def to_series(self, t_end: float, spacing: float, t_start: float = 0.0) -> MotionSeries:
        n = int(round((t_end - t_start) / spacing)) + 1
        ts = t_start + spacing * np.arange(n)
        return MotionSeries(ts, *self.kinematics_grid(ts))


def constant_yaw_rate(rate: float) -> MotionProfile:
    return MotionProfile(rates=(0.0, 0.0, rate), name=f"yaw-rate-{rate:g}")


# Fixed table so every run uses the same suite. Per row: translation
# harmonic for x, y, z as (A, w, phase), one harmonic each for theta, phi,
# psi, then a constant yaw rate.
_SUITE_TABLE = [
    ((0.42, 2.7, 0.31), (0.18, 3.9, 1.70), (0.11, 1.6, 2.45), (0.060, 2.1, 0.40), (0.085, 1.3, 1.10), (0.30, 0.9, 0.20), 0.35),
    ((0.25, 4.1, 2.20), (0.35, 2.2, 0.05), (0.09, 3.3, 1.35), (0.110, 1.7, 2.90), (0.050, 2.6, 0.75), (0.45, 1.2, 2.60), -0.50),
    ((0.30, 3.5, 1.05), (0.28, 1.9, 2.85), (0.15, 2.4, 0.65), (0.075, 3.1, 1.55), (0.120, 1.1, 2.15), (0.60, 0.7, 1.40), 0.80),
    ((0.55, 1.8, 0.90), (0.12, 4.6, 1.20), (0.06, 3.8, 2.70), (0.140, 1.4, 0.25), (0.070, 2.9, 1.95), (0.25, 1.6, 0.55), -0.20),
    ((0.17, 4.8, 2.65), (0.40, 2.5, 0.45), (0.12, 1.9, 1.85), (0.050, 2.4, 2.35), (0.095, 1.8, 0.15), (0.35, 1.9, 2.05), 1.10),
    ((0.38, 2.3, 1.60), (0.22, 3.1, 2.40), (0.08, 4.2, 0.95), (0.090, 2.8, 1.05), (0.060, 3.4, 2.55), (0.50, 0.8, 0.85), -0.90),
    ((0.45, 3.0, 0.15), (0.30, 2.8, 1.45), (0.14, 2.0, 2.10), (0.120, 1.9, 0.60), (0.110, 1.5, 1.30), (0.40, 1.4, 2.95), 0.60),
    ((0.16, 5.0, 2.05), (0.48, 1.7, 0.70), (0.10, 2.9, 0.35), (0.065, 3.6, 2.80), (0.080, 2.2, 0.50), (0.28, 2.3, 1.75), -1.30),
    ((0.26, 3.7, 1.30), (0.26, 3.3, 2.95), (0.17, 1.5, 1.60), (0.100, 2.5, 1.80), (0.130, 1.2, 2.40), (0.55, 1.1, 0.10), 0.15),
    ((0.50, 2.0, 2.50), (0.20, 4.4, 0.25), (0.05, 4.9, 2.20), (0.085, 3.0, 0.95), (0.055, 3.9, 1.65), (0.32, 1.8, 1.25), 1.45),
]


def verification_suite() -> list[MotionProfile]:
    """Ten fixed general-motion profiles (pitch, roll, yaw and translation).

    All satisfy |omega| <= 3 rad/s and |accel_P| <= 5 m/s^2.
    """
    out = []
    for i, (tx, ty, tz, th, ph, ps, yaw_rate) in enumerate(_SUITE_TABLE):
        out.append(MotionProfile(
            translation=((tx,), (ty,), (tz,)),
            angles=((th,), (ph,), (ps,)),
            rates=(0.0, 0.0, yaw_rate),
            name=f"suite-{i:02d}",
        ))
    return out
