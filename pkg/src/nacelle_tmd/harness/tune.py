"""Passive TMD tuning on a single tower mode.

Objectives are evaluated on the two-DOF frequency response from tower-top
force to tower-top displacement, on a log grid spanning 0.2 to 5 times the
tower frequency. Damping ratios use Den Hartog's convention,
zeta = c / (2 m omega_tower).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

N_FREQ = 2000
BAND = (0.2, 5.0)


def frequency_grid(omega_t: float, n: int = N_FREQ) -> np.ndarray:
    return omega_t * np.logspace(math.log10(BAND[0]), math.log10(BAND[1]), n)


def tower_receptance(w, M, K, C, m, k, c):
    """Tower displacement per unit tower force with an attached absorber.

    Broadcasts over ``w`` and over the absorber parameters.
    """
    s = 1j * w
    absorber = m * s**2 + c * s + k
    coupling = c * s + k
    det = (M * s**2 + C * s + K + coupling) * absorber - coupling**2
    return absorber / det


def hinf_objective(w, M, K, C, m, k, c):
    return np.max(np.abs(tower_receptance(w, M, K, C, m, k, c)), axis=0)


def rms_objective(w, M, K, C, m, k, c):
    """RMS tower displacement under unit one-sided white-noise force PSD."""
    h2 = np.abs(tower_receptance(w, M, K, C, m, k, c)) ** 2
    return np.sqrt(np.trapezoid(h2, w, axis=0) / (2.0 * np.pi))


OBJECTIVES = {"hinf": hinf_objective, "rms": rms_objective}


@dataclass
class TuneResult:
    k: float
    c: float
    objective: float
    evaluations: int
    converged: bool
    frequency_ratio: float
    damping_ratio: float
    audit: list[tuple[int, float, float, float]] = field(default_factory=list, repr=False)


def nelder_mead(f, x0, step, max_evals=400, xtol=1e-9, ftol=1e-12,
                alpha=1.0, gamma=2.0, rho=0.5, sigma=0.5):
    """Minimize ``f`` with the Nelder-Mead simplex method.

    Standard reflect/expand/contract/shrink moves. Returns
    ``(x_best, f_best, n_evals, converged)``.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    simplex = [x0]
    for i in range(n):
        v = x0.copy()
        v[i] += step[i] if np.ndim(step) else step
        simplex.append(v)
    values = [f(v) for v in simplex]
    evals = n + 1
    if not np.isfinite(values[0]):
        raise ValueError("objective is not finite at the starting point")

    converged = False
    while evals < max_evals:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        size = max(np.max(np.abs(v - simplex[0])) for v in simplex[1:])
        spread = abs(values[-1] - values[0])
        if size < xtol or (spread <= ftol * max(1.0, abs(values[0])) and size < 1e3 * xtol):
            converged = True
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        xr = centroid + alpha * (centroid - worst)
        fr = f(xr)
        evals += 1
        if values[0] <= fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = f(xe)
            evals += 1
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + rho * (xr - centroid)
        else:
            xc = centroid + rho * (worst - centroid)
        fc = f(xc)
        evals += 1
        if fc < min(fr, values[-1]):
            simplex[-1], values[-1] = xc, fc
            continue
        best = simplex[0]
        for i in range(1, n + 1):
            simplex[i] = best + sigma * (simplex[i] - best)
            values[i] = f(simplex[i])
        evals += n
    i = int(np.argmin(values))
    return simplex[i], values[i], evals, converged


def tune_passive(tower, mass_ratio: float, k_box: tuple[float, float] | None = None,
                 c_box: tuple[float, float] | None = None, objective: str = "hinf",
                 max_evals: int = 600) -> TuneResult:
    """Tune TMD stiffness and damping for the tower's fore-aft mode.

    The search runs in box-normalized coordinates (log-scaled where the
    bound is positive) with points clipped to the box. Every objective
    evaluation is recorded in ``audit``.
    """
    if not 0.0 < mass_ratio <= 0.2:
        raise ValueError(f"mass ratio must lie in (0, 0.2], got {mass_ratio!r}")
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; choose from {sorted(OBJECTIVES)}")
    M, K, C = tower.mass_fa, tower.stiffness_fa, tower.damping_fa
    w_t = math.sqrt(K / M)
    m = mass_ratio * M
    if k_box is None:
        k_box = (m * (0.5 * w_t) ** 2, m * (1.5 * w_t) ** 2)
    if c_box is None:
        c_box = (2 * 0.005 * m * w_t, 2 * 0.6 * m * w_t)
    boxes = [tuple(map(float, k_box)), tuple(map(float, c_box))]
    for lo, hi in boxes:
        if not (0.0 < lo <= hi and math.isfinite(hi)):
            raise ValueError(f"search box bounds must satisfy 0 < lo <= hi, got {(lo, hi)}")
    free = [i for i, (lo, hi) in enumerate(boxes) if hi > lo]

    def to_params(u):
        p = [lo for lo, _ in boxes]
        for j, i in enumerate(free):
            lo, hi = boxes[i]
            p[i] = lo * (hi / lo) ** min(max(u[j], 0.0), 1.0)
        return p

    w = frequency_grid(w_t)
    fn = OBJECTIVES[objective]
    audit = []

    def f(u):
        k, c = to_params(u)
        val = float(fn(w, M, K, C, m, k, c))
        audit.append((len(audit), k, c, val))
        if not math.isfinite(val):
            return math.inf
        # Clipped points share the boundary value; the factor steers the
        # simplex back inside.
        outside = float(np.sum(np.clip(u, None, 0.0) ** 2 + np.clip(np.asarray(u) - 1.0, 0.0, None) ** 2))
        return val * (1.0 + outside)

    if free:
        u0 = np.full(len(free), 0.5)
        _, _, _, converged = nelder_mead(f, u0, 0.2, max_evals=max_evals)
    else:
        f(np.zeros(0))
        converged = True
    # Best audited point; identical to the simplex optimum whenever that lies
    # inside the box.
    _, kbest, cbest, fbest = min(audit, key=lambda row: (row[3], row[0]))
    if not math.isfinite(fbest):
        raise ValueError("objective is not finite anywhere the search visited")
    return TuneResult(
        k=float(kbest), c=float(cbest), objective=float(fbest), evaluations=len(audit),
        converged=converged,
        frequency_ratio=math.sqrt(kbest / m) / w_t,
        damping_ratio=float(cbest / (2.0 * m * w_t)),
        audit=audit,
    )


def den_hartog(mass_ratio: float) -> tuple[float, float]:
    """Classical optimum (frequency ratio, damping ratio) for an undamped host."""
    mu = mass_ratio
    return 1.0 / (1.0 + mu), math.sqrt(3.0 * mu / (8.0 * (1.0 + mu) ** 3))


def grid_search_hinf(tower, mass_ratio: float, f_grid, zeta_grid, chunk: int = 50):
    """Exhaustive H-infinity search over (frequency ratio, damping ratio).

    Returns ``(f_best, zeta_best, objective)``.
    """
    M, K, C = tower.mass_fa, tower.stiffness_fa, tower.damping_fa
    w_t = math.sqrt(K / M)
    m = mass_ratio * M
    w = frequency_grid(w_t)[:, None, None]
    f_grid = np.asarray(f_grid, dtype=float)
    zeta_grid = np.asarray(zeta_grid, dtype=float)
    best = (math.nan, math.nan, math.inf)
    for start in range(0, f_grid.size, chunk):
        F, Z = np.meshgrid(f_grid[start:start + chunk], zeta_grid, indexing="ij")
        k = m * (F * w_t) ** 2
        c = 2.0 * Z * m * w_t
        J = hinf_objective(w, M, K, C, m, k, c)
        i = np.unravel_index(np.argmin(J), J.shape)
        if J[i] < best[2]:
            best = (float(F[i]), float(Z[i]), float(J[i]))
    return best
