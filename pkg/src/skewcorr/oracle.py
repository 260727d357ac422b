"""Brute-force evaluation of SQD and SMIN by derivative-free optimization.

The summed skew information is optimized directly over the four basis
angles (theta_A, phi_A, theta_B, phi_B): a coarse grid over
theta in [0, pi/2], phi in [0, 2 pi) picks a starting cell, then a
shrinking coordinate pattern search refines it from the grid
optimum and from three seeded jittered copies of it.  Nothing here uses the closed
forms, so agreement with :mod:`skewcorr.correlations` is a real check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg, states
from .correlations import MeasurementBases, angles_from_vector, skew_information
from .states import DEFAULT_TOL

MAX_MOVES_PER_LEVEL = 50
# moves must beat the incumbent by more than rounding noise
MIN_IMPROVEMENT = 1e-15
RESTARTS = 3
SCAN_CHUNK = 1024


@dataclass(frozen=True)
class OptimizerConfig:
    grid_theta: int = 48
    grid_phi: int = 48
    refine_iters: int = 60
    refine_shrink: float = 0.6
    target_step: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.grid_theta < 8 or self.grid_phi < 8:
            raise ValueError("grid counts must be at least 8")
        if not 0.0 < self.refine_shrink < 1.0:
            raise ValueError("refine_shrink must lie in (0, 1)")
        if self.target_step <= 0:
            raise ValueError("target_step must be positive")

    @property
    def theta_step(self) -> float:
        return (math.pi / 2) / (self.grid_theta - 1)

    @property
    def phi_step(self) -> float:
        return 2 * math.pi / self.grid_phi


@dataclass
class OracleOutcome:
    value: float
    angles: tuple[float, float, float, float]
    evaluations: int
    converged: bool
    final_step: float
    free: tuple[bool, bool]


def objective(rho, angles, sqrt_rho=None) -> float:
    """Summed skew information for the product bases given by ``angles``."""
    return skew_information(rho, MeasurementBases(*angles), sqrt_rho).total


def _bloch_objective(m: np.ndarray, s: np.ndarray):
    """Fast form of :func:`objective` in terms of the two Bloch vectors.

    With |k><k| = (I + n.sigma)/2 for each qubit, the four outcome
    amplitudes are <k_A k_B|S|k_A k_B> = (1/4)(s00 +- a.u +- b.v +-+ u.T v),
    with a, b, T the local and correlation blocks of the Pauli table of S.
    Agrees with :func:`objective` to rounding.
    """
    table = linalg.pauli_coeffs(s).table
    s00 = float(table[0, 0])
    a = [float(x) for x in table[1:, 0]]
    b = [float(x) for x in table[0, 1:]]
    t = [[float(x) for x in row] for row in table[1:, 1:]]
    trace = float(np.trace(m).real)

    def g(u, v):
        au = a[0] * u[0] + a[1] * u[1] + a[2] * u[2]
        bv = b[0] * v[0] + b[1] * v[1] + b[2] * v[2]
        tv = [r[0] * v[0] + r[1] * v[1] + r[2] * v[2] for r in t]
        utv = u[0] * tv[0] + u[1] * tv[1] + u[2] * tv[2]
        total = 0.0
        for ea in (1.0, -1.0):
            for eb in (1.0, -1.0):
                d = 0.25 * (s00 + ea * au + eb * bv + ea * eb * utv)
                total += d * d
        return trace - total

    return g


def _grid_pairs(cfg: OptimizerConfig) -> np.ndarray:
    thetas = np.linspace(0.0, math.pi / 2, cfg.grid_theta)
    phis = np.arange(cfg.grid_phi) * cfg.phi_step
    t, p = np.meshgrid(thetas, phis, indexing="ij")
    return np.stack([t.ravel(), p.ravel()], axis=1)


def _bloch(pairs: np.ndarray) -> np.ndarray:
    """Bloch vectors of the first basis vector, (sin 2t cos p, -sin 2t sin p, cos 2t)."""
    s2 = np.sin(2 * pairs[:, 0])
    return np.stack([s2 * np.cos(pairs[:, 1]), -s2 * np.sin(pairs[:, 1]), np.cos(2 * pairs[:, 0])], axis=1)


def _grid_scan(s: np.ndarray, pairs_a: np.ndarray, pairs_b: np.ndarray, sign: float):
    """Index of the best grid tuple for ``sign * objective`` (minimization).

    Summing the four outcomes (Bloch vectors +-u, +-v) cancels the cross
    terms, leaving  sum_k <k|S|k>^2 = (1/4)[s00^2 + (a.u)^2 + (b.v)^2 + (u.T v)^2]
    with a, b, T the local and correlation blocks of the Pauli table of S.
    The scan therefore ranks tuples by  -sign * ((a.u)^2 + (b.v)^2 + (u.T v)^2)
    (the constant terms do not affect the ranking).  Float32 is enough to pick a
    starting cell; the search refines in double precision.  Ties resolve to
    the first tuple in (theta_A, phi_A, theta_B, phi_B) order.
    """
    table = linalg.pauli_coeffs(s).table
    u = _bloch(pairs_a).astype(np.float32)
    v = _bloch(pairs_b).astype(np.float32)
    au = (u @ table[1:, 0].astype(np.float32)) ** 2
    bv = (v @ table[0, 1:].astype(np.float32)) ** 2
    ut = u @ table[1:, 1:].astype(np.float32)
    nb = len(pairs_b)
    pick = np.argmax if sign > 0 else np.argmin
    best, best_idx = None, (0, 0)
    # row chunks bound memory at fine grids; strict comparison keeps the first tie
    for lo in range(0, len(pairs_a), SCAN_CHUNK):
        corr = ut[lo:lo + SCAN_CHUNK] @ v.T
        corr *= corr
        corr += au[lo:lo + SCAN_CHUNK, None]
        corr += bv[None, :]
        flat = int(pick(corr))
        val = float(corr.flat[flat])
        if best is None or (val > best if sign > 0 else val < best):
            best, best_idx = val, (lo + flat // nb, flat % nb)
    return best_idx, len(pairs_a) * nb


def _pattern_search(f, x0: np.ndarray, steps: np.ndarray, cfg: OptimizerConfig):
    """Shrinking coordinate search.

    Each poll tries +-step on every free coordinate and moves to the best
    improving point (at most ``MAX_MOVES_PER_LEVEL`` moves per step size);
    with no improving poll the steps shrink by ``refine_shrink``.
    """
    x = x0.copy()
    fx = f(x)
    evals = 1
    steps = steps.copy()
    for _ in range(cfg.refine_iters):
        if steps.max() <= cfg.target_step:
            break
        for _ in range(MAX_MOVES_PER_LEVEL):
            best_f, best_x = fx - MIN_IMPROVEMENT, None
            for i in range(len(x)):
                for direction in (1.0, -1.0):
                    y = x.copy()
                    y[i] += direction * steps[i]
                    fy = f(y)
                    evals += 1
                    if fy < best_f:
                        best_f, best_x = fy, y
            if best_x is None:
                break
            x, fx = best_x, best_f
        steps *= cfg.refine_shrink
    return x, fx, evals, float(steps.max())


def _optimize(rho, cfg: OptimizerConfig, sign: float, pinned_a=None, pinned_b=None) -> OracleOutcome:
    """Minimize ``sign * objective`` over the free sides' angles.

    ``pinned_a``/``pinned_b`` fix a side's (theta, phi) and remove its
    variables from the search.
    """
    m = states.as_array(rho)
    s = linalg.psd_sqrt(m)
    grid = _grid_pairs(cfg)
    pairs_a = grid if pinned_a is None else np.array([pinned_a])
    pairs_b = grid if pinned_b is None else np.array([pinned_b])
    free = (pinned_a is None, pinned_b is None)

    def expand(x):
        if free[0] and free[1]:
            return tuple(x)
        return (*x, *pinned_b) if free[0] else (*pinned_a, *x)

    if not any(free):
        angles = (*pinned_a, *pinned_b)
        return OracleOutcome(objective(m, angles, s), angles, 1, True, 0.0, free)

    g = _bloch_objective(m, s)
    cos, sin = math.cos, math.sin

    def f(x):
        ta, pa, tb, pb = expand(x)
        sa, sb = sin(2 * ta), sin(2 * tb)
        u = (sa * cos(pa), -sa * sin(pa), cos(2 * ta))
        v = (sb * cos(pb), -sb * sin(pb), cos(2 * tb))
        return sign * g(u, v)

    (ia, ib), evals = _grid_scan(s, pairs_a, pairs_b, sign)
    x0 = []
    if free[0]:
        x0.extend(pairs_a[ia])
    if free[1]:
        x0.extend(pairs_b[ib])
    x0 = np.array(x0)
    cell = np.array([cfg.theta_step, cfg.phi_step] * (len(x0) // 2))

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    starts = [x0] + [x0 + rng.uniform(-1.0, 1.0, size=len(x0)) * cell for _ in range(RESTARTS)]
    best = None
    for x_start in starts:
        x, fx, n, step = _pattern_search(f, x_start, cell, cfg)
        evals += n
        if best is None or fx < best[1]:
            best = (x, fx, step)
    x, _, step = best
    angles = tuple(float(v) for v in expand(x))
    return OracleOutcome(objective(m, angles, s), angles, evals, step <= cfg.target_step, step, free)


def sqd_numeric(rho, cfg: OptimizerConfig | None = None) -> OracleOutcome:
    """Minimum summed skew information over all product projective bases."""
    return _optimize(rho, cfg or OptimizerConfig(), 1.0)


def unconstrained_max(rho, cfg: OptimizerConfig | None = None) -> OracleOutcome:
    """Maximum over all product bases, ignoring the commutation constraint."""
    return _optimize(rho, cfg or OptimizerConfig(), -1.0)


def _pinned_angles(marginal) -> tuple[float, float]:
    return angles_from_vector(linalg.hermitian_eig(marginal).eigenvectors[:, 0])


def smin_numeric(rho, cfg: OptimizerConfig | None = None, tol: float = DEFAULT_TOL) -> OracleOutcome:
    """Maximum summed skew information over bases commuting with rho_A x rho_B.

    A nondegenerate marginal admits only its eigenbasis, so that side is
    pinned; a degenerate one (gap <= tol) leaves both of its angles free.
    """
    m = states.as_array(rho)
    rho_a, rho_b = linalg.partial_trace(m, "A"), linalg.partial_trace(m, "B")
    pinned_a = None if states.marginal_gap(rho_a) <= tol else _pinned_angles(rho_a)
    pinned_b = None if states.marginal_gap(rho_b) <= tol else _pinned_angles(rho_b)
    return _optimize(m, cfg or OptimizerConfig(), -1.0, pinned_a, pinned_b)
