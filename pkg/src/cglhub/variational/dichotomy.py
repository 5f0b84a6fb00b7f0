# -*- coding: utf-8 -*-
"""Backward boundary-value problems for the weighted equation of variations

    d/dt w + (Lambda - theta + i omega Lambda) w + a w + b conj(w) = h,  t in (-T, 0],

with P_N w(0) = v_plus prescribed, theta = N + 1/2 and the high modes started
from zero at t = -T. Low modes are swept backward from t = 0, high modes
forward from t = -T; forcing is taken piecewise linear in time and each step
is integrated exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla
from tqdm import tqdm

from cglhub.core.exceptions import BoundViolationError
from cglhub.core.logging import progress_enabled
from cglhub.dynamics.integrator import phi_functions
from cglhub.lattice.shells import ModeBand
from cglhub.spectral.grid import GridSpec, l2_norm
from .coefficients import (FieldSeries, VariationalCoefficients, gauge_zero_mean,
                           series_norm, time_norm)

logger = logging.getLogger(__name__)

SPLITTINGS = ("diagonal", "averaged")


# ═══════════════════════════════════════════════════════════════════════════
#  REPORTS
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class EstimateReport:
    C_measured: float
    theta_measured: float
    bound_C: float
    bound_theta: float
    contraction_factor: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "C_measured": float(self.C_measured),
            "theta_measured": float(self.theta_measured),
            "bound_C": float(self.bound_C),
            "bound_theta": float(self.bound_theta),
            "contraction_factor": float(self.contraction_factor),
            "pass": bool(self.passed),
            "details": self.details,
        }


@dataclass(frozen=True, eq=False)
class ModeSolution:
    times: np.ndarray
    w: np.ndarray
    norm: float
    bound: float
    holds: bool


# ═══════════════════════════════════════════════════════════════════════════
#  SCALAR SWEEPS
# ═══════════════════════════════════════════════════════════════════════════

def _forward_sweep(mu: np.ndarray, h: np.ndarray, dt: float) -> np.ndarray:
    """w' + mu w = h from w(-T) = 0; h has shape (nt, n)."""
    E, p1, p2 = phi_functions(-mu * dt)
    c0, c1 = dt * (p1 - p2), dt * p2
    w = np.zeros(h.shape, complex)
    for j in range(h.shape[0] - 1):
        w[j + 1] = E * w[j] + c0 * h[j] + c1 * h[j + 1]
    return w


def _backward_sweep(mu: np.ndarray, h: np.ndarray, v_plus: np.ndarray, dt: float) -> np.ndarray:
    """w' + mu w = h from w(0) = v_plus, integrated toward the past."""
    E, p1, p2 = phi_functions(mu * dt)
    c0, c1 = dt * p2, dt * (p1 - p2)
    w = np.zeros(h.shape, complex)
    w[-1] = v_plus
    for j in range(h.shape[0] - 2, -1, -1):
        w[j] = E * w[j + 1] - c0 * h[j] - c1 * h[j + 1]
    return w


def _window_times(nt: int, dt: float) -> np.ndarray:
    return -dt * np.arange(nt - 1, -1, -1, dtype=float)


def scalar_mode_solve(lambda_n: int, theta: float, omega: float, h_n, v_plus_n: complex | None = None,
                      *, dt: float, strict: bool = True, tol_factor: float = 5.0) -> ModeSolution:
    """Solve one decoupled mode on the window ending at t = 0.

    Modes with lambda_n <= N (lambda_n < theta) take the terminal value
    ``v_plus_n`` and are swept backward; higher modes are swept forward from
    zero. The result is checked against

        ||w|| <= ||h|| / |lambda_n - theta| + |v_plus_n| / sqrt(2 |lambda_n - theta|)

    in the trapezoidal L2 time norm, with relative slack ``tol_factor * dt``.

    Raises:
        ValueError: v_plus_n given for a high mode, missing for a low one, or
            |lambda_n - theta| < 1/2.
        BoundViolationError: the bound fails and ``strict`` is set.
    """
    gap = lambda_n - theta
    if abs(gap) < 0.5 - 1e-12:
        raise ValueError(f"|lambda - theta| = {abs(gap):.3g} < 1/2")
    low = gap < 0
    if low and v_plus_n is None:
        raise ValueError(f"lambda={lambda_n} < theta={theta}: terminal value v_plus_n is required")
    if not low and v_plus_n is not None:
        raise ValueError(f"lambda={lambda_n} > theta={theta}: no terminal value may be prescribed")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    h = np.asarray(h_n, complex).reshape(-1, 1)
    if len(h) < 2:
        raise ValueError("h_n needs at least two samples")
    mu = np.array([gap + 1j * omega * lambda_n])
    if low:
        w = _backward_sweep(mu, h, np.array([complex(v_plus_n)]), dt)[:, 0]
    else:
        w = _forward_sweep(mu, h, dt)[:, 0]

    norm = time_norm(w, dt)
    v_abs = abs(complex(v_plus_n)) if low else 0.0
    bound = time_norm(h[:, 0], dt) / abs(gap) + v_abs / math.sqrt(2 * abs(gap))
    holds = norm <= bound * (1.0 + tol_factor * dt) + 1e-14
    if not holds:
        msg = f"mode lambda={lambda_n}: ||w||={norm:.6g} exceeds bound {bound:.6g} (dt={dt})"
        if strict:
            raise BoundViolationError(msg)
        logger.warning(msg)
    return ModeSolution(_window_times(len(w), dt), w, norm, bound, bool(holds))


# ═══════════════════════════════════════════════════════════════════════════
#  PROBLEM
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class BackwardProblem:
    """Coefficients on (-T, 0], terminal low-mode data and forcing."""

    coeffs: VariationalCoefficients
    N: int
    omega: float
    v_plus: np.ndarray | None = None
    h: np.ndarray | None = None

    def __post_init__(self):
        c = self.coeffs
        if int(self.N) != self.N or self.N < 0:
            raise ValueError(f"N must be a non-negative integer, got {self.N!r}")
        if len(c.times) < 2 or not c.is_uniform():
            raise ValueError("backward problems need at least two uniformly spaced times")
        if abs(c.times[-1]) > 1e-9 * max(1.0, abs(c.times[0])):
            object.__setattr__(self, "coeffs", c.reindexed())
        grid = c.grid
        v = np.zeros(grid.shape, complex) if self.v_plus is None else np.asarray(self.v_plus, complex)
        grid.check_shape(v, "v_plus")
        if np.any(v[~grid.low_mask(self.N)] != 0):
            raise ValueError(f"v_plus must vanish outside the modes with lambda <= N={self.N}")
        h = np.zeros((len(c.times),) + grid.shape, complex) if self.h is None else np.asarray(self.h, complex)
        if h.shape != (len(c.times),) + grid.shape:
            raise ValueError(f"forcing has shape {h.shape}, expected {(len(c.times),) + grid.shape}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "v_plus", v)
        object.__setattr__(self, "h", np.where(grid.retained_mask, h, 0.0))

    @property
    def grid(self) -> GridSpec:
        return self.coeffs.grid

    @property
    def theta(self) -> float:
        return self.N + 0.5

    @property
    def times(self) -> np.ndarray:
        return self.coeffs.times

    @property
    def dt(self) -> float:
        return self.coeffs.dt

    @property
    def window(self) -> float:
        return float(-self.times[0])

    def data_norm(self) -> float:
        return series_norm(self.h, self.dt) + l2_norm(self.v_plus)

    def later(self, fraction: float) -> "BackwardProblem":
        """The same problem restricted to the last ``fraction`` of the window."""
        keep = self.times >= -fraction * self.window - 1e-9 * self.dt
        return BackwardProblem(self.coeffs.select(keep), self.N, self.omega, self.v_plus, self.h[keep])

    def gauged(self):
        """Zero-mean form; returns (problem, gauge) so solutions map back with gauge.restore."""
        g = gauge_zero_mean(self.coeffs, self.h)
        return BackwardProblem(g.coeffs, self.N, self.omega, self.v_plus, g.series), g


# ═══════════════════════════════════════════════════════════════════════════
#  LINEAR SOLVE OPERATORS
# ═══════════════════════════════════════════════════════════════════════════

def _reflect(arr: np.ndarray) -> np.ndarray:
    """arr(-k) over the last three (FFT-ordered) axes."""
    axes = (-3, -2, -1)
    return np.roll(np.flip(arr, axis=axes), 1, axis=axes)


def _matrix_phi(Z: np.ndarray):
    """(e^Z, phi1(Z), phi2(Z)) for stacked square matrices via one augmented expm."""
    n = Z.shape[-1]
    eye = np.eye(n)
    B = np.zeros(Z.shape[:-2] + (3 * n, 3 * n), complex)
    B[..., :n, :n] = Z
    B[..., :n, n:2 * n] = eye
    B[..., n:2 * n, 2 * n:] = eye
    X = sla.expm(B)
    return X[..., :n, :n], X[..., :n, n:2 * n], X[..., :n, 2 * n:]


def _apply(mats: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("mab,mb->ma", mats, x)


class _Dichotomy:
    """Solves w' + mu w + [mean coupling] = g mode by mode; couplings are re-inserted as forcing.

    ``diagonal`` leaves all of a and b in the coupling. ``averaged`` moves the
    spatial means <a>, <b> into 2x2 blocks over the pairs (w_k, conj w_-k) and
    leaves only the zero-mean remainders in the coupling.
    """

    def __init__(self, problem: BackwardProblem, splitting: str = "diagonal"):
        if splitting not in SPLITTINGS:
            raise ValueError(f"unknown splitting {splitting!r}; expected one of {SPLITTINGS}")
        self.problem = problem
        self.splitting = splitting
        grid, coeffs = problem.grid, problem.coeffs
        self.grid = grid
        self.dt = problem.dt
        self.nt = len(problem.times)
        self.ret = grid.retained_mask
        self.low = grid.low_mask(problem.N)
        self.high = self.ret & ~self.low
        lam = grid.eigenvalues.astype(float)
        self.mu = lam - problem.theta + 1j * problem.omega * lam

        if splitting == "diagonal":
            self.a, self.b = coeffs.a, coeffs.b
        else:
            self.a = coeffs.a - coeffs.mean_a[:, None, None, None]
            self.b = coeffs.b - coeffs.mean_b[:, None, None, None]
            self._build_pairs(lam, coeffs)
        self.kappa = float(np.abs(self.a).max() + np.abs(self.b).max())

    def _build_pairs(self, lam: np.ndarray, coeffs: VariationalCoefficients) -> None:
        p = self.problem
        vals, inv = np.unique(lam[self.ret], return_inverse=True)
        am = 0.5 * (coeffs.mean_a[:-1] + coeffs.mean_a[1:])
        bm = 0.5 * (coeffs.mean_b[:-1] + coeffs.mean_b[1:])
        mu = (vals - p.theta + 1j * p.omega * vals)[:, None] + am[None, :]
        A = np.empty(mu.shape + (2, 2), complex)
        A[..., 0, 0] = mu
        A[..., 0, 1] = bm[None, :]
        A[..., 1, 0] = np.conj(bm)[None, :]
        A[..., 1, 1] = np.conj(mu)
        sign = np.where(vals <= p.N, 1.0, -1.0)[:, None, None, None]
        self._pair_E, self._pair_p1, self._pair_p2 = _matrix_phi(sign * A * self.dt)
        self._cls = inv
        self._cls_low = vals[inv] <= p.N

    # ------------------------------------------------------------------ #

    def solve(self, g: np.ndarray, v_plus: np.ndarray | None) -> np.ndarray:
        """D^-1(g, v_plus) on the retained modes; v_plus=None means zero terminal data."""
        if self.splitting == "averaged":
            return self._solve_pairs(g, v_plus)
        out = np.zeros(g.shape, complex)
        v = np.zeros(int(self.low.sum()), complex) if v_plus is None else v_plus[self.low]
        out[:, self.low] = _backward_sweep(self.mu[self.low], g[:, self.low], v, self.dt)
        out[:, self.high] = _forward_sweep(self.mu[self.high], g[:, self.high], self.dt)
        return out

    def _solve_pairs(self, g: np.ndarray, v_plus: np.ndarray | None) -> np.ndarray:
        dt, nt = self.dt, self.nt
        gg = np.stack([g[:, self.ret], np.conj(_reflect(g))[:, self.ret]], axis=-1)
        x = np.zeros(gg.shape, complex)
        E, P1, P2 = self._pair_E, self._pair_p1, self._pair_p2
        cls, lo = self._cls, self._cls_low
        hi = ~lo
        if v_plus is not None:
            x[-1, :, 0] = v_plus[self.ret]
            x[-1, :, 1] = np.conj(_reflect(v_plus))[self.ret]
        x[-1, hi] = 0.0
        cl, ch = cls[lo], cls[hi]
        for j in range(nt - 2, -1, -1):
            Ej, p1, p2 = E[cl, j], P1[cl, j], P2[cl, j]
            x[j, lo] = (_apply(Ej, x[j + 1, lo]) - dt * _apply(p2, gg[j, lo])
                        - dt * _apply(p1 - p2, gg[j + 1, lo]))
        for j in range(nt - 1):
            Ej, p1, p2 = E[ch, j], P1[ch, j], P2[ch, j]
            x[j + 1, hi] = (_apply(Ej, x[j, hi]) + dt * _apply(p1 - p2, gg[j, hi])
                            + dt * _apply(p2, gg[j + 1, hi]))
        out = np.zeros(g.shape, complex)
        out[:, self.ret] = x[..., 0]
        return out

    def coupling(self, w: np.ndarray) -> np.ndarray:
        """a w + b conj(w), formed on the sample grid and truncated to the retained modes."""
        phys = self.grid.to_physical(w)
        return self.grid.to_spectral(self.a * phys + self.b * np.conj(phys)) * self.ret

    def fixed_point_map(self, w: np.ndarray) -> np.ndarray:
        p = self.problem
        return self.solve(p.h - self.coupling(w), p.v_plus)


# ═══════════════════════════════════════════════════════════════════════════
#  SOLVERS
# ═══════════════════════════════════════════════════════════════════════════

def backward_bvp_solve(problem: BackwardProblem, band: ModeBand | None = None, *,
                       splitting: str = "diagonal", tol: float = 1e-10, max_iter: int = 50,
                       gauge: bool = False) -> tuple[FieldSeries, EstimateReport]:
    """Fixed-point iteration w <- D^-1(h - (a w + b conj w), v_plus).

    Non-convergence within ``max_iter`` is reported (``passed`` False,
    ``details["converged"]`` False), not raised.
    """
    if band is not None and band.N != problem.N:
        raise ValueError(f"band N={band.N} does not match problem N={problem.N}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    gauge_map = None
    if gauge:
        problem, gauge_map = problem.gauged()

    op = _Dichotomy(problem, splitting)
    dt = problem.dt
    w = op.solve(problem.h, problem.v_plus)
    first = series_norm(w, dt)
    history: list[float] = []
    converged = False
    prev = None
    iterations = 0
    for it in tqdm(range(1, max_iter + 1), desc="backward BVP", leave=False,
                   disable=not progress_enabled()):
        w_new = op.fixed_point_map(w)
        diff = series_norm(w_new - w, dt)
        size = series_norm(w_new, dt)
        iterations = it
        if prev is not None and prev > 0:
            history.append(diff / prev)
        prev = diff
        w = w_new
        logger.debug("BVP iteration %d: |dw|=%.3e |w|=%.3e", it, diff, size)
        if not np.isfinite(diff) or diff > 1e12 * max(first, 1e-300):
            logger.warning("backward iteration diverged at step %d (|dw|=%.3e)", it, diff)
            break
        if diff <= tol * max(size, 1e-300):
            converged = True
            break

    size = series_norm(w, dt)
    residual = series_norm(op.fixed_point_map(w) - w, dt) / size if size > 0 else 0.0
    if not converged:
        logger.warning("backward BVP not converged after %d iterations (residual %.3e)", iterations, residual)

    data = problem.data_norm()
    C = size / data if data > 0 else 0.0
    bound_C = 2.0 / (1.0 - 2.0 * op.kappa) if 2.0 * op.kappa < 1.0 else math.inf
    factor = max(history) if history else 0.0
    passed = converged and (splitting == "averaged" or C <= bound_C * (1.0 + tol))

    if gauge_map is not None:
        w = gauge_map.restore(w)
    K = problem.coeffs.K
    details = {
        "splitting": splitting,
        "gauge": bool(gauge),
        "converged": converged,
        "iterations": iterations,
        "residual": residual,
        "contraction_history": history,
        "kappa": op.kappa,
        "K": K,
        "predicted_scale": K / band.L if band is not None else None,
        "N": problem.N,
        "theta": problem.theta,
        "window": problem.window,
        "dt": dt,
        "w_norm": size,
        "data_norm": data,
    }
    report = EstimateReport(C, problem.theta, bound_C, problem.theta, factor, passed, details)
    return FieldSeries(problem.grid, problem.times, w), report


def dense_space_time_solve(problem: BackwardProblem, splitting: str = "diagonal",
                           max_unknowns: int = 20000) -> FieldSeries:
    """Assemble the real-linear map w -> w + D0^-1(a w + b conj w) and solve it directly.

    Unknowns are the real and imaginary parts of every retained mode at every
    time, so this is meant for tiny grids (4^3) as a check on the iteration.
    """
    op = _Dichotomy(problem, splitting)
    ret = problem.grid.retained_mask
    nt = len(problem.times)
    n = nt * int(ret.sum())
    if 2 * n > max_unknowns:
        raise ValueError(f"dense solve would need {2 * n} real unknowns (limit {max_unknowns})")

    def unpack(x: np.ndarray) -> np.ndarray:
        w = np.zeros((nt,) + problem.grid.shape, complex)
        w[:, ret] = x.reshape(nt, -1)
        return w

    def apply(x: np.ndarray) -> np.ndarray:
        w = unpack(x)
        return (w + op.solve(op.coupling(w), None))[:, ret].reshape(-1)

    A = np.empty((2 * n, 2 * n))
    for r in range(n):
        for shift, unit in ((0, 1.0), (n, 1j)):
            e = np.zeros(n, complex)
            e[r] = unit
            col = apply(e)
            A[:n, r + shift] = col.real
            A[n:, r + shift] = col.imag
    rhs = op.solve(problem.h, problem.v_plus)[:, ret].reshape(-1)
    sol = sla.solve(A, np.concatenate([rhs.real, rhs.imag]))
    return FieldSeries(problem.grid, problem.times, unpack(sol[:n] + 1j * sol[n:]))


def t_doubling_sensitivity(problem: BackwardProblem, band: ModeBand | None = None, *,
                           probe: float = 0.25, **solve_kwargs) -> dict:
    """Relative change near t = 0 between the solve on (-T, 0] and on (-T/2, 0].

    Compared over t in [-probe T, 0] as max_t ||w_T - w_{T/2}|| / max_t ||w_T||.
    """
    if not 0 < probe <= 0.5:
        raise ValueError(f"probe must lie in (0, 0.5], got {probe}")
    full, rep_full = backward_bvp_solve(problem, band, **solve_kwargs)
    half, rep_half = backward_bvp_solve(problem.later(0.5), band, **solve_kwargs)
    n = int(np.sum(half.times >= -probe * problem.window - 1e-9 * problem.dt))
    a, b = full.coeffs[-n:], half.coeffs[-n:]
    scale = float(np.max(l2_norm(a))) if n else 0.0
    change = float(np.max(l2_norm(a - b))) if n else 0.0
    return {
        "window": problem.window,
        "half_window": float(-half.times[0]),
        "probe_points": n,
        "sensitivity": change / scale if scale > 0 else 0.0,
        "converged": bool(rep_full.details["converged"] and rep_half.details["converged"]),
    }
