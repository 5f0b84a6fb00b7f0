# -*- coding: utf-8 -*-
"""Equation of variations along a trajectory.

For d/dt Psi = (1 + i omega) Laplacian Psi + f, differences of nearby
solutions obey d/dt v - (1 + i omega) Laplacian v + a v + b conj(v) = 0 with
a = -df/dPsi and b = -df/dconj(Psi) evaluated on the trajectory.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_trapezoid

from cglhub.core.base import BaseNonlinearity
from cglhub.dynamics.integrator import Trajectory
from cglhub.lattice.certificate import schur_bound
from cglhub.spectral.grid import GridSpec, SpectralField, l2_norm

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FieldSeries:
    """Coefficient arrays (nt, M, M, M) on a uniform time grid."""

    grid: GridSpec
    times: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, float).reshape(-1)
        coeffs = np.asarray(self.coeffs, complex)
        if coeffs.shape != (len(times),) + self.grid.shape:
            raise ValueError(f"series shape {coeffs.shape} does not match {len(times)} times on M={self.grid.M}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "coeffs", coeffs)

    def __len__(self) -> int:
        return len(self.times)

    def at(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.coeffs[i])

    def norms(self) -> np.ndarray:
        return np.atleast_1d(l2_norm(self.coeffs))


def time_norm(values: np.ndarray, dt: float) -> float:
    """Trapezoidal L2-in-time norm of a scalar or per-time norm sequence."""
    v = np.abs(np.asarray(values)) ** 2
    if len(v) < 2:
        return float(np.sqrt(v.sum() * dt)) if len(v) else 0.0
    return float(np.sqrt(np.trapz(v, dx=dt)))


def series_norm(coeffs: np.ndarray, dt: float) -> float:
    """L2((-T, 0); H) norm of a coefficient series."""
    return time_norm(np.atleast_1d(l2_norm(coeffs)), dt)


@dataclass(frozen=True, eq=False)
class VariationalCoefficients:
    """Physical samples of a(t, x), b(t, x) on the trajectory time grid."""

    grid: GridSpec
    times: np.ndarray
    a: np.ndarray
    b: np.ndarray
    bounds: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.asarray(self.times, float).reshape(-1)
        for name in ("a", "b"):
            arr = np.asarray(getattr(self, name), complex)
            if arr.shape != (len(times),) + self.grid.shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {(len(times),) + self.grid.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "times", times)
        if not self.bounds:
            object.__setattr__(self, "bounds", _c1_bounds(self.grid, times, self.a, self.b))

    @property
    def K(self) -> float:
        """Discrete C1 bound: sup |a| + sup |b| plus the largest t and x slopes."""
        return self.bounds["K"]

    @property
    def sup_norm(self) -> float:
        """sup |a| + sup |b| (pointwise multiplier bound)."""
        return self.bounds["sup_a"] + self.bounds["sup_b"]

    @cached_property
    def a_hat(self) -> np.ndarray:
        return self.grid.to_spectral(self.a)

    @cached_property
    def b_hat(self) -> np.ndarray:
        return self.grid.to_spectral(self.b)

    @property
    def mean_a(self) -> np.ndarray:
        return np.asarray(self.a.mean(axis=(1, 2, 3)))

    @property
    def mean_b(self) -> np.ndarray:
        return np.asarray(self.b.mean(axis=(1, 2, 3)))

    @property
    def dt(self) -> float:
        if len(self.times) < 2:
            return 0.0
        return float(self.times[1] - self.times[0])

    def is_uniform(self, rtol: float = 1e-9) -> bool:
        if len(self.times) < 3:
            return True
        d = np.diff(self.times)
        return bool(np.all(np.abs(d - d[0]) <= rtol * abs(d[0])))

    def a_field(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.a_hat[i])

    def b_field(self, i: int) -> SpectralField:
        return SpectralField(self.grid, self.b_hat[i])

    def select(self, mask) -> "VariationalCoefficients":
        return VariationalCoefficients(self.grid, self.times[mask], self.a[mask], self.b[mask])

    def reindexed(self) -> "VariationalCoefficients":
        return VariationalCoefficients(self.grid, self.times - self.times[-1], self.a, self.b, dict(self.bounds))

    @classmethod
    def constant(cls, grid: GridSpec, times, a: complex = 0.0, b: complex = 0.0) -> "VariationalCoefficients":
        times = np.asarray(times, float)
        shape = (len(times),) + grid.shape
        return cls(grid, times, np.full(shape, complex(a)), np.full(shape, complex(b)))


def _c1_bounds(grid: GridSpec, times: np.ndarray, a: np.ndarray, b: np.ndarray) -> dict:
    h = 2.0 * np.pi / grid.M
    out = {"sup_a": float(np.abs(a).max()) if a.size else 0.0,
           "sup_b": float(np.abs(b).max()) if b.size else 0.0}
    slope_t = 0.0
    if len(times) > 1:
        dt = np.diff(times)[:, None, None, None]
        slope_t = float(max(np.abs(np.diff(a, axis=0) / dt).max(), np.abs(np.diff(b, axis=0) / dt).max()))
    slope_x = 0.0
    for axis in (1, 2, 3):
        for arr in (a, b):
            slope_x = max(slope_x, float(np.abs(np.roll(arr, -1, axis=axis) - arr).max()) / h)
    out["slope_t"] = slope_t
    out["slope_x"] = slope_x
    out["K"] = out["sup_a"] + out["sup_b"] + slope_t + slope_x
    return out


def linearize_coefficients(traj: Trajectory, f_spec: BaseNonlinearity | None = None) -> VariationalCoefficients:
    """a = -df/dPsi, b = -df/dconj(Psi) sampled along ``traj``."""
    f = f_spec if f_spec is not None else traj.params.f_spec
    if not np.all(np.isfinite(traj.states)):
        raise ValueError("trajectory contains non-finite states")
    phys = traj.params.grid.to_physical(traj.states)
    a = -np.asarray(f.d_psi(phys), complex) * np.ones(phys.shape)
    b = -np.asarray(f.d_psibar(phys), complex) * np.ones(phys.shape)
    coeffs = VariationalCoefficients(traj.params.grid, traj.times, a, b)
    logger.debug("linearized %d snapshots: K=%.4g (sup %.4g)", len(traj), coeffs.K, coeffs.sup_norm)
    return coeffs


# ═══════════════════════════════════════════════════════════════════════════
#  GAUGE
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class GaugedProblem:
    """Zero-mean coefficients with the weight w = weight * v."""

    coeffs: VariationalCoefficients
    weight: np.ndarray
    series: np.ndarray | None = None

    def apply(self, series: np.ndarray) -> np.ndarray:
        return self.weight.reshape((-1,) + (1,) * (np.ndim(series) - 1)) * series

    def restore(self, series: np.ndarray) -> np.ndarray:
        return series / self.weight.reshape((-1,) + (1,) * (np.ndim(series) - 1))


def gauge_zero_mean(coeffs: VariationalCoefficients, v_or_h: np.ndarray | None = None) -> GaugedProblem:
    """Remove the spatial mean of a by w(t) = exp(int_0^t <a>) v(t).

    The new b picks up the phase exp(2i int_0^t Im<a>). The integral is
    referenced to t = 0, or to the closest window end when 0 lies outside.
    """
    mean_a = coeffs.mean_a
    times = coeffs.times
    if len(times) > 1:
        cum = cumulative_trapezoid(mean_a, times, initial=0.0)
        ref = np.interp(0.0, times, cum.real) + 1j * np.interp(0.0, times, cum.imag)
        G = cum - ref
    else:
        G = np.zeros(len(times), complex)
    weight = np.exp(G)
    a_new = coeffs.a - mean_a[:, None, None, None]
    b_new = coeffs.b * np.exp(2j * G.imag)[:, None, None, None]
    new = VariationalCoefficients(coeffs.grid, times, a_new, b_new)
    problem = GaugedProblem(new, weight)
    if v_or_h is not None:
        problem = GaugedProblem(new, weight, problem.apply(np.asarray(v_or_h)))
    return problem


# ═══════════════════════════════════════════════════════════════════════════
#  SHELL CERTIFICATES FOR SAMPLED COEFFICIENTS
# ═══════════════════════════════════════════════════════════════════════════

def _phi_hat_dict(grid: GridSpec, coeffs: np.ndarray, support: int, floor: float) -> dict:
    k = grid.wavenumbers
    idx = np.argwhere(np.abs(coeffs) > floor)
    out = {}
    for i, j, l in idx:
        key = (int(k[i]), int(k[j]), int(k[l]))
        if max(abs(c) for c in key) <= support:
            out[key] = complex(coeffs[i, j, l])
    return out


def certify_coefficients(coeffs: VariationalCoefficients, N: int, L: int,
                         support: int | None = None, samples: int = 8,
                         floor: float = 1e-14) -> dict:
    """Schur bounds of a(t) and b(t) on the shell (N, L), maximized over sampled times."""
    support = coeffs.grid.cutoff if support is None else support
    picks = np.unique(np.linspace(0, len(coeffs.times) - 1, min(samples, len(coeffs.times))).astype(int))
    eps_a = eps_b = 0.0
    cert = None
    for i in picks:
        ca = schur_bound(_phi_hat_dict(coeffs.grid, coeffs.a_hat[i], support, floor), N, L, truncation=support)
        cb = schur_bound(_phi_hat_dict(coeffs.grid, coeffs.b_hat[i], support, floor), N, L, truncation=support)
        eps_a, eps_b, cert = max(eps_a, ca.eps_bound), max(eps_b, cb.eps_bound), ca
    return {
        "N": int(N), "L": int(L),
        "population": cert.population if cert else 0,
        "min_separation": cert.min_separation if cert else float("inf"),
        "eps_a": eps_a, "eps_b": eps_b,
        "times_checked": int(len(picks)),
        "K": coeffs.K,
        "K_times_eps": coeffs.K * max(eps_a, eps_b),
    }
