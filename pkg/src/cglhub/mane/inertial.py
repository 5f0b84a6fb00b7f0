# -*- coding: utf-8 -*-
"""Inertial form d/dt c = A c + P_N f(lift(c)) on the low modes.

The inverse of P_N on the sampled attractor is realized by a k-nearest
neighbour search in projected coordinates followed by an inverse-distance
weighted linear fit of the high modes over the local principal directions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import cKDTree
from tqdm import tqdm

from cglhub.core.exceptions import InertialFormError
from cglhub.core.logging import progress_enabled
from cglhub.core.registry import Integrator
from cglhub.dynamics.attractor import AttractorSample
from cglhub.dynamics.integrator import CGLParams
from cglhub.spectral.grid import GridSpec, SpectralField, l2_norm
from cglhub.spectral.nonlinearity import nonlinear_term
from .distortion import DEFAULT_THRESHOLD, DistortionStats, distortion_stats

logger = logging.getLogger(__name__)

DEFAULT_NEIGHBORS = 8
EXTRAPOLATION_FACTOR = 3.0
_PCA_RTOL = 1e-8


def _embed(coords: np.ndarray) -> np.ndarray:
    return np.concatenate([coords.real, coords.imag], axis=-1)


@dataclass(frozen=True, eq=False)
class InertialForm:
    """Sampled inverse of P_N together with the data it was built from.

    ``coords`` hold the low-mode coefficients of each sample point in the
    lexicographic order of ``basis``; ``highs`` hold the remaining retained
    coefficients in the order of ``high_mask``.
    """

    N: int
    grid: GridSpec
    basis: tuple[tuple[int, int, int], ...]
    coords: np.ndarray
    highs: np.ndarray
    neighbors: int = DEFAULT_NEIGHBORS
    stats: DistortionStats | None = None
    extrapolation_factor: float = EXTRAPOLATION_FACTOR
    meta: dict = field(default_factory=dict)

    @property
    def injective(self) -> bool:
        return self.stats is None or self.stats.injective_flag

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @cached_property
    def low_index(self) -> tuple[np.ndarray, ...]:
        return tuple((np.array(self.basis, dtype=np.int64).reshape(-1, 3) % self.grid.M).T)

    @cached_property
    def high_mask(self) -> np.ndarray:
        return self.grid.retained_mask & ~self.grid.low_mask(self.N)

    @cached_property
    def tree(self) -> cKDTree:
        return cKDTree(_embed(self.coords))

    @cached_property
    def nn_scale(self) -> float:
        """Median distance from a sample point to its nearest other sample point."""
        if len(self.coords) < 2:
            return math.inf
        d, _ = self.tree.query(_embed(self.coords), k=2)
        return float(np.median(d[:, 1]))

    def project(self, coeffs: np.ndarray) -> np.ndarray:
        """P_N coordinates (lexicographic low modes) of one or more coefficient arrays."""
        i, j, k = self.low_index
        return np.asarray(coeffs)[..., i, j, k]

    def compose(self, coords: np.ndarray, high: np.ndarray) -> np.ndarray:
        out = np.zeros(self.grid.shape, complex)
        out[self.high_mask] = high
        i, j, k = self.low_index
        out[i, j, k] = coords
        return out

    def point(self, index: int) -> SpectralField:
        return SpectralField(self.grid, self.compose(self.coords[index], self.highs[index]))


@dataclass(frozen=True, eq=False)
class LiftResult:
    field: SpectralField
    extrapolated: bool
    nn_distance: float


def build_inertial_form(sample: AttractorSample, N: int, *, neighbors: int = DEFAULT_NEIGHBORS,
                        stats: DistortionStats | None = None, threshold: float = DEFAULT_THRESHOLD,
                        max_pairs: int | None = None, seed: int = 0) -> InertialForm:
    """Index the sample by its P_N coordinates; distortion stats decide whether lifts are allowed."""
    if neighbors < 1:
        raise ValueError(f"neighbors must be >= 1, got {neighbors}")
    grid = sample.params.grid
    if stats is None:
        stats = distortion_stats(sample, N, threshold=threshold, max_pairs=max_pairs, seed=seed)
    vectors = np.argwhere(grid.lexicographic(grid.low_mask(N))) - grid.M // 2
    i, j, k = (vectors % grid.M).T
    high = grid.retained_mask & ~grid.low_mask(N)
    form = InertialForm(N=int(N), grid=grid, basis=tuple(tuple(int(c) for c in row) for row in vectors),
                        coords=sample.points[:, i, j, k], highs=sample.points[:, high],
                        neighbors=neighbors, stats=stats,
                        meta={"sample_size": len(sample), "omega": sample.params.omega})
    if not form.injective:
        logger.warning("N=%d: sampled projector not injective (min ratio %.3e); lifts will be refused",
                       N, stats.min_ratio)
    return form


def lift(coords, form: InertialForm, *, allow_non_injective: bool = False) -> LiftResult:
    """Full field whose P_N part is ``coords`` and whose high part is reconstructed locally.

    Raises:
        InertialFormError: the form was built from a non-injective sample.
    """
    if not (form.injective or allow_non_injective):
        raise InertialFormError(f"inertial form at N={form.N} was built from a non-injective sample")
    c = np.asarray(coords, complex).reshape(-1)
    if c.shape != (form.dimension,):
        raise ValueError(f"expected {form.dimension} low-mode coordinates, got {c.shape}")
    x = _embed(c)
    k = min(form.neighbors, len(form.coords))
    dist, idx = form.tree.query(x, k=k)
    dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)

    if dist[0] <= 1e-12 * (1.0 + np.linalg.norm(x)) or k == 1:
        high = form.highs[idx[0]]
    else:
        X = _embed(form.coords[idx])
        Y = form.highs[idx]
        wts = 1.0 / np.maximum(dist, 1e-300)
        center = wts @ X / wts.sum()
        sw = np.sqrt(wts)[:, None]
        _, s, vt = np.linalg.svd(sw * (X - center), full_matrices=False)
        V = vt[s > _PCA_RTOL * s.max()].T if s.size and s.max() > 0 else np.zeros((X.shape[1], 0))
        design = np.hstack([np.ones((k, 1)), (X - center) @ V])
        coef, *_ = np.linalg.lstsq(sw * design, sw * Y, rcond=None)
        query = np.concatenate([[1.0], (x - center) @ V])
        high = query @ coef

    nn = float(dist[0])
    extrapolated = bool(nn > form.extrapolation_factor * form.nn_scale)
    return LiftResult(SpectralField(form.grid, form.compose(c, high)), extrapolated, nn)


def inertial_form_rhs(coords, form: InertialForm, params: CGLParams) -> tuple[np.ndarray, bool]:
    """-(1 + i omega) lambda c + P_N f(lift(c)); returns (rhs, extrapolated)."""
    c = np.asarray(coords, complex).reshape(-1)
    lifted = lift(c, form)
    nl = form.project(nonlinear_term(form.grid, params.f_spec, lifted.field.coeffs))
    return form.project(params.linear_operator) * c + nl, lifted.extrapolated


@dataclass(frozen=True)
class TrackReport:
    N: int
    T: float
    start_index: int
    times: np.ndarray
    errors: np.ndarray
    max_error: float
    final_error: float
    extrapolated_evals: int

    def to_dict(self) -> dict:
        return {
            "N": self.N, "T": self.T, "start_index": self.start_index,
            "max_error": self.max_error, "final_error": self.final_error,
            "extrapolated_evals": self.extrapolated_evals, "steps": int(len(self.times) - 1),
        }


def track_error(form: InertialForm, params: CGLParams, T: float, start: int = 0) -> TrackReport:
    """Run the full equation and the inertial form side by side from sample point ``start``.

    Both use the integrator of ``params`` with the same step, ending with a
    partial step when T is not a multiple of dt; the error is the physical L2
    norm of P_N Psi_full(t) - c(t).
    """
    if T < 0:
        raise ValueError(f"T must be non-negative, got {T}")
    if not 0 <= start < len(form.coords):
        raise ValueError(f"start index {start} outside the sample (size {len(form.coords)})")
    u = form.point(start).coeffs
    c = form.coords[start].copy()
    n_full = int(math.floor(T / params.dt + 1e-9))
    remainder = T - n_full * params.dt
    if remainder < 1e-9 * params.dt:
        remainder = 0.0
    steps = [params.dt] * n_full + ([remainder] if remainder else [])
    integrator = Integrator.create(params.integrator)
    low_linear = form.project(params.linear_operator)
    low_steppers = {dt: integrator.stepper(low_linear, dt) for dt in set(steps)}
    full_rhs = params.rhs()
    flags = 0

    def reduced_rhs(x):
        nonlocal flags
        lifted = lift(x, form)
        flags += lifted.extrapolated
        return form.project(nonlinear_term(form.grid, params.f_spec, lifted.field.coeffs))

    errors = [l2_norm(form.project(u) - c, axis=-1)]
    for dt in tqdm(steps, desc="inertial form", leave=False, disable=not progress_enabled()):
        u = params.stepper(dt)(u, full_rhs)
        c = low_steppers[dt](c, reduced_rhs)
        errors.append(l2_norm(form.project(u) - c, axis=-1))
    errors = np.asarray(errors, float)
    times = params.dt * np.arange(n_full + 1)
    if remainder:
        times = np.append(times, float(T))
    if flags:
        logger.warning("inertial form left the sampled region on %d right-hand-side evaluations", flags)
    return TrackReport(N=form.N, T=float(T), start_index=int(start), times=times,
                       errors=errors, max_error=float(errors.max()), final_error=float(errors[-1]),
                       extrapolated_evals=int(flags))
