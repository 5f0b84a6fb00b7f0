# -*- coding: utf-8 -*-
"""Measured backward-Lipschitz constants from pairs of nearby trajectories.

For v = Psi1 - Psi2 on a window re-indexed to end at t = 0 the target is

    ||v(t)|| <= C_N e^{-theta_N t} ||P_N v(0)||,   t <= 0,  theta_N = N + 1/2.
"""

from __future__ import annotations

import logging
import math
from typing import Iterable

import numpy as np

from cglhub.dynamics.attractor import AttractorSample
from cglhub.dynamics.integrator import Trajectory
from cglhub.spectral.grid import l2_norm, sobolev_weights
from .dichotomy import EstimateReport

logger = logging.getLogger(__name__)


def _common_window(a: Trajectory, b: Trajectory, window: float | None):
    pa, pb = a.params, b.params
    if pa.grid != pb.grid or pa.omega != pb.omega or pa.dt != pb.dt:
        raise ValueError("trajectories must share grid, omega and dt")
    ka, kb = np.round(a.times, 9), np.round(b.times, 9)
    common, ia, ib = np.intersect1d(ka, kb, return_indices=True)
    if len(common) < 2:
        raise ValueError("trajectories do not overlap on at least two common times")
    t = common - common[-1]
    keep = slice(None) if window is None else t >= -window - 1e-9
    return t[keep], (a.states[ia] - b.states[ib])[keep]


def _fit_rate(t: np.ndarray, norms: np.ndarray) -> float:
    """-slope of log ||v|| over the half window nearest t = 0."""
    sel = (t >= 0.5 * t[0]) & (norms > 0)
    if sel.sum() < 2:
        sel = norms > 0
    if sel.sum() < 2:
        return math.nan
    slope = np.polyfit(t[sel], np.log(norms[sel]), 1)[0]
    return float(-slope)


def measure_backward_lipschitz(pair: tuple[Trajectory, Trajectory], N: int, *,
                               window: float | None = None, tol: float = 1e-12,
                               bound_C: float = math.inf, theta_tol: float = 0.05) -> EstimateReport:
    """Measure C and the backward growth rate of a trajectory difference.

    A vanishing low-mode projection at t = 0 (relative to ``tol``) is returned
    as an injectivity failure with ``passed`` False.

    Raises:
        ValueError: identical trajectories or no common window.
    """
    a, b = pair
    t, v = _common_window(a, b, window)
    if not np.any(v):
        raise ValueError("trajectories are identical on the common window")
    grid = a.params.grid
    low = grid.low_mask(N)
    theta = N + 0.5

    norms = np.atleast_1d(l2_norm(v))
    pn0 = l2_norm(v[-1] * low)
    details = {
        "N": int(N), "window": float(-t[0]), "snapshots": int(len(t)),
        "v0_norm": float(norms[-1]), "pn_v0_norm": float(pn0),
        "injectivity_failure": False,
    }
    if pn0 <= tol * max(norms[-1], np.max(norms)):
        details["injectivity_failure"] = True
        logger.info("pair with P_N v(0) ~ 0 at N=%d: injectivity failure datum", N)
        return EstimateReport(math.inf, math.nan, bound_C, theta, math.nan, False, details)

    weight = np.exp(theta * t)
    C = float(np.max(norms * weight) / pn0)
    rate = _fit_rate(t, norms)

    w2 = sobolev_weights(grid, 2.0)
    h2 = np.atleast_1d(l2_norm(v * w2))
    pn0_h2 = l2_norm(v[-1] * w2 * low)
    details["C_measured_h2"] = float(np.max(h2 * weight) / pn0_h2)
    details["theta_measured_h2"] = _fit_rate(t, h2)

    passed = bool(math.isfinite(C) and C <= bound_C
                  and (math.isnan(rate) or rate <= theta + theta_tol))
    return EstimateReport(C, rate, bound_C, theta, math.nan, passed, details)


def measure_pairs(pairs: AttractorSample | Iterable[tuple[Trajectory, Trajectory]], N: int,
                  **kwargs) -> tuple[list[EstimateReport], dict]:
    """Run measure_backward_lipschitz over every pair and summarise the constants."""
    if isinstance(pairs, AttractorSample):
        pairs = pairs.pair_trajectories
    reports = []
    for pair in pairs:
        try:
            reports.append(measure_backward_lipschitz(pair, N, **kwargs))
        except ValueError as exc:
            logger.warning("skipping pair: %s", exc)
    Cs = np.array([r.C_measured for r in reports if math.isfinite(r.C_measured)])
    rates = np.array([r.theta_measured for r in reports if math.isfinite(r.theta_measured)])
    summary = {
        "N": int(N),
        "count": len(reports),
        "pass_count": sum(r.passed for r in reports),
        "injectivity_failures": sum(bool(r.details.get("injectivity_failure")) for r in reports),
        "C_median": float(np.median(Cs)) if Cs.size else math.nan,
        "C_min": float(Cs.min()) if Cs.size else math.nan,
        "C_max": float(Cs.max()) if Cs.size else math.nan,
        "C_spread": float((Cs.max() - Cs.min()) / np.median(Cs)) if Cs.size and np.median(Cs) > 0 else math.nan,
        "theta_median": float(np.median(rates)) if rates.size else math.nan,
    }
    return reports, summary
