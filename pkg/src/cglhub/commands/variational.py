# -*- coding: utf-8 -*-
import math

import numpy as np

from cglhub.dynamics import AttractorSample, Trajectory
from cglhub.lattice import mode_band
from cglhub.spectral.grid import l2_norm, random_field
from cglhub.utils import REPORT_FILES, write_json
from cglhub.variational import (BackwardProblem, averaged_mode_band_report, backward_bvp_solve,
                                certify_coefficients, linearize_coefficients, measure_pairs,
                                smallness_report, t_doubling_sensitivity)
from .base import BaseCommand, CommandResult

# terminal data draws from a stream disjoint from the simulation seeds
_TERMINAL_STREAM = 7


def _as_trajectory(obj) -> Trajectory:
    return obj if isinstance(obj, Trajectory) else Trajectory.load(obj)


def _as_sample(obj) -> AttractorSample:
    return obj if isinstance(obj, AttractorSample) else AttractorSample.load(obj)


def bvp_segment(traj: Trajectory, window: float) -> Trajectory:
    """Last ``window`` of ``traj`` on a uniform grid, shifted to end at t = 0.

    A shorter final interval (T not a multiple of the save cadence) is dropped.
    """
    seg = traj.last(window)
    d = np.diff(seg.times)
    if d.size > 1 and not np.isclose(d[-1], d[0], rtol=1e-6):
        seg = seg.select(slice(0, -1))
    return seg.reindexed()


def terminal_data(grid, N: int, seed: int) -> np.ndarray:
    """Unit-L2 smooth random v_plus supported on the modes with lambda <= N."""
    rng = np.random.default_rng([seed, _TERMINAL_STREAM])
    v = random_field(grid, rng, 1.0).coeffs * grid.low_mask(N)
    norm = l2_norm(v)
    return v / norm if norm > 0 else v


class VerifyEstimateCommand(BaseCommand):
    """
    Backward Lipschitz measurements over trajectory pairs plus, when a base
    trajectory is available, the weighted variational BVP, its T-doubling
    check and the smallness and averaging diagnostics. Writes estimate.json.

    Pairs come from ``pairs`` (trajectories or file paths) or from the pair
    segments of ``sample``. The BVP runs on ``trajectory`` or, failing that,
    on the first member of the first pair.
    """

    def __init__(self, config, out_dir=None, *, pairs=None, sample=None, trajectory=None,
                 N: int | None = None, L: int | None = None, window: float | None = None,
                 report_name: str | None = None, progress_callback=None):
        super().__init__(config, out_dir, progress_callback)
        self.pairs = pairs
        self.sample = sample
        self.trajectory = trajectory
        self.N = config.N if N is None else int(N)
        self.L = config.L if L is None else int(L)
        self.window = config.window if window is None else float(window)
        self.report_name = report_name or REPORT_FILES["estimate"]

    def _collect(self) -> tuple[list, Trajectory | None]:
        pairs = []
        if self.pairs is not None:
            pairs = [(_as_trajectory(a), _as_trajectory(b)) for a, b in self.pairs]
        elif self.sample is not None:
            pairs = list(_as_sample(self.sample).pair_trajectories)
        base = _as_trajectory(self.trajectory) if self.trajectory is not None else None
        if base is None and pairs:
            base = pairs[0][0]
        return pairs, base

    def _bvp(self, traj: Trajectory) -> dict:
        cfg, N, L = self.config, self.N, self.L
        omega = traj.params.omega
        coeffs = linearize_coefficients(bvp_segment(traj, self.window))
        problem = BackwardProblem(coeffs, N, omega, v_plus=terminal_data(coeffs.grid, N, cfg.seed))
        band = mode_band(N, L, coeffs.grid) if 0 < L < N else None
        solve = dict(splitting=cfg.splitting, tol=cfg.bvp_tol, max_iter=cfg.bvp_max_iter)

        self.progress(f"Solving the weighted BVP on a window of {problem.window:g} "
                      f"({cfg.splitting} splitting)...", 40)
        _, report = backward_bvp_solve(problem, band, **solve)
        self.progress("Checking sensitivity to the window length...", 60)
        doubling = t_doubling_sensitivity(problem, band, **solve)
        out = {
            "bvp": report,
            "t_doubling": doubling,
            "coefficients": certify_coefficients(coeffs, N, L) if 0 < L < N else None,
            "smallness": None,
            "averaging": None,
        }
        if omega != 0 and 0 < L < N:
            out["smallness"] = smallness_report(N, L, omega, coeffs.K, cfg.eps)
            out["averaging"] = averaged_mode_band_report(coeffs, N, L, omega, cfg.eps)
        return out

    def run(self) -> CommandResult:
        cfg = self.config
        try:
            out = self._prepare()
            pairs, base = self._collect()
            if not pairs and base is None:
                raise ValueError("verify-estimate needs trajectory pairs, a sample with pairs, or a trajectory")

            self.progress(f"Measuring {len(pairs)} pair(s) at N={self.N}...", 0)
            reports, summary = measure_pairs(pairs, self.N, window=self.window, theta_tol=cfg.theta_tol)
            payload = {"N": self.N, "L": self.L, "pairs": summary, "reports": reports, "bvp": None}
            if base is not None:
                payload.update(self._bvp(base))

            path = write_json(out / self.report_name, payload, kind="estimate")
            bvp = payload["bvp"]
            verdict = "n/a" if bvp is None else ("pass" if bvp.passed else "fail")
            C = summary["C_median"]
            self.progress("Estimate report written", 100)
            return CommandResult(
                success=True,
                message=(f"{summary['pass_count']}/{summary['count']} pair(s) pass, "
                         f"median C = {f'{C:.4g}' if math.isfinite(C) else 'n/a'}, BVP {verdict}"),
                data=payload,
                output_files=[path],
            )
        except Exception as e:
            return self._failure(e)

