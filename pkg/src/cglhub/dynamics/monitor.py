# -*- coding: utf-8 -*-
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from cglhub.spectral.grid import l2_norm, sobolev_weights
from cglhub.utils.tool import write_csv
from .integrator import Trajectory

logger = logging.getLogger(__name__)


@dataclass
class DissipativityReport:
    times: np.ndarray
    l2: np.ndarray
    h2: np.ndarray
    flags: list[float] = field(default_factory=list)
    envelope: dict | None = None
    settle_fraction: float = 0.5

    @property
    def violated(self) -> bool:
        return bool(self.flags)

    @property
    def empirical_q_star(self) -> float:
        """Largest H2 norm over the later part of the run."""
        if len(self.h2) == 0:
            return 0.0
        t0 = self.times[0] + self.settle_fraction * (self.times[-1] - self.times[0])
        return float(self.h2[self.times >= t0].max())

    def to_dict(self) -> dict:
        return {
            "snapshots": int(len(self.times)),
            "t_final": float(self.times[-1]) if len(self.times) else 0.0,
            "l2_max": float(self.l2.max()) if len(self.l2) else 0.0,
            "h2_max": float(self.h2.max()) if len(self.h2) else 0.0,
            "h2_final": float(self.h2[-1]) if len(self.h2) else 0.0,
            "empirical_q_star": self.empirical_q_star,
            "envelope": self.envelope,
            "violations": [float(t) for t in self.flags],
        }

    def write_csv(self, path: str | Path) -> Path:
        return write_csv(path, ["t", "l2", "h2"], zip(self.times, self.l2, self.h2))


def dissipativity_monitor(traj: Trajectory, rtol: float = 1e-9) -> DissipativityReport:
    """Per-snapshot L2 and H2 norms; flags snapshots above the params' envelope."""
    grid = traj.params.grid
    l2 = np.atleast_1d(l2_norm(traj.states))
    h2 = np.atleast_1d(l2_norm(traj.states * sobolev_weights(grid, 2.0)))
    flags: list[float] = []
    env = traj.params.dissip
    envelope = None
    if env is not None:
        t = traj.times - traj.times[0]
        bound = env.q_scale * h2[0] * np.exp(-env.alpha * t) + env.q_star
        bad = h2 > bound * (1 + rtol)
        flags = [float(x) for x in traj.times[bad]]
        envelope = {"alpha": env.alpha, "q_star": env.q_star, "q_scale": env.q_scale}
        if flags:
            logger.warning("dissipativity envelope exceeded at %d snapshot(s), first t=%g",
                           len(flags), flags[0])
    return DissipativityReport(traj.times.copy(), l2, h2, flags, envelope)
