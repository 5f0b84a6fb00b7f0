# -*- coding: utf-8 -*-
from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from tqdm import tqdm

from cglhub.core.logging import progress_enabled
from cglhub.spectral.grid import SpectralField, random_field
from cglhub.spectral.io import read_series, write_series
from .integrator import CGLParams, Trajectory, simulate

logger = logging.getLogger(__name__)

# pair perturbations draw from a stream disjoint from the initial conditions
_PAIR_STREAM = 1_000_003


@dataclass(frozen=True, eq=False)
class AttractorSample:
    """Post-transient snapshots plus nearby trajectory pairs under one CGLParams."""

    params: CGLParams
    points: np.ndarray
    times: np.ndarray
    point_seeds: np.ndarray
    burn_in: float
    spacing: float = 1.0
    pair_trajectories: tuple[tuple[Trajectory, Trajectory], ...] = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.complex128, copy=True)
        if pts.ndim != 4 or pts.shape[1:] != self.params.grid.shape:
            raise ValueError(f"points must have shape (n, M, M, M), got {pts.shape}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "times", np.asarray(self.times, float).reshape(-1))
        object.__setattr__(self, "point_seeds", np.asarray(self.point_seeds, int).reshape(-1))
        object.__setattr__(self, "pair_trajectories", tuple(self.pair_trajectories))

    def __len__(self) -> int:
        return len(self.points)

    def field(self, i: int) -> SpectralField:
        return SpectralField(self.params.grid, self.points[i])

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        write_series(path, self.params.grid, self.times, self.points)
        pair_files = []
        for j, (a, b) in enumerate(self.pair_trajectories):
            pa = a.save(path.with_name(f"{path.stem}_pair_{j:03d}_a.cglf"))
            pb = b.save(path.with_name(f"{path.stem}_pair_{j:03d}_b.cglf"))
            pair_files.append([pa.name, pb.name])
        sidecar = {
            "params": self.params.describe(),
            "burn_in": self.burn_in,
            "spacing": self.spacing,
            "point_seeds": self.point_seeds.tolist(),
            "pairs": pair_files,
            "meta": self.meta,
        }
        Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True, default=str))
        return path

    @classmethod
    def load(cls, path: str | Path, with_pairs: bool = True) -> "AttractorSample":
        path = Path(path)
        grid, times, points = read_series(path)
        meta = json.loads(Path(str(path) + ".json").read_text())
        params = CGLParams.from_description(meta["params"])
        pairs = []
        if with_pairs:
            for fa, fb in meta.get("pairs", []):
                pairs.append((Trajectory.load(path.with_name(fa)), Trajectory.load(path.with_name(fb))))
        return cls(params, points, times, meta.get("point_seeds", [0] * len(times)),
                   burn_in=meta["burn_in"], spacing=meta.get("spacing", 1.0),
                   pair_trajectories=tuple(pairs), meta=meta.get("meta", {}))


def _split_count(count: int, seeds: int) -> list[int]:
    return [count // seeds + (1 if i < count % seeds else 0) for i in range(seeds)]


def _run_seed(params: CGLParams, seed: int, index: int, n_points: int,
              burn_in: float, spacing: float, amplitude: float):
    rng = np.random.default_rng([seed, index])
    psi0 = random_field(params.grid, rng, amplitude)
    if burn_in > 0:
        warm = simulate(params.replace(save_every=burn_in), psi0, burn_in,
                        seed=seed, label=f"burn-in seed {index}")
        start = warm.final
    else:
        start = psi0
    if n_points == 1:
        return np.array([burn_in]), start.coeffs[None]
    step_spacing = max(1, int(round(spacing / params.dt))) * params.dt
    run = simulate(params.replace(save_every=step_spacing), start, step_spacing * (n_points - 1),
                   seed=seed, label=f"sample seed {index}")
    return burn_in + run.times[:n_points], run.states[:n_points]


def sample_attractor(
    params: CGLParams,
    burn_in: float = 50.0,
    count: int = 1,
    spacing: float = 1.0,
    seeds: int = 1,
    *,
    pair_count: int = 0,
    pair_window: float = 10.0,
    pair_eps: float = 1e-3,
    pair_save_every: float | None = None,
    amplitude: float = 1.0,
    seed: int = 0,
    workers: int = 1,
    for_mane: bool = False,
) -> AttractorSample:
    """Long-run snapshots from ``seeds`` independent random starts.

    ``count`` points are split as evenly as possible across the seeds; each
    seed contributes snapshots at burn_in, burn_in + spacing, ... Pair
    segments start from sample points and a copy perturbed by ``pair_eps``
    (relative) and run for ``pair_window``.
    """
    if for_mane:
        params.require_dispersion()
    if count < 1 or seeds < 1:
        raise ValueError(f"count and seeds must be positive, got count={count}, seeds={seeds}")
    if burn_in < 0 or spacing <= 0:
        raise ValueError(f"need burn_in >= 0 and spacing > 0, got {burn_in}, {spacing}")

    plan = [(i, n) for i, n in enumerate(_split_count(count, seeds)) if n > 0]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        futures = [pool.submit(_run_seed, params, seed, i, n, burn_in, spacing, amplitude)
                   for i, n in plan]
        results = [f.result() for f in tqdm(futures, desc="attractor seeds",
                                            disable=not progress_enabled())]

    times = np.concatenate([t for t, _ in results])
    points = np.concatenate([s for _, s in results])
    point_seeds = np.concatenate([[i] * n for i, n in plan])

    pairs = []
    if pair_count:
        seg_params = params.replace(save_every=pair_save_every or max(params.dt, pair_window / 100))

        def _pair(j: int):
            base = SpectralField(params.grid, points[j % len(points)])
            rng = np.random.default_rng([seed, _PAIR_STREAM + j])
            scale = float(np.sqrt(np.sum(np.abs(base.coeffs) ** 2))) or 1.0
            nudged = base + random_field(params.grid, rng, pair_eps * scale)
            a = simulate(seg_params, base, pair_window, seed=seed, label=f"pair {j} a")
            b = simulate(seg_params, nudged, pair_window, seed=seed, label=f"pair {j} b")
            return a, b

        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            pairs = list(pool.map(_pair, range(pair_count)))

    logger.info("sampled %d attractor points from %d seed(s), %d pair segment(s)",
                len(points), len(plan), len(pairs))
    return AttractorSample(params, points, times, point_seeds, burn_in=burn_in, spacing=spacing,
                           pair_trajectories=tuple(pairs),
                           meta={"seed": seed, "seeds": seeds, "amplitude": amplitude,
                                 "pair_window": pair_window, "pair_eps": pair_eps})
