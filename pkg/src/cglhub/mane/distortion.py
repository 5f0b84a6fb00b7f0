# -*- coding: utf-8 -*-
"""Pairwise distortion of the spectral projector P_N on an attractor sample."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from cglhub.dynamics.attractor import AttractorSample
from cglhub.spectral.grid import GridSpec, sobolev_weights

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 1e-3
_CHUNK = 2048


@dataclass(frozen=True)
class DistortionStats:
    """||P_N(u - v)||_H2 / ||u - v||_H2 over sampled pairs, plus the L2 analogue."""

    N: int
    pair_count: int
    min_ratio: float
    median_ratio: float
    max_ratio: float
    injective_flag: bool
    threshold: float = DEFAULT_THRESHOLD
    l2_min_ratio: float = math.nan
    l2_median_ratio: float = math.nan
    l2_max_ratio: float = math.nan
    degenerate_pairs: int = 0
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def _pairs(n: int, max_pairs: int | None, seed: int) -> tuple[np.ndarray, np.ndarray]:
    i, j = np.triu_indices(n, k=1)
    if max_pairs is not None and len(i) > max_pairs:
        pick = np.sort(np.random.default_rng(seed).choice(len(i), size=max_pairs, replace=False))
        i, j = i[pick], j[pick]
    return i, j


def _ratios(flat: np.ndarray, low: np.ndarray, i: np.ndarray, j: np.ndarray):
    d = flat[i] - flat[j]
    full = np.sqrt(np.sum(np.abs(d) ** 2, axis=1))
    part = np.sqrt(np.sum(np.abs(d * low) ** 2, axis=1))
    return part, full


def distortion_stats(sample: AttractorSample | np.ndarray, N: int, *, grid: GridSpec | None = None,
                     threshold: float = DEFAULT_THRESHOLD, max_pairs: int | None = None,
                     seed: int = 0, workers: int = 1) -> DistortionStats:
    """Distortion ratios over all pairs, or ``max_pairs`` of them drawn with ``seed``.

    ``sample`` is an AttractorSample or an array of coefficient arrays
    (n, M, M, M) together with ``grid``. Identical pairs are skipped and counted.
    """
    if isinstance(sample, AttractorSample):
        points, grid = sample.points, sample.params.grid
    else:
        if grid is None:
            raise ValueError("grid is required when passing raw coefficient arrays")
        points = np.asarray(sample, complex)
        grid.check_shape(points, "sample points")
    if len(points) < 2:
        raise ValueError(f"distortion statistics need at least 2 points, got {len(points)}")

    ret = grid.retained_mask
    w2 = sobolev_weights(grid, 2.0)[ret]
    low = grid.low_mask(N)[ret].astype(float)
    raw = points[:, ret]
    h2 = raw * w2

    i, j = _pairs(len(points), max_pairs, seed)
    chunks = [(i[s:s + _CHUNK], j[s:s + _CHUNK]) for s in range(0, len(i), _CHUNK)]

    def _work(chunk):
        ci, cj = chunk
        return _ratios(h2, low, ci, cj), _ratios(raw, low, ci, cj)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(_work, chunks))

    part = np.concatenate([r[0][0] for r in results])
    full = np.concatenate([r[0][1] for r in results])
    l2_part = np.concatenate([r[1][0] for r in results])
    l2_full = np.concatenate([r[1][1] for r in results])
    ok = full > 0
    degenerate = int((~ok).sum())
    if not ok.any():
        raise ValueError("every sampled pair is degenerate (identical points)")
    ratio = part[ok] / full[ok]
    l2_ratio = l2_part[ok] / l2_full[ok]

    stats = DistortionStats(
        N=int(N), pair_count=int(ok.sum()),
        min_ratio=float(ratio.min()), median_ratio=float(np.median(ratio)), max_ratio=float(ratio.max()),
        injective_flag=bool(ratio.min() > threshold), threshold=float(threshold),
        l2_min_ratio=float(l2_ratio.min()), l2_median_ratio=float(np.median(l2_ratio)),
        l2_max_ratio=float(l2_ratio.max()), degenerate_pairs=degenerate, seed=int(seed),
    )
    if degenerate:
        logger.warning("skipped %d identical pair(s)", degenerate)
    logger.info("N=%d: distortion min %.3e median %.3e over %d pairs (injective=%s)",
                N, stats.min_ratio, stats.median_ratio, stats.pair_count, stats.injective_flag)
    return stats
