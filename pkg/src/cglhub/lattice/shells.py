# -*- coding: utf-8 -*-
"""Integer lattice of the periodic Laplacian on the 3-torus.

Eigenfunctions are e^{ik.x}, k in Z^3, with eigenvalue |k|^2. Shells are
the sets {k : N-L <= |k|^2 <= N+L}; every ordered output is lexicographic
in (k1, k2, k3).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

import numpy as np
from scipy.spatial import cKDTree
from tqdm import tqdm

from cglhub.core.exceptions import LatticeError
from cglhub.core.logging import progress_enabled

logger = logging.getLogger(__name__)


class WaveVector(NamedTuple):
    k1: int
    k2: int
    k3: int

    @property
    def eigenvalue(self) -> int:
        return self.k1 * self.k1 + self.k2 * self.k2 + self.k3 * self.k3


def eigenvalue(k: Iterable[int]) -> int:
    """Eigenvalue of -Laplacian for the Fourier mode ``k``."""
    k1, k2, k3 = (int(c) for c in k)
    return k1 * k1 + k2 * k2 + k3 * k3


# ═══════════════════════════════════════════════════════════════════════════
#  ENUMERATION
# ═══════════════════════════════════════════════════════════════════════════

@lru_cache(maxsize=8)
def _ball(max_eigenvalue: int) -> tuple[np.ndarray, np.ndarray]:
    """All k with |k|^2 <= max_eigenvalue, sorted by eigenvalue (stable, lexicographic inside)."""
    r = math.isqrt(max(max_eigenvalue, 0))
    ax = np.arange(-r, r + 1, dtype=np.int64)
    k = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)
    lam = (k * k).sum(axis=1)
    keep = lam <= max_eigenvalue
    k, lam = k[keep], lam[keep]
    order = np.argsort(lam, kind="stable")
    k, lam = k[order], lam[order]
    k.setflags(write=False)
    lam.setflags(write=False)
    return k, lam


def _check_shell_args(N: int, L: int) -> None:
    if int(N) != N or int(L) != L:
        raise LatticeError(f"N and L must be integers, got N={N!r}, L={L!r}")
    if L < 0:
        raise LatticeError(f"L must be non-negative, got {L}")
    if L >= N:
        raise LatticeError(f"L must be smaller than N, got N={N}, L={L}")


def _shell_slice(k: np.ndarray, lam: np.ndarray, N: int, L: int) -> np.ndarray:
    lo = np.searchsorted(lam, N - L, side="left")
    hi = np.searchsorted(lam, N + L, side="right")
    pts = k[lo:hi]
    if len(pts) == 0:
        return pts.reshape(0, 3)
    return pts[np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))]


def shell_array(N: int, L: int) -> np.ndarray:
    """Shell (N, L) as an (n, 3) int64 array in lexicographic order."""
    _check_shell_args(N, L)
    k, lam = _ball(int(N + L))
    return _shell_slice(k, lam, int(N), int(L))


def enumerate_shell(N: int, L: int) -> tuple[WaveVector, ...]:
    """Return {k : N-L <= |k|^2 <= N+L} in lexicographic order.

    Raises:
        LatticeError: if L >= N or L < 0.
    """
    return tuple(WaveVector(*map(int, row)) for row in shell_array(N, L))


def min_pair_separation(shell) -> float:
    """Minimum Euclidean distance between distinct points of ``shell``.

    Returns ``math.inf`` when fewer than two distinct points are given.
    """
    pts = np.asarray(list(shell) if not isinstance(shell, np.ndarray) else shell, dtype=float)
    if pts.size == 0:
        return math.inf
    pts = np.unique(pts.reshape(-1, 3), axis=0)
    if len(pts) < 2:
        return math.inf
    dist, _ = cKDTree(pts).query(pts, k=2)
    return float(dist[:, 1].min())


def search_separated_N(
    L: int,
    rho: float,
    n_min: int,
    n_max: int,
    workers: int = 1,
) -> list[int]:
    """All N in [n_min, n_max] whose shell (N, L) has separation > rho.

    Shells with fewer than two points pass (their separation is +inf).
    """
    if L < 0:
        raise LatticeError(f"L must be non-negative, got {L}")
    if n_min <= L:
        raise LatticeError(f"n_min must exceed L, got n_min={n_min}, L={L}")
    if n_max < n_min:
        raise LatticeError(f"empty range [{n_min}, {n_max}]")
    k, lam = _ball(int(n_max + L))

    def _passes(N: int) -> bool:
        return min_pair_separation(_shell_slice(k, lam, N, L)) > rho

    candidates = range(int(n_min), int(n_max) + 1)
    bar = tqdm(total=len(candidates), desc=f"shells L={L}", disable=not progress_enabled())
    with bar:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                flags = []
                for flag in pool.map(_passes, candidates):
                    flags.append(flag)
                    bar.update(1)
        else:
            flags = []
            for N in candidates:
                flags.append(_passes(N))
                bar.update(1)
    passing = [N for N, ok in zip(candidates, flags) if ok]
    logger.info("L=%d rho=%g: %d of %d shells in [%d, %d] separated",
                L, rho, len(passing), len(candidates), n_min, n_max)
    return passing


# ═══════════════════════════════════════════════════════════════════════════
#  MODE BANDS
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ModeBand:
    """Low / intermediate / high partition of the retained modes around N."""

    N: int
    L: int
    cutoff: int
    low: tuple[WaveVector, ...]
    intermediate: tuple[WaveVector, ...]
    high: tuple[WaveVector, ...]

    def __post_init__(self):
        if not (0 < self.L < self.N):
            raise LatticeError(f"ModeBand needs 0 < L < N, got N={self.N}, L={self.L}")
        sets = (set(self.low), set(self.intermediate), set(self.high))
        if sum(map(len, sets)) != len(set().union(*sets)):
            raise LatticeError("mode band sets overlap")

    @property
    def theta(self) -> float:
        return self.N + 0.5

    @property
    def lower(self) -> int:
        return self.N - self.L

    @property
    def upper(self) -> int:
        return self.N + self.L

    def classify(self, lam):
        """0 for low, 1 for intermediate, 2 for high (works on arrays)."""
        lam = np.asarray(lam)
        return np.where(lam < self.lower, 0, np.where(lam <= self.upper, 1, 2))


def retained_vectors(cutoff: int) -> np.ndarray:
    """All k with max |k_i| <= cutoff, lexicographic."""
    ax = np.arange(-cutoff, cutoff + 1, dtype=np.int64)
    return np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), axis=-1).reshape(-1, 3)


def mode_band(N: int, L: int, grid) -> ModeBand:
    """Partition the retained modes of ``grid`` (a GridSpec or an integer cutoff)."""
    cutoff = int(getattr(grid, "cutoff", grid))
    pts = retained_vectors(cutoff)
    lam = (pts * pts).sum(axis=1)
    low = lam < N - L
    mid = (lam >= N - L) & (lam <= N + L)
    high = lam > N + L

    def _vec(mask):
        return tuple(WaveVector(*map(int, row)) for row in pts[mask])

    return ModeBand(N=int(N), L=int(L), cutoff=cutoff,
                    low=_vec(low), intermediate=_vec(mid), high=_vec(high))
