# -*- coding: utf-8 -*-
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from cglhub.core.exceptions import SupportError
from .shells import min_pair_separation, search_separated_N, shell_array

logger = logging.getLogger(__name__)

DEFAULT_TRUNCATION = 16


@dataclass(frozen=True)
class ShellCertificate:
    """Separation and operator-norm certificate for one shell (N, L)."""

    N: int
    L: int
    rho: float | None
    population: int
    min_separation: float
    eps_bound: float

    def __post_init__(self):
        if self.population >= 2 and not self.min_separation > 0:
            raise ValueError("min_separation must be positive for a populated shell")
        if self.eps_bound < 0:
            raise ValueError("eps_bound must be non-negative")

    @property
    def separated(self) -> bool:
        return self.rho is None or self.min_separation > self.rho

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(d["min_separation"]):
            d["min_separation"] = None
        return d


# ---------------------------------------------------------------------------
# Fourier data of phi
# ---------------------------------------------------------------------------

def _dense_phi(phi_hat: Mapping, truncation: int) -> tuple[np.ndarray, int]:
    """Pack phi_hat into a cube indexed by k + s, s the support radius."""
    if not phi_hat:
        return np.zeros((1, 1, 1), complex), 0
    keys = np.array([tuple(int(c) for c in k) for k in phi_hat], dtype=np.int64).reshape(-1, 3)
    s = int(np.abs(keys).max())
    if s > truncation:
        raise SupportError(f"phi_hat support radius {s} exceeds truncation {truncation}")
    cube = np.zeros((2 * s + 1,) * 3, complex)
    for (k1, k2, k3), value in zip(keys, phi_hat.values()):
        cube[k1 + s, k2 + s, k3 + s] += complex(value)
    return cube, s


def coupling_matrix(phi_hat: Mapping, N: int, L: int,
                    truncation: int = DEFAULT_TRUNCATION) -> np.ndarray:
    """Dense matrix of I(phi)I - <phi>I on the shell, entries phi_hat(k - m), zero diagonal."""
    pts = shell_array(N, L)
    cube, s = _dense_phi(phi_hat, truncation)
    n = len(pts)
    if n == 0:
        return np.zeros((0, 0), complex)
    diff = pts[:, None, :] - pts[None, :, :]
    inside = np.all(np.abs(diff) <= s, axis=-1)
    A = np.zeros((n, n), complex)
    idx = diff[inside] + s
    A[inside] = cube[idx[:, 0], idx[:, 1], idx[:, 2]]
    np.fill_diagonal(A, 0.0)
    return A


def schur_bound(phi_hat: Mapping | None, N: int, L: int, rho: float | None = None,
                truncation: int = DEFAULT_TRUNCATION) -> ShellCertificate:
    """Certify ||I phi I - <phi> I|| on shell (N, L) by the Schur test.

    eps = sqrt(max_k sum_m |phi_hat(k-m)| * max_m sum_k |phi_hat(k-m)|), sums over
    m != k in the shell. For |phi_hat| even the two factors coincide with the row sum.

    Raises:
        SupportError: if phi_hat has a wavevector with a component above ``truncation``.
    """
    pts = shell_array(N, L)
    if phi_hat:
        A = np.abs(coupling_matrix(phi_hat, N, L, truncation))
        row = float(A.sum(axis=1).max()) if len(A) else 0.0
        col = float(A.sum(axis=0).max()) if len(A) else 0.0
        eps = math.sqrt(row * col)
    else:
        eps = 0.0
    return ShellCertificate(
        N=int(N), L=int(L), rho=rho, population=int(len(pts)),
        min_separation=min_pair_separation(pts), eps_bound=eps,
    )


def certify_range(L: int, rho: float, n_min: int, n_max: int,
                  phi_hat: Mapping | None = None, workers: int = 1,
                  truncation: int = DEFAULT_TRUNCATION) -> list[ShellCertificate]:
    """One certificate per N in [n_min, n_max] whose shell is rho-separated."""
    return [schur_bound(phi_hat, N, L, rho=rho, truncation=truncation)
            for N in search_separated_N(L, rho, n_min, n_max, workers=workers)]


def load_phi_hat(path: str | Path) -> dict[tuple[int, int, int], complex]:
    """Read Fourier data written as whitespace columns ``k1 k2 k3 re im``."""
    rows = np.loadtxt(Path(path).expanduser(), ndmin=2, comments="#")
    if rows.shape[1] != 5:
        raise ValueError(f"{path}: expected 5 columns (k1 k2 k3 re im), got {rows.shape[1]}")
    out: dict[tuple[int, int, int], complex] = {}
    for k1, k2, k3, re, im in rows:
        key = (int(k1), int(k2), int(k3))
        out[key] = out.get(key, 0j) + complex(re, im)
    return out
