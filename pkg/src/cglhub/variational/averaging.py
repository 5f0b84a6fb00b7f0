# -*- coding: utf-8 -*-
"""Near-identity changes of variables for the intermediate modes.

With omega_n = omega * lambda_n, an intermediate mode z_n is rotated to
Z_n = e^{i omega_n t} z_n, and the fast term e^{2 i omega_n t} beta(t) conj(Z_n)
is removed by U_n = Z_n - c_n(t) conj(Z_n), c_n = (i / 2 omega_n) e^{2 i omega_n t} beta(t).
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np

from cglhub.core.exceptions import TemporalAveragingError
from .coefficients import VariationalCoefficients

logger = logging.getLogger(__name__)

DIRECTIONS = ("z_to_Z", "Z_to_z", "Z_to_U", "U_to_Z")


def temporal_transform(z, omega: float, direction: str, *, times, lambdas=1.0, beta=None):
    """Apply one of the four intermediate-mode transforms.

    ``z`` is a series of shape (nt,) or (nt, n); ``lambdas`` holds the mode
    eigenvalues (one per column) and ``beta`` the series <b>(t), shape (nt,).

    Raises:
        TemporalAveragingError: for the U transforms when omega_n = 0 or
            max |beta| / (2 |omega_n|) >= 1.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}; expected one of {DIRECTIONS}")
    z = np.asarray(z, complex)
    flat = z.ndim == 1
    zz = z[:, None] if flat else z
    t = np.asarray(times, float).reshape(-1, 1)
    if len(t) != zz.shape[0]:
        raise ValueError(f"{len(t)} times for a series of length {zz.shape[0]}")
    om = omega * np.atleast_1d(np.asarray(lambdas, float))[None, :]
    if om.shape[1] not in (1, zz.shape[1]):
        raise ValueError(f"{om.shape[1]} eigenvalues for {zz.shape[1]} modes")

    if direction == "z_to_Z":
        out = np.exp(1j * om * t) * zz
    elif direction == "Z_to_z":
        out = np.exp(-1j * om * t) * zz
    else:
        b = np.zeros(len(t), complex) if beta is None else np.asarray(beta, complex).reshape(-1)
        if len(b) != len(t):
            raise ValueError(f"beta has {len(b)} samples for {len(t)} times")
        if np.any(om == 0):
            raise TemporalAveragingError("omega_n = 0: the U transform is undefined")
        ratio = float(np.max(np.abs(b)[:, None] / (2 * np.abs(om))))
        if ratio >= 1.0:
            raise TemporalAveragingError(f"|beta|/(2 omega_n) reaches {ratio:.4g} >= 1")
        c = 1j / (2 * om) * np.exp(2j * om * t) * b[:, None]
        if direction == "Z_to_U":
            out = zz - c * np.conj(zz)
        else:
            out = (zz + c * np.conj(zz)) / (1.0 - np.abs(c) ** 2)
    return out[:, 0] if flat else out


@dataclass(frozen=True)
class SmallnessReport:
    N: int
    L: int
    omega: float
    K: float
    eps: float | None
    inverse_frequency: float
    gap_ratio: float
    K_inverse_frequency: float
    K_gap_ratio: float
    inverse_frequency_ok: bool | None
    gap_ratio_ok: bool | None

    def to_dict(self) -> dict:
        return asdict(self)


def smallness_report(N: int, L: int, omega: float, K: float, eps: float | None = None) -> SmallnessReport:
    """1/(2 omega (N-L)) and (2L+1)/(4 omega (N-L)), raw and times K."""
    if omega == 0:
        raise ValueError("omega must be non-zero")
    if not N > L >= 0:
        raise ValueError(f"need N > L >= 0, got N={N}, L={L}")
    inv = 1.0 / (2.0 * abs(omega) * (N - L))
    gap = (2.0 * L + 1.0) / (4.0 * abs(omega) * (N - L))
    k_inv, k_gap = K * inv, K * gap
    return SmallnessReport(
        N=int(N), L=int(L), omega=float(omega), K=float(K), eps=eps,
        inverse_frequency=inv, gap_ratio=gap, K_inverse_frequency=k_inv, K_gap_ratio=k_gap,
        inverse_frequency_ok=None if eps is None else bool(k_inv <= eps),
        gap_ratio_ok=None if eps is None else bool(k_gap <= eps),
    )


def minimal_N_for_smallness(L: int, omega: float, K: float, eps: float, n_max: int = 10 ** 6) -> int | None:
    """Smallest N > L with both K-scaled bounds at most ``eps``; None if above ``n_max``."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if omega == 0:
        raise ValueError("omega must be non-zero")
    n = np.arange(L + 1, n_max + 1, dtype=float)
    inv = K / (2.0 * abs(omega) * (n - L))
    gap = K * (2.0 * L + 1.0) / (4.0 * abs(omega) * (n - L))
    hit = np.flatnonzero((inv <= eps) & (gap <= eps))
    return int(n[hit[0]]) if hit.size else None


def averaged_mode_band_report(coeffs: VariationalCoefficients, N: int, L: int, omega: float,
                              eps: float | None = None) -> dict:
    """Temporal averaging check on the actual <b>(t) over the intermediate band."""
    if not N > L >= 0:
        raise ValueError(f"need N > L >= 0, got N={N}, L={L}")
    lam = coeffs.grid.eigenvalues[coeffs.grid.retained_mask]
    band = np.unique(lam[(lam >= N - L) & (lam <= N + L)])
    beta_sup = float(np.abs(coeffs.mean_b).max()) if len(coeffs.times) else 0.0
    if omega == 0 or band.size == 0 or band.min() == 0:
        ratio = math.inf if beta_sup > 0 or omega == 0 else 0.0
    else:
        ratio = beta_sup / (2.0 * abs(omega) * float(band.min()))
    out = {
        "N": int(N), "L": int(L), "omega": float(omega),
        "band_eigenvalues": band.astype(int).tolist(),
        "beta_sup": beta_sup,
        "ratio_max": ratio,
        "invertible": bool(ratio < 1.0),
    }
    if omega != 0 and N > L:
        out["smallness"] = smallness_report(N, L, omega, coeffs.K, eps).to_dict()
    if not out["invertible"]:
        logger.warning("temporal averaging not invertible on N=%d, L=%d: ratio %.3g", N, L, ratio)
    return out
