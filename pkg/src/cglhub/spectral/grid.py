# -*- coding: utf-8 -*-
"""Periodic grid on (-pi, pi)^3 and spectral fields living on it.

Convention: Psi(x) = sum_k Psi_hat(k) e^{i k.x}, so the spatial mean is the
zeroth coefficient and the physical L2 norm is (2 pi)^{3/2} times the l2
norm of the coefficients. Coefficient arrays are kept in FFT order
(index j holds wavenumber j for j < M/2 and j - M otherwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.fft as sfft

from cglhub.core.exceptions import GridError

VOLUME_FACTOR = (2.0 * math.pi) ** 1.5


@dataclass(frozen=True)
class GridSpec:
    """M points per axis on the fixed domain (-pi, pi)^3."""

    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 4 or self.M % 2:
            raise GridError(f"M must be an even integer >= 4, got {self.M!r}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.M, self.M, self.M)

    @property
    def cutoff(self) -> int:
        """Largest retained |k_i|; the Nyquist plane is dropped."""
        return self.M // 2 - 1

    @property
    def dealias_cutoff(self) -> int:
        """Largest |k_i| kept after the 2/3 truncation of nonlinear terms."""
        return self.M // 3

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        return np.rint(np.fft.fftfreq(self.M, d=1.0 / self.M)).astype(np.int64)

    @cached_property
    def k_axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        k = self.wavenumbers
        return k[:, None, None], k[None, :, None], k[None, None, :]

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        k1, k2, k3 = self.k_axes
        lam = k1 ** 2 + k2 ** 2 + k3 ** 2
        lam.setflags(write=False)
        return lam

    def _box(self, radius: int) -> np.ndarray:
        k1, k2, k3 = self.k_axes
        mask = (np.abs(k1) <= radius) & (np.abs(k2) <= radius) & (np.abs(k3) <= radius)
        mask.setflags(write=False)
        return mask

    @cached_property
    def retained_mask(self) -> np.ndarray:
        return self._box(self.cutoff)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        return self._box(self.dealias_cutoff)

    @cached_property
    def _sign(self) -> np.ndarray:
        # shifts the sample origin from 0 to -pi
        k1, k2, k3 = self.k_axes
        return np.where((k1 + k2 + k3) % 2 == 0, 1.0, -1.0)

    @cached_property
    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable sample coordinates x_j = -pi + 2 pi j / M."""
        x = -math.pi + 2.0 * math.pi * np.arange(self.M) / self.M
        return x[:, None, None], x[None, :, None], x[None, None, :]

    # ------------------------------------------------------------------ #
    #  Array-level transforms                                            #
    # ------------------------------------------------------------------ #

    def check_shape(self, arr: np.ndarray, what: str = "array") -> None:
        if arr.shape[-3:] != self.shape:
            raise GridError(f"{what} has shape {arr.shape}, expected (..., {self.M}, {self.M}, {self.M})")

    def to_spectral(self, samples: np.ndarray) -> np.ndarray:
        samples = np.asarray(samples)
        self.check_shape(samples, "physical samples")
        return self._sign * sfft.fftn(samples, axes=(-3, -2, -1), norm="forward")

    def to_physical(self, coeffs: np.ndarray) -> np.ndarray:
        coeffs = np.asarray(coeffs)
        self.check_shape(coeffs, "coefficients")
        return sfft.ifftn(self._sign * coeffs, axes=(-3, -2, -1), norm="forward")

    # ------------------------------------------------------------------ #
    #  Mode sets                                                         #
    # ------------------------------------------------------------------ #

    def index(self, k: Iterable[int]) -> tuple[int, int, int]:
        k = tuple(int(c) for c in k)
        if len(k) != 3 or max(abs(c) for c in k) > self.M // 2 or any(c == self.M // 2 for c in k):
            raise GridError(f"wavevector {k} is not representable on M={self.M}")
        return tuple(c % self.M for c in k)

    def mask_from_vectors(self, vectors) -> np.ndarray:
        """Boolean mask for a collection of wavevectors, or pass a mask through."""
        if isinstance(vectors, np.ndarray) and vectors.dtype == bool:
            self.check_shape(vectors, "mode mask")
            return vectors
        mask = np.zeros(self.shape, bool)
        for k in vectors:
            if max(abs(int(c)) for c in k) > self.cutoff:
                raise GridError(f"wavevector {tuple(k)} outside the retained lattice (cutoff {self.cutoff})")
            mask[self.index(k)] = True
        return mask

    def low_mask(self, N: float) -> np.ndarray:
        """Retained modes with eigenvalue <= N (range of P_N)."""
        return self.retained_mask & (self.eigenvalues <= N)

    def band_masks(self, N: int, L: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        lam = self.eigenvalues
        ret = self.retained_mask
        return ret & (lam < N - L), ret & (lam >= N - L) & (lam <= N + L), ret & (lam > N + L)

    def lexicographic(self, coeffs: np.ndarray) -> np.ndarray:
        """Reorder the last three axes from FFT order to k = -M/2 .. M/2-1."""
        return np.fft.fftshift(coeffs, axes=(-3, -2, -1))

    def from_lexicographic(self, coeffs: np.ndarray) -> np.ndarray:
        return np.fft.ifftshift(coeffs, axes=(-3, -2, -1))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Immutable Fourier coefficient array on a GridSpec."""

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=np.complex128, copy=True)
        self.grid.check_shape(arr, "coefficients")
        if arr.ndim != 3:
            raise GridError(f"a single field needs a 3D array, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    # --- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, grid: GridSpec) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, complex))

    @classmethod
    def constant(cls, grid: GridSpec, value: complex) -> "SpectralField":
        c = np.zeros(grid.shape, complex)
        c[0, 0, 0] = value
        return cls(grid, c)

    @classmethod
    def delta(cls, grid: GridSpec, k: Iterable[int], value: complex = 1.0) -> "SpectralField":
        c = np.zeros(grid.shape, complex)
        c[grid.index(k)] = value
        return cls(grid, c)

    @classmethod
    def from_modes(cls, grid: GridSpec, modes: dict) -> "SpectralField":
        c = np.zeros(grid.shape, complex)
        for k, v in modes.items():
            c[grid.index(k)] += v
        return cls(grid, c)

    @classmethod
    def from_physical(cls, grid: GridSpec, samples: np.ndarray) -> "SpectralField":
        return cls(grid, grid.to_spectral(samples))

    # --- views --------------------------------------------------------

    def to_physical(self) -> np.ndarray:
        return self.grid.to_physical(self.coeffs)

    def __getitem__(self, k) -> complex:
        return complex(self.coeffs[self.grid.index(k)])

    def replace(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(self.grid, coeffs)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, SpectralField):
            if other.grid != self.grid:
                raise GridError(f"grid mismatch: M={self.grid.M} vs M={other.grid.M}")
            return other.coeffs
        return other

    def __add__(self, other):
        return self.replace(self.coeffs + self._other(other))

    def __sub__(self, other):
        return self.replace(self.coeffs - self._other(other))

    def __mul__(self, scalar):
        if isinstance(scalar, SpectralField):
            return NotImplemented
        return self.replace(self.coeffs * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self.replace(-self.coeffs)

    def allclose(self, other: "SpectralField", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        return other.grid == self.grid and np.allclose(self.coeffs, other.coeffs, rtol=rtol, atol=atol)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))

    def norm(self) -> float:
        """Physical L2 norm."""
        return l2_norm(self.coeffs)


# ═══════════════════════════════════════════════════════════════════════════
#  OPERATIONS
# ═══════════════════════════════════════════════════════════════════════════

def transform(obj, direction: str, grid: GridSpec | None = None):
    """Convert between physical samples and SpectralField.

    ``direction`` is ``"to_spectral"`` (samples -> SpectralField, ``grid``
    required) or ``"to_physical"`` (SpectralField -> samples).
    """
    if direction == "to_spectral":
        if grid is None:
            raise GridError("to_spectral needs the target grid")
        return SpectralField.from_physical(grid, obj)
    if direction == "to_physical":
        if not isinstance(obj, SpectralField):
            raise GridError("to_physical expects a SpectralField")
        return obj.to_physical()
    raise ValueError(f"unknown direction {direction!r}; use 'to_spectral' or 'to_physical'")


def spatial_average(field: SpectralField) -> complex:
    return complex(field.coeffs[0, 0, 0])


def apply_laplacian(field: SpectralField, factor: complex = 1.0) -> SpectralField:
    """factor * Laplacian: coefficient k multiplied by -factor * |k|^2."""
    return field.replace(field.coeffs * (-factor * field.grid.eigenvalues))


def project(field: SpectralField, modes) -> SpectralField:
    """Zero every coefficient outside ``modes`` (wavevectors or a boolean mask)."""
    mask = field.grid.mask_from_vectors(modes)
    if np.any(mask & ~field.grid.retained_mask):
        raise GridError("projection modes must lie in the retained lattice")
    return field.replace(np.where(mask, field.coeffs, 0.0))


def l2_norm(coeffs: np.ndarray, axis=(-3, -2, -1)) -> np.ndarray | float:
    """Physical L2 norm of coefficient array(s)."""
    out = VOLUME_FACTOR * np.sqrt(np.sum(np.abs(coeffs) ** 2, axis=axis))
    return float(out) if np.ndim(out) == 0 else out


def sobolev_weights(grid: GridSpec, s: float) -> np.ndarray:
    return (1.0 + grid.eigenvalues) ** (0.5 * s)


def sobolev_norm(field: SpectralField, s: float) -> float:
    """H^s norm with weights (1 + |k|^2)^s on |Psi_hat(k)|^2."""
    if s < 0:
        raise ValueError(f"s must be non-negative, got {s}")
    return l2_norm(field.coeffs * sobolev_weights(field.grid, s))


def inner(f: SpectralField, g: SpectralField) -> complex:
    """l2 pairing sum conj(f_hat) g_hat."""
    return complex(np.vdot(f.coeffs, f._other(g)))


def random_field(grid: GridSpec, rng: np.random.Generator, amplitude: float = 1.0,
                 smoothness: float = 2.0) -> SpectralField:
    """Smooth random complex field on the dealiased band with RMS |Psi| = amplitude."""
    shape = grid.shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    c *= grid.dealias_mask / (1.0 + grid.eigenvalues) ** smoothness
    scale = np.sqrt(np.sum(np.abs(c) ** 2))
    if scale > 0:
        c *= amplitude / scale
    return SpectralField(grid, c)
