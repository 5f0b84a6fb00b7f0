# -*- coding: utf-8 -*-
from __future__ import annotations

import logging

import numpy as np

from cglhub.config.defaultconfig import CubicCGL_Config, Linear_Config, Pointwise_Config
from cglhub.core.base import BaseNonlinearity
from cglhub.core.exceptions import BlowUpError
from .grid import GridSpec, SpectralField

logger = logging.getLogger(__name__)


class CubicCGL(BaseNonlinearity):
    """f = (1 + i beta) Psi - (1 + i delta) Psi |Psi|^2."""

    name = "cubic_cgl"
    default_config = CubicCGL_Config

    @property
    def growth(self) -> complex:
        return complex(1.0, self.config.beta)

    @property
    def cubic(self) -> complex:
        return complex(1.0, self.config.delta)

    def evaluate(self, psi):
        return self.growth * psi - self.cubic * psi * (psi.real ** 2 + psi.imag ** 2)

    def d_psi(self, psi):
        return self.growth - 2.0 * self.cubic * (psi.real ** 2 + psi.imag ** 2)

    def d_psibar(self, psi):
        return -self.cubic * psi * psi

    def is_defocusing(self, omega: float) -> bool:
        return omega * self.config.delta > 0


class LinearF(BaseNonlinearity):
    """f = c Psi for a complex constant c."""

    name = "linear"
    default_config = Linear_Config
    linear = True

    def evaluate(self, psi):
        return complex(self.config.coeff) * psi

    def d_psi(self, psi):
        return np.full(np.shape(psi), complex(self.config.coeff))

    def d_psibar(self, psi):
        return np.zeros(np.shape(psi), complex)


class ZeroF(BaseNonlinearity):
    """f identically zero (pure cross-diffusion)."""

    name = "zero"
    linear = True

    def evaluate(self, psi):
        return np.zeros(np.shape(psi), complex)

    def d_psi(self, psi):
        return np.zeros(np.shape(psi), complex)

    def d_psibar(self, psi):
        return np.zeros(np.shape(psi), complex)


class PointwiseF(BaseNonlinearity):
    """User-supplied smooth map f(Psi, conj(Psi)) applied samplewise.

    Missing derivatives are taken by central differences in the real and
    imaginary directions: d/dPsi = (d_x - i d_y)/2, d/dconj(Psi) = (d_x + i d_y)/2.
    """

    name = "pointwise"
    default_config = Pointwise_Config

    def __init__(self, config=None, **overrides):
        super().__init__(config, **overrides)
        if self.config.func is None:
            raise ValueError("PointwiseF needs a callable 'func'")

    def evaluate(self, psi):
        return np.asarray(self.config.func(psi), dtype=complex)

    def _partials(self, psi):
        h = self.config.step
        f = self.config.func
        dx = (f(psi + h) - f(psi - h)) / (2 * h)
        dy = (f(psi + 1j * h) - f(psi - 1j * h)) / (2 * h)
        return dx, dy

    def d_psi(self, psi):
        if self.config.d_psi is not None:
            return np.asarray(self.config.d_psi(psi), dtype=complex)
        dx, dy = self._partials(psi)
        return 0.5 * (dx - 1j * dy)

    def d_psibar(self, psi):
        if self.config.d_psibar is not None:
            return np.asarray(self.config.d_psibar(psi), dtype=complex)
        dx, dy = self._partials(psi)
        return 0.5 * (dx + 1j * dy)


# ---------------------------------------------------------------------------
# Dealiased evaluation
# ---------------------------------------------------------------------------

def nonlinear_term(grid: GridSpec, f_spec: BaseNonlinearity, coeffs: np.ndarray) -> np.ndarray:
    """Array form of nonlinearity_eval; works on stacked coefficient arrays too."""
    out = grid.to_spectral(f_spec.evaluate(grid.to_physical(coeffs)))
    if not np.all(np.isfinite(out)):
        raise BlowUpError(float("nan"), f"non-finite values from {f_spec.name}")
    return out * grid.dealias_mask


def nonlinearity_eval(field: SpectralField, f_spec: BaseNonlinearity) -> SpectralField:
    """Evaluate f pointwise on the grid, transform back, truncate by the 2/3 rule."""
    if not field.is_finite():
        raise BlowUpError(float("nan"), "non-finite input field")
    return field.replace(nonlinear_term(field.grid, f_spec, field.coeffs))
