# -*- coding: utf-8 -*-
"""Exception hierarchy shared by every cglhub module."""

from __future__ import annotations

from typing import Any


class CGLError(Exception):
    """Base class for all cglhub errors."""


class ConfigError(CGLError, ValueError):
    """Invalid run configuration; ``violations`` lists every problem found."""

    def __init__(self, violations: list[str] | str):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GridError(CGLError, ValueError):
    """Array shape or grid size does not match the GridSpec."""


class LatticeError(CGLError, ValueError):
    """Invalid (N, L) or search range."""


class SupportError(CGLError, ValueError):
    """Fourier support of phi exceeds the configured truncation."""


class BlowUpError(CGLError, FloatingPointError):
    """Non-finite or runaway state during time stepping."""

    def __init__(self, time: float, message: str = "", state: Any = None):
        self.time = float(time)
        self.state = state
        super().__init__(f"blow-up at t={self.time:.6g}" + (f": {message}" if message else ""))


class BoundViolationError(CGLError, ArithmeticError):
    """The dichotomy mode bound failed beyond the discretization tolerance."""


class TemporalAveragingError(CGLError, ValueError):
    """|beta|/(2 omega_n) >= 1: the near-identity transform is not invertible."""


class InertialFormError(CGLError, RuntimeError):
    """Inertial form misuse (e.g. lift from a non-injective sample)."""


class StageError(CGLError, RuntimeError):
    """A pipeline stage failed; ``stage`` and ``error_type`` name what broke."""

    def __init__(self, stage: str, error_type: str, message: str):
        self.stage = stage
        self.error_type = error_type
        self.message = message
        super().__init__(f"[CGLEngine] {stage} stage failed: {message}")
