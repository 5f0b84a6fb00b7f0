from .registry import Registry, Nonlinearity, Integrator
from .exceptions import (
    CGLError,
    ConfigError,
    GridError,
    LatticeError,
    SupportError,
    BlowUpError,
    BoundViolationError,
    TemporalAveragingError,
    InertialFormError,
    StageError,
)

__all__ = [
    "Registry",
    "Nonlinearity",
    "Integrator",
    "CGLError",
    "ConfigError",
    "GridError",
    "LatticeError",
    "SupportError",
    "BlowUpError",
    "BoundViolationError",
    "TemporalAveragingError",
    "InertialFormError",
    "StageError",
]
