from .integrator import (
    ETD1,
    ETD2,
    CGLParams,
    DissipativityEnvelope,
    Trajectory,
    phi_functions,
    step,
    simulate,
)
from .monitor import DissipativityReport, dissipativity_monitor
from .attractor import AttractorSample, sample_attractor

__all__ = [
    "ETD1",
    "ETD2",
    "CGLParams",
    "DissipativityEnvelope",
    "Trajectory",
    "phi_functions",
    "step",
    "simulate",
    "DissipativityReport",
    "dissipativity_monitor",
    "AttractorSample",
    "sample_attractor",
]
