from .base import BaseCommand, CommandResult, resolve_out
from .lattice import CertifyShellCommand
from .dynamics import SampleCommand, SimulateCommand
from .variational import VerifyEstimateCommand
from .mane import InertialFormCommand, ManeCheckCommand
from .pipeline import PipelineCommand

__all__ = [
    "BaseCommand",
    "CommandResult",
    "resolve_out",
    "CertifyShellCommand",
    "SimulateCommand",
    "SampleCommand",
    "VerifyEstimateCommand",
    "ManeCheckCommand",
    "InertialFormCommand",
    "PipelineCommand",
]
