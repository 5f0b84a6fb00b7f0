#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os
import platform

from colorama import init
init(autoreset=True)

from cglhub._version import __version__
_system_info = platform.system()

# ---------------------Check runing environment -----------
if 'SLURM_CPUS_PER_TASK' in os.environ:
    _cpu_core = int(os.environ['SLURM_CPUS_PER_TASK'])
    _manager = 'slurm'
elif 'PBS_NUM_PPN' in os.environ:
    _cpu_core = int(os.environ['PBS_NUM_PPN'])
    _manager = 'pbs'
elif 'LSB_DJOB_NUMPROC' in os.environ:
    _cpu_core = int(os.environ['LSB_DJOB_NUMPROC'])
    _manager = 'lsf'
else:
    _cpu_core = os.cpu_count() or 1
    _manager = 'local'

_env = {
        "cpu": _cpu_core,
        "manager": _manager,
        "system": _system_info,
    }
# ---------------------package imports---------------------

from .core.registry import (
    Nonlinearity,
    Integrator,
)

from .core.base import (
    BaseNonlinearity,
    BaseIntegrator,
)

from .spectral import (
    GridSpec,
    SpectralField,
    CubicCGL,
    LinearF,
    ZeroF,
    PointwiseF,
)

from .dynamics import (
    ETD1,
    ETD2,
    CGLParams,
    Trajectory,
    AttractorSample,
    simulate,
    sample_attractor,
)

from .lattice import (
    WaveVector,
    ModeBand,
    ShellCertificate,
)

from .variational import (
    BackwardProblem,
    EstimateReport,
    backward_bvp_solve,
    scalar_mode_solve,
    measure_backward_lipschitz,
)

from .mane import (
    DistortionStats,
    InertialForm,
    distortion_stats,
    build_inertial_form,
    lift,
)

from .config import RunConfig, parse_config

__all__ = [
    "__version__",
    "Nonlinearity",
    "Integrator",
    "BaseNonlinearity",
    "BaseIntegrator",
    "GridSpec",
    "SpectralField",
    "CubicCGL",
    "LinearF",
    "ZeroF",
    "PointwiseF",
    "ETD1",
    "ETD2",
    "CGLParams",
    "Trajectory",
    "AttractorSample",
    "simulate",
    "sample_attractor",
    "WaveVector",
    "ModeBand",
    "ShellCertificate",
    "BackwardProblem",
    "EstimateReport",
    "backward_bvp_solve",
    "scalar_mode_solve",
    "measure_backward_lipschitz",
    "DistortionStats",
    "InertialForm",
    "distortion_stats",
    "build_inertial_form",
    "lift",
    "RunConfig",
    "parse_config",
]
