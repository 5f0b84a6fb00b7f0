from .defaultconfig import (
    CubicCGL_Config,
    Linear_Config,
    Pointwise_Config,
    RunConfig,
)
from .parser import parse_config, config_overrides

__all__ = [
    "CubicCGL_Config",
    "Linear_Config",
    "Pointwise_Config",
    "RunConfig",
    "parse_config",
    "config_overrides",
]
