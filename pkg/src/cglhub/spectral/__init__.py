from .grid import (
    GridSpec,
    SpectralField,
    VOLUME_FACTOR,
    transform,
    spatial_average,
    apply_laplacian,
    project,
    l2_norm,
    sobolev_norm,
    sobolev_weights,
    inner,
    random_field,
)
from .nonlinearity import (
    CubicCGL,
    LinearF,
    ZeroF,
    PointwiseF,
    nonlinear_term,
    nonlinearity_eval,
)
from .io import write_field, read_field, write_series, read_series

__all__ = [
    "GridSpec",
    "SpectralField",
    "VOLUME_FACTOR",
    "transform",
    "spatial_average",
    "apply_laplacian",
    "project",
    "l2_norm",
    "sobolev_norm",
    "sobolev_weights",
    "inner",
    "random_field",
    "CubicCGL",
    "LinearF",
    "ZeroF",
    "PointwiseF",
    "nonlinear_term",
    "nonlinearity_eval",
    "write_field",
    "read_field",
    "write_series",
    "read_series",
]
