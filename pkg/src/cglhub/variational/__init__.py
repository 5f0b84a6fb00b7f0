from .coefficients import (FieldSeries, GaugedProblem, VariationalCoefficients, certify_coefficients,
                           gauge_zero_mean, linearize_coefficients, series_norm, time_norm)
from .dichotomy import (SPLITTINGS, BackwardProblem, EstimateReport, ModeSolution, backward_bvp_solve,
                        dense_space_time_solve, scalar_mode_solve, t_doubling_sensitivity)
from .averaging import (DIRECTIONS, SmallnessReport, averaged_mode_band_report, minimal_N_for_smallness,
                        smallness_report, temporal_transform)
from .lipschitz import measure_backward_lipschitz, measure_pairs

__all__ = [
    "FieldSeries", "GaugedProblem", "VariationalCoefficients", "certify_coefficients",
    "gauge_zero_mean", "linearize_coefficients", "series_norm", "time_norm",
    "SPLITTINGS", "BackwardProblem", "EstimateReport", "ModeSolution", "backward_bvp_solve",
    "dense_space_time_solve", "scalar_mode_solve", "t_doubling_sensitivity",
    "DIRECTIONS", "SmallnessReport", "averaged_mode_band_report", "minimal_N_for_smallness",
    "smallness_report", "temporal_transform",
    "measure_backward_lipschitz", "measure_pairs",
]
