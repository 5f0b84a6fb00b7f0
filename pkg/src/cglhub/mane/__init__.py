from .distortion import DEFAULT_THRESHOLD, DistortionStats, distortion_stats
from .inertial import (InertialForm, LiftResult, TrackReport, build_inertial_form, inertial_form_rhs, lift,
                       track_error)

__all__ = [
    "DEFAULT_THRESHOLD", "DistortionStats", "distortion_stats",
    "InertialForm", "LiftResult", "TrackReport", "build_inertial_form", "inertial_form_rhs", "lift",
    "track_error",
]
