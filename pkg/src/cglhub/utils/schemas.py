# -*- coding: utf-8 -*-
"""JSON schemas of every report a run writes."""

from __future__ import annotations

from typing import Any

from jsonschema import Draft202012Validator

# reals may be written as null when non-finite
_NUM = {"type": ["number", "null"]}
_INT = {"type": "integer"}
_BOOL = {"type": "boolean"}


def _obj(required: dict[str, Any], optional: dict[str, Any] | None = None, extra: bool = True) -> dict:
    props = dict(required)
    props.update(optional or {})
    return {"type": "object", "required": sorted(required), "properties": props,
            "additionalProperties": extra}


_CERTIFICATE = _obj({
    "N": _INT, "L": _INT, "rho": _NUM, "population": _INT,
    "min_separation": _NUM, "eps_bound": _NUM,
}, extra=False)

_ESTIMATE = _obj({
    "C_measured": _NUM, "theta_measured": _NUM, "bound_C": _NUM, "bound_theta": _NUM,
    "contraction_factor": _NUM, "pass": _BOOL, "details": {"type": "object"},
}, extra=False)

_DISTORTION = _obj({
    "N": _INT, "pair_count": _INT, "min_ratio": _NUM, "median_ratio": _NUM, "max_ratio": _NUM,
    "injective_flag": _BOOL, "threshold": _NUM,
}, {
    "l2_min_ratio": _NUM, "l2_median_ratio": _NUM, "l2_max_ratio": _NUM,
    "degenerate_pairs": _INT, "seed": _INT,
}, extra=False)

SCHEMAS: dict[str, dict] = {
    "shells": _obj({
        "L": _INT, "rho": _NUM, "n_min": _INT, "n_max": _INT,
        "passing_N": {"type": "array", "items": _INT},
        "certificates": {"type": "array", "items": _CERTIFICATE},
    }, {"selected_N": {"type": ["integer", "null"]}, "phi_source": {"type": ["string", "null"]}}),
    "dissipativity": _obj({
        "snapshots": _INT, "t_final": _NUM, "l2_max": _NUM, "h2_max": _NUM, "h2_final": _NUM,
        "empirical_q_star": _NUM, "envelope": {"type": ["object", "null"]},
        "violations": {"type": "array", "items": _NUM},
    }),
    "estimate": _obj({
        "N": _INT,
        "pairs": {"type": "object", "required": ["count", "C_median"]},
        "reports": {"type": "array", "items": _ESTIMATE},
    }, {
        "L": _INT,
        "bvp": {"anyOf": [_ESTIMATE, {"type": "null"}]},
        "t_doubling": {"type": ["object", "null"]},
        "smallness": {"type": ["object", "null"]},
        "averaging": {"type": ["object", "null"]},
        "coefficients": {"type": ["object", "null"]},
    }),
    "distortion": _obj({
        "stats": {"type": "array", "minItems": 1, "items": _DISTORTION},
        "monotone_in_N": _BOOL,
    }),
    "inertial_form": _obj({
        "N": _INT, "dimension": _INT, "sample_size": _INT, "injective": _BOOL,
        "track": {"anyOf": [_obj({"N": _INT, "T": _NUM, "max_error": _NUM, "final_error": _NUM,
                                  "extrapolated_evals": _INT}), {"type": "null"}]},
    }, {"one_step_error": _NUM, "neighbors": _INT}),
    "manifest": _obj({
        "package": {"type": "string"}, "version": {"type": "string"},
        "config_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "config": {"type": "object"},
        "stages": {"type": "array", "items": {"type": "string"}},
        "outputs": {"type": "array", "items": _obj({
            "path": {"type": "string"}, "sha256": {"type": "string"}, "bytes": _INT}, extra=False)},
    }, extra=False),
    "error": _obj({"stage": {"type": "string"}, "error_type": {"type": "string"},
                   "message": {"type": "string"}}, extra=False),
}

REPORT_FILES = {
    "shells": "shells.json",
    "dissipativity": "dissipativity.json",
    "estimate": "estimate.json",
    "distortion": "distortion.json",
    "inertial_form": "inertial_form.json",
}


def validate_report(kind: str, payload: Any) -> None:
    """Raise jsonschema.ValidationError if ``payload`` does not match schema ``kind``."""
    try:
        schema = SCHEMAS[kind]
    except KeyError:
        raise ValueError(f"unknown report kind {kind!r}; expected one of {sorted(SCHEMAS)}") from None
    Draft202012Validator(schema).validate(payload)
