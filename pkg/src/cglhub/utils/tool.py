# -*- coding: utf-8 -*-
"""Report writers, hashing and the run manifest."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from cglhub._version import __version__

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"
ERROR_FILE = "error.json"

# run-environment fields that never change results
_HASH_EXCLUDE = {"threads", "out_dir"}


# ═══════════════════════════════════════════════════════════════════════════
#  JSON
# ═══════════════════════════════════════════════════════════════════════════

def jsonable(obj: Any) -> Any:
    """Plain JSON types; non-finite reals become None and complex becomes [re, im]."""
    if hasattr(obj, "to_dict") and callable(obj.to_dict):
        return jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path: str | Path, data: Any, kind: str | None = None) -> Path:
    """Write sorted-key JSON; when ``kind`` names a report schema it is validated first.

    Raises:
        jsonschema.ValidationError: the payload does not match its schema.
    """
    from .schemas import validate_report

    path = Path(path)
    payload = jsonable(data)
    if kind is not None:
        validate_report(kind, payload)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n")
    return path


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


# ═══════════════════════════════════════════════════════════════════════════
#  HASHES AND MANIFEST
# ═══════════════════════════════════════════════════════════════════════════

def file_sha256(path: str | Path, chunk: int = 1 << 20) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(chunk), b""):
            h.update(block)
    return h.hexdigest()


def hashed_config(cfg) -> dict:
    """Config fields that determine the numbers (run-environment fields removed)."""
    data = cfg.to_dict() if hasattr(cfg, "to_dict") else dict(cfg)
    return {k: v for k, v in data.items() if k not in _HASH_EXCLUDE}


def config_hash(cfg) -> str:
    text = json.dumps(jsonable(hashed_config(cfg)), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def write_run_manifest(run_dir: str | Path, cfg, outputs: Iterable[str | Path],
                       stages: Sequence[str]) -> Path:
    """Write ``manifest.json``: version, config hash and the sha256 of every output.

    Paths are stored relative to ``run_dir`` and sorted; no timestamps are
    recorded so identical runs give identical manifests.
    """
    run_dir = Path(run_dir)
    entries = []
    for p in sorted({Path(p).resolve() for p in outputs}):
        entries.append({
            "path": p.relative_to(run_dir.resolve()).as_posix(),
            "sha256": file_sha256(p),
            "bytes": p.stat().st_size,
        })
    manifest = {
        "package": "cglhub",
        "version": __version__,
        "config_hash": config_hash(cfg),
        "config": hashed_config(cfg),
        "stages": list(stages),
        "outputs": entries,
    }
    path = write_json(run_dir / MANIFEST_FILE, manifest, kind="manifest")
    logger.info("manifest written with %d output(s)", len(entries))
    return path


def write_error(run_dir: str | Path, stage: str, error: BaseException | str, message: str | None = None) -> dict:
    """Record a failed stage as ``error.json``; returns the payload.

    ``error`` is the exception itself or, with ``message``, its type name.
    """
    if isinstance(error, BaseException):
        error, message = type(error).__name__, str(error)
    payload = {"stage": stage, "error_type": str(error), "message": message or ""}
    try:
        write_json(Path(run_dir) / ERROR_FILE, payload, kind="error")
    except OSError as werr:
        logger.warning("could not write %s: %s", ERROR_FILE, werr)
    return payload
