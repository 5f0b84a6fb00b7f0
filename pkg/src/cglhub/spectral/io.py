# -*- coding: utf-8 -*-
"""CGLF binary snapshots.

Layout (little endian): magic b"CGLF", version u32, M u32, count u64, then
``count`` complex64 coefficients in lexicographic (k1, k2, k3) order with
k_i = -M/2 .. M/2-1. Version 2 appends a time index after the header: u64
snapshot count S, S float64 times, then S coefficient blocks.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from cglhub.core.exceptions import GridError
from .grid import GridSpec, SpectralField

MAGIC = b"CGLF"
FIELD_VERSION = 1
SERIES_VERSION = 2
_HEADER = struct.Struct("<4sIIQ")
_COUNT = struct.Struct("<Q")


def _pack(grid: GridSpec, coeffs: np.ndarray) -> bytes:
    return grid.lexicographic(coeffs).astype("<c8").tobytes()


def write_field(path: str | Path, field: SpectralField) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = field.grid
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FIELD_VERSION, grid.M, grid.M ** 3))
        fh.write(_pack(grid, field.coeffs))
    return path


def _read_header(fh, path) -> tuple[int, GridSpec, int]:
    raw = fh.read(_HEADER.size)
    if len(raw) != _HEADER.size:
        raise GridError(f"{path}: truncated header")
    magic, version, M, count = _HEADER.unpack(raw)
    if magic != MAGIC:
        raise GridError(f"{path}: not a CGLF file (magic {magic!r})")
    grid = GridSpec(int(M))
    if count != grid.M ** 3:
        raise GridError(f"{path}: count {count} does not match M={M}")
    return version, grid, int(count)


def _read_block(fh, grid: GridSpec, count: int, path) -> np.ndarray:
    raw = fh.read(count * 8)
    if len(raw) != count * 8:
        raise GridError(f"{path}: truncated coefficient block")
    block = np.frombuffer(raw, dtype="<c8").reshape(grid.shape)
    return grid.from_lexicographic(block.astype(np.complex128))


def read_field(path: str | Path) -> SpectralField:
    path = Path(path)
    with open(path, "rb") as fh:
        version, grid, count = _read_header(fh, path)
        if version != FIELD_VERSION:
            raise GridError(f"{path}: expected a single field (version 1), got version {version}")
        return SpectralField(grid, _read_block(fh, grid, count, path))


def write_series(path: str | Path, grid: GridSpec, times, states: np.ndarray) -> Path:
    """Write a time-indexed stack of coefficient arrays (shape (S, M, M, M))."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    times = np.asarray(times, dtype="<f8")
    states = np.asarray(states)
    if states.shape != (len(times),) + grid.shape:
        raise GridError(f"states shape {states.shape} does not match {len(times)} snapshots on M={grid.M}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, SERIES_VERSION, grid.M, grid.M ** 3))
        fh.write(_COUNT.pack(len(times)))
        fh.write(times.tobytes())
        for state in states:
            fh.write(_pack(grid, state))
    return path


def read_series(path: str | Path) -> tuple[GridSpec, np.ndarray, np.ndarray]:
    """Return (grid, times, states) from a version 2 file."""
    path = Path(path)
    with open(path, "rb") as fh:
        version, grid, count = _read_header(fh, path)
        if version != SERIES_VERSION:
            raise GridError(f"{path}: expected a time series (version 2), got version {version}")
        (S,) = _COUNT.unpack(fh.read(_COUNT.size))
        times = np.frombuffer(fh.read(8 * S), dtype="<f8").astype(float)
        if len(times) != S:
            raise GridError(f"{path}: truncated time index")
        states = np.stack([_read_block(fh, grid, count, path) for _ in range(S)]) if S else \
            np.zeros((0,) + grid.shape, complex)
    return grid, times, states
