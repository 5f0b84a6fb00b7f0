# -*- coding: utf-8 -*-
"""Exponential time stepping for d/dt Psi = (1 + i omega) Laplacian Psi + f(Psi, conj Psi)."""

from __future__ import annotations

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, Iterator

import numpy as np
from tqdm import tqdm

from cglhub._version import __version__
from cglhub.core.base import BaseIntegrator, BaseNonlinearity
from cglhub.core.exceptions import BlowUpError, GridError
from cglhub.core.logging import progress_enabled
from cglhub.core.registry import Integrator, Nonlinearity
from cglhub.spectral.grid import GridSpec, SpectralField, l2_norm
from cglhub.spectral.io import read_series, write_series
from cglhub.spectral.nonlinearity import nonlinear_term

logger = logging.getLogger(__name__)

_CONTOUR_POINTS = 32


def phi_functions(z: np.ndarray, contour_points: int = _CONTOUR_POINTS):
    """Return (e^z, phi1(z), phi2(z)) elementwise.

    phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2, both evaluated as the
    mean over a unit circle around z so that z -> 0 is harmless.
    """
    z = np.asarray(z, dtype=complex)
    r = np.exp(2j * np.pi * (np.arange(1, contour_points + 1) - 0.5) / contour_points)
    lr = z[..., None] + r
    e = np.exp(lr)
    phi1 = np.mean((e - 1.0) / lr, axis=-1)
    phi2 = np.mean((e - 1.0 - lr) / lr ** 2, axis=-1)
    return np.exp(z), phi1, phi2


class ETD1(BaseIntegrator):
    """Exponential Euler: u+ = e^{Lh} u + h phi1(Lh) N(u)."""

    name = "etd1"
    order = 1

    def stepper(self, linear, dt):
        E, p1, _ = phi_functions(linear * dt)
        a1 = dt * p1

        def step(u, rhs):
            return E * u + a1 * rhs(u)

        return step


class ETD2(BaseIntegrator):
    """Second-order exponential Runge-Kutta (Cox-Matthews ETD2RK)."""

    name = "etd2"
    order = 2

    def stepper(self, linear, dt):
        E, p1, p2 = phi_functions(linear * dt)
        a1 = dt * p1
        a2 = dt * p2

        def step(u, rhs):
            nu = rhs(u)
            a = E * u + a1 * nu
            return a + a2 * (rhs(a) - nu)

        return step


# ═══════════════════════════════════════════════════════════════════════════
#  PARAMETERS
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class DissipativityEnvelope:
    """Expected bound ||Psi(t)||_H2 <= q_scale ||Psi_0||_H2 e^{-alpha t} + q_star."""

    alpha: float
    q_star: float
    q_scale: float = 1.0


@dataclass(frozen=True)
class CGLParams:
    omega: float
    f_spec: BaseNonlinearity
    grid: GridSpec
    dt: float
    dissip: DissipativityEnvelope | None = None
    integrator: str = "etd2"
    save_every: float | None = None
    blowup_threshold: float = 1e8

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not math.isfinite(self.omega):
            raise ValueError(f"omega must be finite, got {self.omega}")
        if not isinstance(self.grid, GridSpec):
            raise GridError("grid must be a GridSpec")
        Integrator.get(self.integrator)
        if self.save_every is not None and self.save_every <= 0:
            raise ValueError(f"save_every must be positive, got {self.save_every}")
        f = self.f_spec
        if hasattr(f, "is_defocusing") and not f.is_defocusing(self.omega):
            logger.warning("omega*delta <= 0: H2 dissipativity of the cubic source is not guaranteed")

    def require_dispersion(self) -> "CGLParams":
        if self.omega == 0:
            raise ValueError("omega != 0 is required for projector experiments")
        return self

    @cached_property
    def linear_operator(self) -> np.ndarray:
        """Diagonal symbol -(1 + i omega) |k|^2 in FFT order."""
        return -(1.0 + 1j * self.omega) * self.grid.eigenvalues

    @cached_property
    def _steppers(self) -> dict:
        return {}

    def stepper(self, dt: float | None = None):
        dt = self.dt if dt is None else float(dt)
        if dt not in self._steppers:
            self._steppers[dt] = Integrator.create(self.integrator).stepper(self.linear_operator, dt)
        return self._steppers[dt]

    def rhs(self) -> Callable[[np.ndarray], np.ndarray]:
        grid, f = self.grid, self.f_spec
        return lambda c: nonlinear_term(grid, f, c)

    def replace(self, **changes) -> "CGLParams":
        return dataclasses.replace(self, **changes)

    def describe(self) -> dict[str, Any]:
        return {
            "omega": self.omega,
            "nonlinearity": self.f_spec.describe(),
            "M": self.grid.M,
            "dt": self.dt,
            "integrator": self.integrator,
            "save_every": self.save_every,
            "blowup_threshold": self.blowup_threshold,
            "dissip": dataclasses.asdict(self.dissip) if self.dissip else None,
        }

    @classmethod
    def from_description(cls, d: dict[str, Any]) -> "CGLParams":
        nl = d["nonlinearity"]
        cfg = {k: (complex(*v) if isinstance(v, list) else v)
               for k, v in nl.get("config", {}).items() if k != "name"}
        f = Nonlinearity.create(nl["name"], **cfg)
        dissip = DissipativityEnvelope(**d["dissip"]) if d.get("dissip") else None
        return cls(omega=d["omega"], f_spec=f, grid=GridSpec(d["M"]), dt=d["dt"],
                   dissip=dissip, integrator=d.get("integrator", "etd2"),
                   save_every=d.get("save_every"),
                   blowup_threshold=d.get("blowup_threshold", 1e8))

    @classmethod
    def from_config(cls, cfg) -> "CGLParams":
        """Build from a RunConfig."""
        if cfg.nonlinearity == "cubic_cgl":
            f = Nonlinearity.create("cubic_cgl", beta=cfg.beta, delta=cfg.delta)
        elif cfg.nonlinearity == "linear":
            f = Nonlinearity.create("linear", coeff=cfg.complex_linear_coeff)
        else:
            f = Nonlinearity.create(cfg.nonlinearity)
        dissip = DissipativityEnvelope(cfg.alpha, cfg.q_star, cfg.q_scale) if cfg.alpha > 0 else None
        return cls(omega=cfg.omega, f_spec=f, grid=GridSpec(cfg.grid), dt=cfg.dt,
                   dissip=dissip, integrator=cfg.integrator, save_every=cfg.save_every,
                   blowup_threshold=cfg.blowup_threshold)


# ═══════════════════════════════════════════════════════════════════════════
#  TRAJECTORIES
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True, eq=False)
class Trajectory:
    params: CGLParams
    times: np.ndarray
    states: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        times = np.array(self.times, dtype=float, copy=True).reshape(-1)
        states = np.array(self.states, dtype=np.complex128, copy=True)
        if states.shape != (len(times),) + self.params.grid.shape:
            raise GridError(f"states shape {states.shape} does not match {len(times)} snapshots "
                            f"on M={self.params.grid.M}")
        if len(times) > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        times.setflags(write=False)
        states.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return len(self.times)

    def field(self, i: int) -> SpectralField:
        return SpectralField(self.params.grid, self.states[i])

    def fields(self) -> Iterator[SpectralField]:
        for i in range(len(self)):
            yield self.field(i)

    @property
    def final(self) -> SpectralField:
        return self.field(-1)

    def select(self, mask) -> "Trajectory":
        return Trajectory(self.params, self.times[mask], self.states[mask], dict(self.provenance))

    def last(self, duration: float) -> "Trajectory":
        """Snapshots within ``duration`` of the final time."""
        return self.select(self.times >= self.times[-1] - duration - 1e-12)

    def reindexed(self) -> "Trajectory":
        """Same states with times shifted so the final time is 0."""
        return Trajectory(self.params, self.times - self.times[-1], self.states, dict(self.provenance))

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        write_series(path, self.params.grid, self.times, self.states)
        sidecar = {"params": self.params.describe(), "provenance": self.provenance}
        Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True, default=str))
        return path

    @classmethod
    def load(cls, path: str | Path) -> "Trajectory":
        path = Path(path)
        grid, times, states = read_series(path)
        meta = json.loads(Path(str(path) + ".json").read_text())
        params = CGLParams.from_description(meta["params"])
        if params.grid != grid:
            raise GridError(f"{path}: sidecar grid M={params.grid.M} differs from file M={grid.M}")
        return cls(params, times, states, meta.get("provenance", {}))


# ═══════════════════════════════════════════════════════════════════════════
#  STEPPING
# ═══════════════════════════════════════════════════════════════════════════

def _guard(coeffs: np.ndarray, params: CGLParams, t: float, last_good: np.ndarray) -> None:
    if not np.all(np.isfinite(coeffs)):
        raise BlowUpError(t, "non-finite state", state=SpectralField(params.grid, last_good))
    if l2_norm(coeffs) > params.blowup_threshold:
        raise BlowUpError(t, f"L2 norm above {params.blowup_threshold:g}",
                          state=SpectralField(params.grid, last_good))


def step(state: SpectralField, params: CGLParams, dt: float | None = None) -> SpectralField:
    """Advance one step; the linear part is propagated exactly."""
    if state.grid != params.grid:
        raise GridError("state and params live on different grids")
    if not state.is_finite():
        raise BlowUpError(float("nan"), "non-finite input state")
    out = params.stepper(dt)(state.coeffs, params.rhs())
    _guard(out, params, float("nan"), state.coeffs)
    return state.replace(out)


def simulate(params: CGLParams, psi0: SpectralField, T: float,
             seed: int | None = None, label: str = "simulate") -> Trajectory:
    """Integrate from psi0 over [0, T], storing snapshots every ``params.save_every``.

    The initial and final states are always stored. A final partial step is
    taken when T is not a multiple of dt.

    Raises:
        BlowUpError: carrying the offending time and the last finite state.
    """
    if T < 0:
        raise ValueError(f"T must be non-negative, got {T}")
    if psi0.grid != params.grid:
        raise GridError("psi0 and params live on different grids")
    dt = params.dt
    n_full = int(math.floor(T / dt + 1e-9))
    remainder = T - n_full * dt
    if remainder < 1e-9 * dt:
        remainder = 0.0
    stride = max(1, int(round(params.save_every / dt))) if params.save_every else 1

    provenance = {"seed": seed, "integrator": params.integrator, "version": __version__, "T": T}
    times = [0.0]
    states = [psi0.coeffs.copy()]
    if T == 0:
        return Trajectory(params, times, states, provenance)

    advance = params.stepper()
    rhs = params.rhs()
    u = psi0.coeffs.copy()
    _guard(u, params, 0.0, u)
    for i in tqdm(range(1, n_full + 1), desc=label, disable=not progress_enabled(), leave=False):
        t = i * dt
        try:
            nxt = advance(u, rhs)
        except BlowUpError as e:
            raise BlowUpError(t, str(e), state=SpectralField(params.grid, u)) from e
        _guard(nxt, params, t, u)
        u = nxt
        if i % stride == 0 or (i == n_full and remainder == 0.0):
            times.append(t)
            states.append(u.copy())
    if remainder > 0.0:
        try:
            nxt = params.stepper(remainder)(u, rhs)
        except BlowUpError as e:
            raise BlowUpError(T, str(e), state=SpectralField(params.grid, u)) from e
        _guard(nxt, params, T, u)
        u = nxt
        times.append(float(T))
        states.append(u.copy())
    logger.debug("%s: %d steps, %d snapshots", label, n_full + (remainder > 0), len(times))
    return Trajectory(params, times, np.stack(states), provenance)
