from dataclasses import dataclass, field, fields
from typing import Any, Callable, Optional
import math

from cglhub import _env

# ---------------------------------------------------------------------------
# Nonlinearity configurations
# ---------------------------------------------------------------------------
@dataclass
class CubicCGL_Config:
    '''
    Coefficients of the cubic Ginzburg-Landau source
    f = (1 + i beta) Psi - (1 + i delta) Psi |Psi|^2.
    '''
    name: str = "CubicCGL_Config"
    beta: float = 0.5
    delta: float = 1.0


@dataclass
class Linear_Config:
    name: str = "Linear_Config"
    coeff: complex = -1.0 + 0j


@dataclass
class Pointwise_Config:
    '''
    A user-supplied map f(Psi) on complex samples. Derivatives are optional;
    when absent they are approximated by central differences of size ``step``.
    '''
    name: str = "Pointwise_Config"
    func: Optional[Callable] = None
    d_psi: Optional[Callable] = None
    d_psibar: Optional[Callable] = None
    step: float = 1e-6


# ---------------------------------------------------------------------------
# Run configuration
# ---------------------------------------------------------------------------
@dataclass
class RunConfig:
    '''
    Every tunable of a cglhub run. Field names double as TOML keys and as
    ``--KEY VALUE`` CLI overrides.
    '''
    name: str = "RunConfig"

    # equation and solver
    omega: float = 1.0
    beta: float = 0.5
    delta: float = 1.0
    nonlinearity: str = "cubic_cgl"
    linear_coeff: float = -1.0
    linear_coeff_imag: float = 0.0
    grid: int = 16
    dt: float = 0.01
    T: float = 10.0
    save_every: float = 0.5
    integrator: str = "etd2"
    amplitude: float = 1.0
    blowup_threshold: float = 1e8

    # dissipativity envelope: alpha = 0 disables the check
    alpha: float = 0.0
    q_star: float = 0.0
    q_scale: float = 1.0

    # spectral bands and shell certificates
    N: int = 5
    L: int = 2
    rho: float = 1.5
    eps: float = 0.05
    shell_range: str = "3:60"

    # attractor sampling
    burn_in: float = 50.0
    count: int = 200
    spacing: float = 1.0
    seeds: int = 4
    pair_count: int = 20
    pair_window: float = 10.0
    pair_eps: float = 1e-3

    # backward estimates
    window: float = 10.0
    window_dt: float = 0.1
    bvp_tol: float = 1e-10
    bvp_max_iter: int = 50
    theta_tol: float = 0.05
    splitting: str = "averaged"

    # projector checks and inertial form
    mane_N: str = ""
    neighbors: int = 8
    injectivity_threshold: float = 1e-3
    max_pairs: int = 20000
    track_T: float = 5.0

    # run
    seed: int = 0
    threads: int = field(default_factory=lambda: int(_env["cpu"]))
    out_dir: str = "cgl_run"

    # ------------------------------------------------------------------ #

    @property
    def shell_bounds(self) -> tuple[int, int]:
        lo, _, hi = self.shell_range.partition(":")
        return int(lo), int(hi)

    @property
    def mane_N_values(self) -> list[int]:
        if not self.mane_N.strip():
            return [self.N]
        return [int(v) for v in self.mane_N.replace(" ", "").split(",") if v]

    @property
    def complex_linear_coeff(self) -> complex:
        return complex(self.linear_coeff, self.linear_coeff_imag)

    def validate(self) -> list[str]:
        """Return every violation found; an empty list means the config is usable."""
        from cglhub.core.registry import Integrator, Nonlinearity
        import cglhub.dynamics  # noqa: F401  registers integrators
        import cglhub.spectral  # noqa: F401  registers nonlinearities

        errs: list[str] = []

        def need(cond: bool, msg: str):
            if not cond:
                errs.append(msg)

        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                errs.append(f"{f.name} must be finite, got {v}")

        need(self.nonlinearity in Nonlinearity.available() and self.nonlinearity != "pointwise",
             f"nonlinearity must be one of cubic_cgl, linear, zero; got '{self.nonlinearity}'")
        need(self.integrator in Integrator.available(),
             f"integrator must be one of {Integrator.available()}; got '{self.integrator}'")
        need(self.grid >= 4 and self.grid % 2 == 0, f"grid must be an even integer >= 4, got {self.grid}")
        need(self.dt > 0, f"dt must be > 0, got {self.dt}")
        need(self.T >= 0, f"T must be >= 0, got {self.T}")
        need(self.save_every > 0, f"save_every must be > 0, got {self.save_every}")
        need(self.amplitude >= 0, f"amplitude must be >= 0, got {self.amplitude}")
        need(self.blowup_threshold > 0, f"blowup_threshold must be > 0, got {self.blowup_threshold}")
        need(self.alpha >= 0, f"alpha must be >= 0, got {self.alpha}")
        need(self.q_star >= 0, f"q_star must be >= 0, got {self.q_star}")
        need(self.q_scale > 0, f"q_scale must be > 0, got {self.q_scale}")

        need(0 < self.L < self.N, f"need 0 < L < N, got N={self.N}, L={self.L}")
        need(self.rho > 0, f"rho must be > 0, got {self.rho}")
        need(self.eps > 0, f"eps must be > 0, got {self.eps}")
        try:
            lo, hi = self.shell_bounds
            need(lo > self.L and hi >= lo, f"shell_range '{self.shell_range}' needs L < a <= b")
        except ValueError:
            errs.append(f"shell_range must look like 'a:b', got '{self.shell_range}'")

        need(self.burn_in >= 0, f"burn_in must be >= 0, got {self.burn_in}")
        need(self.count >= 1, f"count must be >= 1, got {self.count}")
        need(self.spacing > 0, f"spacing must be > 0, got {self.spacing}")
        need(self.seeds >= 1, f"seeds must be >= 1, got {self.seeds}")
        need(self.pair_count >= 0, f"pair_count must be >= 0, got {self.pair_count}")
        need(self.pair_window > 0, f"pair_window must be > 0, got {self.pair_window}")
        need(self.pair_eps > 0, f"pair_eps must be > 0, got {self.pair_eps}")

        need(self.window > 0, f"window must be > 0, got {self.window}")
        need(self.window_dt > 0, f"window_dt must be > 0, got {self.window_dt}")
        need(self.bvp_tol > 0, f"bvp_tol must be > 0, got {self.bvp_tol}")
        need(self.bvp_max_iter >= 1, f"bvp_max_iter must be >= 1, got {self.bvp_max_iter}")
        need(self.theta_tol >= 0, f"theta_tol must be >= 0, got {self.theta_tol}")
        need(self.splitting in ("diagonal", "averaged"),
             f"splitting must be 'diagonal' or 'averaged', got '{self.splitting}'")

        try:
            need(all(n > 0 for n in self.mane_N_values), f"mane_N entries must be positive, got '{self.mane_N}'")
        except ValueError:
            errs.append(f"mane_N must be a comma separated list of integers, got '{self.mane_N}'")
        need(self.neighbors >= 1, f"neighbors must be >= 1, got {self.neighbors}")
        need(0 < self.injectivity_threshold < 1,
             f"injectivity_threshold must lie in (0, 1), got {self.injectivity_threshold}")
        need(self.max_pairs >= 1, f"max_pairs must be >= 1, got {self.max_pairs}")
        need(self.track_T >= 0, f"track_T must be >= 0, got {self.track_T}")

        need(self.seed >= 0, f"seed must be >= 0, got {self.seed}")
        need(self.threads >= 1, f"threads must be >= 1, got {self.threads}")
        need(bool(str(self.out_dir).strip()), "out_dir must not be empty")
        return errs

    def check(self) -> "RunConfig":
        from cglhub.core.exceptions import ConfigError
        errs = self.validate()
        if errs:
            raise ConfigError(errs)
        return self

    def to_dict(self) -> dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}
