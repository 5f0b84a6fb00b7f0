from abc import ABC, abstractmethod
from dataclasses import asdict, is_dataclass, replace
from typing import Any, Callable, Optional, Type

import numpy as np


class BaseNonlinearity(ABC):
    """Abstract base class for pointwise nonlinearities f(Psi, conj(Psi)).

    Subclasses must define a unique ``name`` class attribute. Upon subclass
    definition the class is registered in the global ``Nonlinearity``
    registry.

    All methods act on physical-space samples (complex ndarrays of any
    shape) and return arrays of the same shape.

    Attributes:
        name (str): Registry key.
        default_config (Optional[Type]): Dataclass instantiated with defaults
            when no config is passed to ``__init__``.
        linear (bool): True when f is complex-linear in Psi.

    Example:
        >>> f = Nonlinearity.create("cubic_cgl", beta=0.5, delta=1.0)
        >>> f.evaluate(np.ones(4, complex))
    """

    name: str
    default_config: Optional[Type] = None
    linear: bool = False

    def __init__(self, config=None, **overrides):
        if config is None and self.default_config:
            config = self.default_config()
        if overrides:
            if not is_dataclass(config):
                raise ValueError(f"{type(self).__name__} takes no configuration fields")
            config = replace(config, **overrides)
        self.config = config

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        from .registry import Nonlinearity
        if getattr(cls, "name", None):
            Nonlinearity.register(cls)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.config!r})"

    # ------------------------------------------------------------------ #
    #  Abstract interface                                                #
    # ------------------------------------------------------------------ #

    @abstractmethod
    def evaluate(self, psi: np.ndarray) -> np.ndarray:
        """Pointwise f(psi, conj(psi))."""

    @abstractmethod
    def d_psi(self, psi: np.ndarray) -> np.ndarray:
        """Wirtinger derivative df/dPsi at psi."""

    @abstractmethod
    def d_psibar(self, psi: np.ndarray) -> np.ndarray:
        """Wirtinger derivative df/dconj(Psi) at psi."""

    def describe(self) -> dict[str, Any]:
        """JSON-friendly description used in sidecars and manifests."""
        cfg = asdict(self.config) if is_dataclass(self.config) else {}
        cfg = {k: ([v.real, v.imag] if isinstance(v, complex) else v)
               for k, v in cfg.items() if not callable(v)}
        return {"name": self.name, "config": cfg}


class BaseIntegrator(ABC):
    """Abstract base class for exponential time integrators.

    The problem is u' = L u + N(u) with L diagonal. ``stepper`` precomputes
    everything that depends on (L, dt) and returns a callable advancing one
    step; the linear part must be propagated exactly.
    """

    name: str
    order: int
    default_config: Optional[Type] = None

    def __init__(self, config=None):
        if config is None and self.default_config:
            config = self.default_config()
        self.config = config

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        from .registry import Integrator
        if getattr(cls, "name", None):
            Integrator.register(cls)

    @abstractmethod
    def stepper(
        self, linear: np.ndarray, dt: float
    ) -> Callable[[np.ndarray, Callable[[np.ndarray], np.ndarray]], np.ndarray]:
        """Return ``step(u, rhs) -> u_next`` for the diagonal operator ``linear``."""
