import dataclasses
from copy import deepcopy


class Registry:
    def __init__(self, kind: str = "component"):
        self.kind = kind
        self._registry = {}

    def register(self, cls):
        self._registry[cls.name] = cls
        return cls

    def get(self, name):
        if name not in self._registry:
            raise ValueError(f"{self.kind} '{name}' not registered; available: {self.available()}")
        return self._registry[name]

    def create(self, name, config=None, **overrides):
        cls = self.get(name)

        if config is not None:
            final_config = deepcopy(config)
        elif getattr(cls, "default_config", None) is not None:
            final_config = cls.default_config()
        else:
            final_config = None

        if overrides:
            if dataclasses.is_dataclass(final_config):
                try:
                    final_config = dataclasses.replace(final_config, **overrides)
                except TypeError as e:
                    raise ValueError(f"Invalid override parameters: {e}")
            elif isinstance(final_config, dict):
                final_config.update(overrides)
            else:
                raise AttributeError(f"'{cls.__name__}' takes no configuration fields: {sorted(overrides)}")
        return cls(final_config)

    def available(self):
        return list(self._registry.keys())


Nonlinearity = Registry("nonlinearity")
Integrator = Registry("integrator")
