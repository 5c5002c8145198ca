"""Run configuration for the command-line front end."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import ConfigError


@dataclass
class RunConfig:
    command: str
    group: str | None = None
    r: Fraction | None = None
    scale: Fraction | None = None
    window: Fraction | None = None
    colors: int | None = None
    out: str | None = None
    seed: int = 0
    budget_balls: int | None = None
    budget_search: int | None = None

    def validate(self) -> "RunConfig":
        for name in ("r", "scale", "window"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ConfigError(f"--{name} must be nonnegative")
        if self.scale is not None and self.scale == 0:
            raise ConfigError("--scale must be positive")
        if self.window is not None and self.window == 0:
            raise ConfigError("--window must be positive")
        for name in ("budget_balls", "budget_search", "colors"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"--{name.replace('_', '-')} must be positive")
        return self

    def to_dict(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in asdict(self).items()}
