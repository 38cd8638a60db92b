"""Driven quartic double well.

    H = p^2/2m + B x^4 - A x^2 + Lambda x cos(omega t)

The drive enters with a plus sign; some references write -Lambda.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class SystemParams:
    m: float
    A: float
    B: float
    lambda_: float
    omega: float
    hbar: float

    def __post_init__(self):
        for name in ("m", "A", "B", "lambda_", "omega", "hbar"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{name} must be a finite number, got {v!r}")
        if self.m <= 0:
            raise ConfigError(f"m must be positive, got {self.m}")
        if self.omega <= 0:
            raise ConfigError(f"omega must be positive, got {self.omega}")
        if self.hbar <= 0:
            raise ConfigError(f"hbar must be positive, got {self.hbar}")
        if self.B < 0:
            raise ConfigError(f"B must be nonnegative, got {self.B}")

    def warn_if_unbounded(self) -> None:
        """Production runs call this; B = 0 is only meant for test presets."""
        if self.B == 0:
            msg = "B = 0: quartic confinement disabled"
            if self.A > 0:
                msg += " and the potential is unbounded below"
            warnings.warn(msg, stacklevel=2)


@dataclass(frozen=True)
class DiffusionSpec:
    """Momentum diffusion strength, given directly or as D = 2 gamma M kT."""

    D: float | None = None
    gamma: float | None = None
    mass_env: float | None = None
    kbt: float | None = None

    def __post_init__(self):
        derived = (self.gamma, self.mass_env, self.kbt)
        if self.D is not None:
            if any(v is not None for v in derived):
                raise ConfigError("give either D or (gamma, mass_env, kbt), not both")
            if not (math.isfinite(self.D) and self.D >= 0):
                raise ConfigError(f"D must be finite and nonnegative, got {self.D}")
        else:
            if any(v is None for v in derived):
                raise ConfigError("diffusion needs D or all of gamma, mass_env, kbt")
            for name, v in zip(("gamma", "mass_env", "kbt"), derived):
                if not (math.isfinite(v) and v > 0):
                    raise ConfigError(f"{name} must be positive, got {v}")

    @property
    def value(self) -> float:
        if self.D is not None:
            return float(self.D)
        return 2.0 * self.gamma * self.mass_env * self.kbt


def potential(x, t, params: SystemParams):
    x = np.asarray(x, dtype=float)
    x2 = x * x
    return params.B * x2 * x2 - params.A * x2 + params.lambda_ * x * np.cos(params.omega * t)


def force_gradient(x, t, params: SystemParams):
    """dV/dx (the force is its negative)."""
    x = np.asarray(x, dtype=float)
    return 4 * params.B * x * x * x - 2 * params.A * x + params.lambda_ * np.cos(params.omega * t)


def third_derivative(x, params: SystemParams):
    return 24 * params.B * np.asarray(x, dtype=float)


def driving_period(params: SystemParams) -> float:
    return 2 * math.pi / params.omega
