"""Phase-space grid, distribution storage and quadrature.

Cells are centred: ``x[i] = x_min + (i + 1/2) dx``. Every integral in the
package (mass, moments, distances, marginals) uses the same midpoint rule
``sum(values) * dx * dp`` so that identities between them hold to roundoff.

Field values are stored with shape ``(nx, np_)``: axis 0 is position,
axis 1 is momentum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Literal

import numpy as np

from .errors import ConfigError, ContractError, DomainTooSmallError

TAIL_LIMIT = 1e-8
MASS_PRECONDITION = 1e-3


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PhaseSpaceGrid:
    nx: int
    np_: int
    x_min: float
    x_max: float
    p_min: float
    p_max: float

    def __post_init__(self):
        for name in ("nx", "np_"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
                raise ConfigError(f"{name} must be an integer, got {n!r}")
            if n < 8 or not _is_power_of_two(int(n)):
                raise ConfigError(f"{name}={n} must be a power of two >= 8")
        bounds = (self.x_min, self.x_max, self.p_min, self.p_max)
        if not all(math.isfinite(b) for b in bounds):
            raise ConfigError(f"grid bounds must be finite, got {bounds}")
        if not self.x_max > self.x_min:
            raise ConfigError(f"x_max={self.x_max} must exceed x_min={self.x_min}")
        if not self.p_max > self.p_min:
            raise ConfigError(f"p_max={self.p_max} must exceed p_min={self.p_min}")
        if not (self.dx > 0 and self.dp > 0 and math.isfinite(self.dx) and math.isfinite(self.dp)):
            raise ConfigError("grid spacing must be positive and finite")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.np_)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.np_

    @property
    def cell_area(self) -> float:
        return self.dx * self.dp

    @property
    def x(self) -> np.ndarray:
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def p(self) -> np.ndarray:
        return self.p_min + (np.arange(self.np_) + 0.5) * self.dp

    def refined(self, factor: int = 2) -> "PhaseSpaceGrid":
        """Same domain with ``factor`` times more points along both axes."""
        return PhaseSpaceGrid(self.nx * factor, self.np_ * factor,
                              self.x_min, self.x_max, self.p_min, self.p_max)


def make_grid(nx, np_, x_min, x_max, p_min, p_max) -> PhaseSpaceGrid:
    return PhaseSpaceGrid(int(nx) if float(nx).is_integer() else nx,
                          int(np_) if float(np_).is_integer() else np_,
                          float(x_min), float(x_max), float(p_min), float(p_max))


@dataclass
class WignerField:
    """A real distribution on a grid at a given model time.

    ``classical`` marks a Fokker-Planck density, which must stay
    (numerically) nonnegative; Wigner functions may go negative.
    """

    grid: PhaseSpaceGrid
    values: np.ndarray
    time: float = 0.0
    classical: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ContractError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")
        self.time = float(self.time)

    def copy(self) -> "WignerField":
        return WignerField(self.grid, self.values.copy(), self.time, self.classical)

    def with_values(self, values, time=None) -> "WignerField":
        return WignerField(self.grid, values, self.time if time is None else time, self.classical)

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def positivity_violation(self) -> float:
        """How far below the classical positivity floor the field dips (0 if not at all)."""
        scale = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        floor = -1e-9 * scale
        low = float(self.values.min())
        return max(0.0, floor - low)

    def __add__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, scalar):
        return self.with_values(self.values * float(scalar))

    __rmul__ = __mul__


def _same_grid(a: WignerField, b: WignerField) -> None:
    if a.grid != b.grid:
        raise ContractError(f"grid mismatch: {a.grid} vs {b.grid}")


@dataclass(frozen=True)
class GaussianSpec:
    x0: float
    p0: float
    sigma_x: float
    sigma_p: float
    minimum_uncertainty: bool = False
    hbar: float | None = dc_field(default=None, compare=False)

    def __post_init__(self):
        if not (self.sigma_x > 0 and self.sigma_p > 0):
            raise ConfigError(f"Gaussian widths must be positive, got {self.sigma_x}, {self.sigma_p}")
        if self.minimum_uncertainty:
            if self.hbar is None:
                raise ConfigError("a minimum-uncertainty Gaussian needs hbar to check sigma_x*sigma_p")
            if abs(self.sigma_x * self.sigma_p - self.hbar / 2) > 1e-12:
                raise ConfigError(
                    f"sigma_x*sigma_p = {self.sigma_x * self.sigma_p!r} is not hbar/2 = {self.hbar / 2!r}")

    @classmethod
    def coherent(cls, x0, p0, hbar, sigma_x=None):
        """Minimum-uncertainty state; ``sigma_x`` defaults to sqrt(hbar/2)."""
        sx = math.sqrt(hbar / 2) if sigma_x is None else float(sigma_x)
        return cls(float(x0), float(p0), sx, hbar / (2 * sx), True, hbar)


def _tail_mass(center, sigma, lo, hi):
    # Mass of a 1-D normal outside [lo, hi].
    s2 = sigma * math.sqrt(2.0)
    return 0.5 * math.erfc((hi - center) / s2) + 0.5 * math.erfc((center - lo) / s2)


def init_gaussian(grid: PhaseSpaceGrid, spec: GaussianSpec) -> WignerField:
    for axis, c, s, lo, hi in (("x", spec.x0, spec.sigma_x, grid.x_min, grid.x_max),
                               ("p", spec.p0, spec.sigma_p, grid.p_min, grid.p_max)):
        tail = _tail_mass(c, s, lo, hi)
        if tail >= TAIL_LIMIT:
            raise DomainTooSmallError(
                f"{axis} axis too small: Gaussian mass {tail:.3g} lies outside [{lo}, {hi}]")
    gx = np.exp(-((grid.x - spec.x0) ** 2) / (2 * spec.sigma_x**2))
    gp = np.exp(-((grid.p - spec.p0) ** 2) / (2 * spec.sigma_p**2))
    values = np.outer(gx, gp) / (2 * math.pi * spec.sigma_x * spec.sigma_p)
    values /= values.sum() * grid.cell_area
    return WignerField(grid, values, 0.0)


def mass(field: WignerField) -> float:
    return float(field.values.sum() * field.grid.cell_area)


def _check_normalized(field: WignerField) -> None:
    m = mass(field)
    if not abs(m - 1.0) <= MASS_PRECONDITION:
        raise ContractError(f"field mass {m!r} is not within {MASS_PRECONDITION} of 1")


def moment(field: WignerField, order_x: int, order_p: int) -> float:
    """Raw phase-space moment <x^a p^b>."""
    if order_x < 0 or order_p < 0:
        raise ContractError("moment orders must be nonnegative")
    _check_normalized(field)
    if order_x == 0 and order_p == 0:
        return mass(field)
    g = field.grid
    wx = g.x**order_x
    wp = g.p**order_p
    return float((wx @ field.values @ wp) * g.cell_area)


def marginal(field: WignerField, axis: Literal["position", "momentum"]) -> np.ndarray:
    """1-D density with the other coordinate integrated out."""
    g = field.grid
    if axis == "position":
        return field.values.sum(axis=1) * g.dp
    if axis == "momentum":
        return field.values.sum(axis=0) * g.dx
    raise ContractError(f"axis must be 'position' or 'momentum', got {axis!r}")


def mean_and_variance(field: WignerField) -> tuple[float, float, float, float]:
    """(<x>, <p>, Var x, Var p), computed from the marginals."""
    g = field.grid
    m = mass(field)
    rx = marginal(field, "position") * g.dx
    rp = marginal(field, "momentum") * g.dp
    mx = float(rx @ g.x) / m
    mp = float(rp @ g.p) / m
    vx = float(rx @ (g.x - mx) ** 2) / m
    vp = float(rp @ (g.p - mp) ** 2) / m
    return mx, mp, vx, vp
