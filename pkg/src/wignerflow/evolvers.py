"""Strang-split spectral propagation of Wigner and Fokker-Planck densities.

One step of length dt is

    half kinetic shear  ->  full momentum-space step  ->  half kinetic shear

The kinetic shear f(x, p) -> f(x - p dt / 2m, p) is applied exactly in the
x-transform. The momentum-space step multiplies the p-transform by

    exp(dt * K(x, lam, t_mid) - D lam^2 dt)

where K is the Moyal kernel (i/hbar)[V(x + hbar lam/2) - V(x - hbar lam/2)]
(quantum) or i lam dV/dx (classical), with the drive evaluated at the step
midpoint. Transforms use f~(lam) = sum_p f(p) exp(-i lam p) dp. None of the
three factors touches the zero frequency, so mass is conserved to roundoff.
Boundaries are periodic; mass reaching the outer frame is an error.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Literal

import numpy as np
import scipy.fft as sfft

from . import _kernels
from .diagnostics import DiagnosticsRecorder, RunDiagnostics
from .dynamics import DiffusionSpec, SystemParams, driving_period, force_gradient
from .errors import ConfigError, ContractError, DomainOverflowError, InstabilityError
from .phase_space import MASS_PRECONDITION, PhaseSpaceGrid, WignerField, mass

BOUNDARY_FRAME = 2
MIN_STEPS_PER_PERIOD = 64

_fft_workers = 1


def set_fft_workers(n: int) -> None:
    """Threads for row/column transforms; results do not depend on it."""
    global _fft_workers
    _fft_workers = max(1, int(n))


@dataclass(frozen=True)
class EvolverConfig:
    mode: Literal["quantum", "classical"]
    params: SystemParams
    diffusion: DiffusionSpec
    dt: float
    boundary_mass_limit: float = 1e-6

    def __post_init__(self):
        if self.mode not in ("quantum", "classical"):
            raise ConfigError(f"mode must be 'quantum' or 'classical', got {self.mode!r}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not self.boundary_mass_limit > 0:
            raise ConfigError("boundary_mass_limit must be positive")
        period = driving_period(self.params)
        if self.dt > period / MIN_STEPS_PER_PERIOD * (1 + 1e-12):
            warnings.warn(f"dt={self.dt:.4g} gives fewer than {MIN_STEPS_PER_PERIOD} steps per "
                          f"driving period ({period:.4g})", stacklevel=2)

    @property
    def D(self) -> float:
        return self.diffusion.value

    @property
    def quantum(self) -> bool:
        return self.mode == "quantum"

    def replace(self, **changes) -> "EvolverConfig":
        from dataclasses import replace
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return replace(self, **changes)


@dataclass(frozen=True)
class StepReport:
    time_after: float
    mass_drift: float
    boundary_mass: float
    min_value: float


def quantum_kernel(x, lambda_var, t_mid, params: SystemParams):
    """(i/hbar)[V(x + hbar lam/2, t) - V(x - hbar lam/2, t)].

    Evaluated through the exact odd part of the quartic,
    V(x+h) - V(x-h) = 2h [4Bx(x^2 + h^2) - 2Ax + Lambda cos(wt)],
    which avoids cancellation between two large potential values.
    """
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lambda_var, dtype=float)
    h = 0.5 * params.hbar * lam
    rate = 4 * params.B * x * (x * x + h * h) - 2 * params.A * x \
        + params.lambda_ * np.cos(params.omega * t_mid)
    return 1j * lam * rate


def classical_kernel(x, lambda_var, t_mid, params: SystemParams):
    """i lam dV/dx: the Moyal kernel with every hbar correction dropped."""
    lam = np.asarray(lambda_var, dtype=float)
    return 1j * lam * force_gradient(x, t_mid, params)


class Propagator:
    """Precomputed transforms and phase tables for one (grid, config) pair."""

    def __init__(self, grid: PhaseSpaceGrid, config: EvolverConfig):
        self.grid = grid
        self.config = config
        self.x = grid.x
        self.p = grid.p
        theta = 2 * np.pi * sfft.rfftfreq(grid.nx, grid.dx)
        self.lam = 2 * np.pi * sfft.rfftfreq(grid.np_, grid.dp)
        m = config.params.m
        self._shear_half = np.exp(-1j * np.outer(theta, self.p) * (0.5 * config.dt / m))
        self._half_hbar = 0.5 * config.params.hbar if config.quantum else 0.0

    def _kinetic(self, f):
        g = self.grid
        F = sfft.rfft(f, axis=0, workers=_fft_workers)
        F *= self._shear_half
        return sfft.irfft(F, n=g.nx, axis=0, workers=_fft_workers)

    def _momentum(self, f, t_mid):
        g = self.grid
        P = self.config.params
        G = sfft.rfft(f, axis=1, workers=_fft_workers)
        drive = P.lambda_ * math.cos(P.omega * t_mid)
        _kernels.apply_momentum_step(G, self.x, self.lam, self._half_hbar, P.B, P.A,
                                     drive, self.config.D, self.config.dt)
        return sfft.irfft(G, n=g.np_, axis=1, workers=_fft_workers)

    def advance(self, values: np.ndarray, t_start: float) -> np.ndarray:
        dt = self.config.dt
        f = self._kinetic(values)
        _check_finite(f, "first kinetic", t_start)
        f = self._momentum(f, t_start + 0.5 * dt)
        _check_finite(f, "momentum", t_start)
        f = self._kinetic(f)
        _check_finite(f, "second kinetic", t_start)
        return f

    def step(self, field: WignerField, t_start: float | None = None,
             t_after: float | None = None) -> tuple[WignerField, StepReport]:
        t0 = field.time if t_start is None else t_start
        m0 = mass(field)
        values = self.advance(field.values, t0)
        t1 = t0 + self.config.dt if t_after is None else t_after
        new = WignerField(self.grid, values, t1, field.classical or not self.config.quantum)
        m1 = mass(new)
        edge = _kernels.boundary_mass(values, BOUNDARY_FRAME) * self.grid.cell_area
        report = StepReport(t1, m1 - m0, edge, float(values.min()))
        if edge > self.config.boundary_mass_limit:
            raise DomainOverflowError(
                f"boundary mass {edge:.3g} exceeds limit {self.config.boundary_mass_limit:.3g} "
                f"at t={t1:.6g}; enlarge the grid")
        return new, report


def _check_finite(values, substep, t):
    if not np.isfinite(values).all():
        raise InstabilityError(substep, t)


@functools.lru_cache(maxsize=8)
def _propagator(grid: PhaseSpaceGrid, config: EvolverConfig) -> Propagator:
    return Propagator(grid, config)


def _check_mass(field: WignerField) -> None:
    m = mass(field)
    if not abs(m - 1.0) <= MASS_PRECONDITION:
        raise ContractError(f"field mass {m!r} is not within {MASS_PRECONDITION} of 1")


def step(field: WignerField, config: EvolverConfig) -> tuple[WignerField, StepReport]:
    _check_mass(field)
    return _propagator(field.grid, config).step(field)


def steps_for(t_span: float, dt: float) -> tuple[int, float]:
    """Number of steps and the (possibly reduced) dt that divides t_span evenly."""
    n = max(1, math.ceil(t_span / dt - 1e-9))
    return n, t_span / n


def run(field: WignerField, config: EvolverConfig, t_final: float,
        hooks: Iterable[Callable[[WignerField], None]] = (),
        sample_every: int = 1,
        on_step: Callable[[StepReport], None] | None = None) -> tuple[WignerField, RunDiagnostics]:
    """Advance ``field`` to ``t_final``.

    Diagnostics and ``hooks`` are sampled after every ``sample_every`` steps
    and always after the last one. ``dt`` is shortened if needed so that an
    integer number of steps lands exactly on ``t_final``.
    """
    span = t_final - field.time
    if span < -1e-12 * max(1.0, abs(t_final)):
        raise ContractError(f"t_final={t_final} is before the field time {field.time}")
    recorder = DiagnosticsRecorder()
    if span <= 1e-12 * max(1.0, abs(t_final)):
        return field.copy(), recorder.result()
    _check_mass(field)
    if sample_every < 1:
        raise ConfigError("sample_every must be at least 1")
    n, dt = steps_for(span, config.dt)
    if dt != config.dt:
        config = config.replace(dt=dt)
    prop = _propagator(field.grid, config)
    t0 = field.time
    hooks = [recorder, *hooks]
    current = field
    for k in range(n):
        t_after = t_final if k == n - 1 else t0 + (k + 1) * dt
        current, report = prop.step(current, t_start=t0 + k * dt, t_after=t_after)
        if on_step is not None:
            on_step(report)
        if (k + 1) % sample_every == 0 or k == n - 1:
            for hook in hooks:
                hook(current)
    return current, recorder.result()
