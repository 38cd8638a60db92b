"""Independent checks: a Langevin particle ensemble and closed-form moments.

The ensemble integrates

    dx = p/m dt,    dp = -dV/dx(x, t) dt + sqrt(2 D) dW

whose forward equation is the classical Fokker-Planck equation solved by the
spectral evolver. Two first-order Euler-Maruyama variants are available:
``"symplectic"`` (kick, then drift with the new momentum; the default) and
``"explicit"`` (both updates from the old state). The explicit form pumps
energy into stiff oscillations of the double well and needs a far smaller
step for the same accuracy. Particles are split into fixed-size blocks, each with its
own Philox stream spawned from the seed, so summaries do not depend on how
many threads process the blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import DiffusionSpec, SystemParams
from .errors import ConfigError
from .phase_space import GaussianSpec, PhaseSpaceGrid

BLOCK = 8192
CHUNK_STEPS = 256


@dataclass(frozen=True)
class EnsembleSpec:
    n_particles: int
    seed: int
    dt: float

    def __post_init__(self):
        if self.n_particles < 1:
            raise ConfigError("n_particles must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")


@dataclass(frozen=True)
class MomentSummary:
    mean_x: float
    mean_p: float
    var_x: float
    var_p: float
    se_mean_x: float = 0.0
    se_mean_p: float = 0.0
    se_var_x: float = 0.0
    se_var_p: float = 0.0
    n_used: int = 0
    n_excluded: int = 0

    def as_dict(self) -> dict[str, float]:
        return {"mean_x": self.mean_x, "mean_p": self.mean_p,
                "var_x": self.var_x, "var_p": self.var_p}

    def standard_errors(self) -> dict[str, float]:
        return {"mean_x": self.se_mean_x, "mean_p": self.se_mean_p,
                "var_x": self.se_var_x, "var_p": self.se_var_p}


SCHEMES = ("symplectic", "explicit")


def _run_block(block_seed, n, params, D, init, t0, n_steps, dt, escape, symplectic):
    rng = np.random.Generator(np.random.Philox(block_seed))
    x = init.x0 + init.sigma_x * rng.standard_normal(n)
    p = init.p0 + init.sigma_p * rng.standard_normal(n)
    alive = np.ones(n, dtype=np.bool_)
    scale = math.sqrt(2.0 * D * dt)
    done = 0
    while done < n_steps:
        k = min(CHUNK_STEPS, n_steps - done)
        noise = rng.standard_normal((k, n))
        x, p, alive = _kernels.langevin_steps(x, p, alive, noise, t0 + done * dt, dt,
                                              params.m, params.A, params.B, params.lambda_,
                                              params.omega, scale, escape, symplectic)
        done += k
    return x, p, alive


def _stats(v):
    n = v.size
    mu = float(v.mean())
    c = v - mu
    var = float((c * c).sum() / (n - 1))
    m4 = float((c**4).mean())
    return mu, var, math.sqrt(var / n), math.sqrt(max(m4 - var * var, 0.0) / n)


def langevin_run(spec: EnsembleSpec, params: SystemParams, diffusion: DiffusionSpec,
                 init: GaussianSpec, t_final: float, t0: float = 0.0,
                 grid: PhaseSpaceGrid | None = None, threads: int = 1,
                 scheme: str = "symplectic") -> MomentSummary:
    """Euler-Maruyama ensemble; the drive is evaluated at the start of each step.

    Particles that wander beyond ten times the grid bounds are dropped and
    counted in ``n_excluded``.
    """
    if t_final < t0:
        raise ConfigError("t_final precedes t0")
    if scheme not in SCHEMES:
        raise ConfigError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    n_steps = max(1, math.ceil((t_final - t0) / spec.dt - 1e-9)) if t_final > t0 else 0
    dt = (t_final - t0) / n_steps if n_steps else spec.dt
    if grid is not None:
        escape = (10 * max(abs(grid.x_min), abs(grid.x_max)), 10 * max(abs(grid.p_min), abs(grid.p_max)))
    else:
        escape = (math.inf, math.inf)
    sizes = [BLOCK] * (spec.n_particles // BLOCK)
    if spec.n_particles % BLOCK:
        sizes.append(spec.n_particles % BLOCK)
    seeds = np.random.SeedSequence(spec.seed).spawn(len(sizes))
    D = diffusion.value
    symplectic = scheme == "symplectic"
    jobs = [(s, n, params, D, init, t0, n_steps, dt, escape, symplectic) for s, n in zip(seeds, sizes)]
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(lambda a: _run_block(*a), jobs))
    else:
        results = [_run_block(*a) for a in jobs]
    x = np.concatenate([r[0] for r in results])
    p = np.concatenate([r[1] for r in results])
    alive = np.concatenate([r[2] for r in results])
    x, p = x[alive], p[alive]
    if x.size < 2:
        raise ConfigError("fewer than two particles survived; enlarge the grid bounds")
    mx, vx, se_mx, se_vx = _stats(x)
    mp, vp, se_mp, se_vp = _stats(p)
    return MomentSummary(mx, mp, vx, vp, se_mx, se_mp, se_vx, se_vp,
                         int(x.size), int(spec.n_particles - x.size))


def analytic_free_gaussian(init: GaussianSpec, m: float, t: float) -> MomentSummary:
    """Ballistic spreading of a Gaussian with no force and no diffusion."""
    if t < 0:
        raise ConfigError("t must be nonnegative")
    return MomentSummary(init.x0 + init.p0 * t / m, init.p0,
                         init.sigma_x**2 + (init.sigma_p * t / m) ** 2, init.sigma_p**2)


def analytic_harmonic_center(x0: float, p0: float, k: float, m: float, t: float) -> tuple[float, float]:
    """Phase-space centre of any distribution in V = k x^2 / 2 after time t."""
    w = math.sqrt(k / m)
    c, s = math.cos(w * t), math.sin(w * t)
    return x0 * c + p0 / (m * w) * s, p0 * c - x0 * m * w * s
