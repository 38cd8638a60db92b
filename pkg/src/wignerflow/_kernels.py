"""Hot inner loops, with a numba path and a plain numpy path.

The numba versions are used when numba imports cleanly and the environment
variable ``WIGNERFLOW_DISABLE_NUMBA`` is unset (or "0"). Both paths compute
the same formulas; results agree to roundoff, not bit for bit.
"""

from __future__ import annotations

import math
import os

import numpy as np

_DISABLE = os.environ.get("WIGNERFLOW_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

try:  # pragma: no cover - exercised implicitly
    if _DISABLE:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


# --------------------------------------------------------------------------
# numpy reference implementations
# --------------------------------------------------------------------------

def apply_momentum_step_numpy(spec, x, lam, half_hbar, B, A, drive, D, dt):
    """Multiply the p-transform ``spec`` (nx, nlam) in place by the propagator.

    Phase: exp(i dt lam [4Bx(x^2 + h^2) - 2Ax + drive]) with h = half_hbar*lam,
    which is the exact odd difference (V(x+h) - V(x-h)) / hbar of the quartic.
    half_hbar = 0 gives the classical kernel. Damping: exp(-D lam^2 dt).
    """
    xc = x[:, None]
    lc = lam[None, :]
    h = half_hbar * lc
    rate = 4.0 * B * xc * (xc * xc + h * h) - 2.0 * A * xc + drive
    spec *= np.exp(-D * dt * lc * lc) * np.exp(1j * dt * lc * rate)
    return spec


def langevin_steps_numpy(x, p, alive, noise, t0, dt, m, A, B, lam_drive, omega, noise_scale, escape,
                         symplectic=True):
    """Euler-Maruyama for dx = p/m dt, dp = -V'(x,t) dt + sqrt(2D) dW.

    The drive is evaluated at the start of each step. With ``symplectic``
    the position update uses the new momentum (kick then drift); otherwise
    both use the old state. ``noise`` has shape (n_steps, n_particles) of
    standard normals. Particles leaving |x| or |p| > escape are frozen and
    flagged dead.
    """
    xlim, plim = escape
    for k in range(noise.shape[0]):
        t = t0 + k * dt
        grad = 4.0 * B * x * x * x - 2.0 * A * x + lam_drive * math.cos(omega * t)
        pn = p - grad * dt + noise_scale * noise[k]
        xn = x + ((pn if symplectic else p) / m) * dt
        x = np.where(alive, xn, x)
        p = np.where(alive, pn, p)
        out = (np.abs(x) > xlim) | (np.abs(p) > plim) | ~np.isfinite(x) | ~np.isfinite(p)
        alive = alive & ~out
    return x, p, alive


def boundary_mass_numpy(values, width):
    a = np.abs(values)
    top = a[:width].sum() + a[-width:].sum()
    sides = a[width:-width, :width].sum() + a[width:-width, -width:].sum()
    return float(top + sides)


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True, nogil=True)
    def _apply_momentum_step_nb(spec, x, lam, half_hbar, B, A, drive, D, dt):
        nx, nl = spec.shape
        damp = np.empty(nl)
        hh = np.empty(nl)
        for j in range(nl):
            damp[j] = math.exp(-D * dt * lam[j] * lam[j])
            hh[j] = (half_hbar * lam[j]) ** 2
        for i in range(nx):
            xi = x[i]
            lin = 4.0 * B * xi * xi * xi - 2.0 * A * xi + drive
            quad = 4.0 * B * xi
            for j in range(nl):
                phi = dt * lam[j] * (lin + quad * hh[j])
                spec[i, j] *= damp[j] * complex(math.cos(phi), math.sin(phi))
        return spec

    @njit(cache=True, nogil=True)
    def _langevin_steps_nb(x, p, alive, noise, t0, dt, m, A, B, lam_drive, omega, noise_scale, xlim, plim,
                           symplectic):
        n_steps, n = noise.shape
        for k in range(n_steps):
            drive = lam_drive * math.cos(omega * (t0 + k * dt))
            for i in range(n):
                if not alive[i]:
                    continue
                xi = x[i]
                pi = p[i]
                grad = 4.0 * B * xi * xi * xi - 2.0 * A * xi + drive
                pn = pi - grad * dt + noise_scale * noise[k, i]
                xn = xi + ((pn if symplectic else pi) / m) * dt
                x[i] = xn
                p[i] = pn
                if not (abs(xn) <= xlim and abs(pn) <= plim):
                    alive[i] = False
        return x, p, alive

    @njit(cache=True, nogil=True)
    def _boundary_mass_nb(values, width):
        nx, np_ = values.shape
        total = 0.0
        for i in range(nx):
            if i < width or i >= nx - width:
                for j in range(np_):
                    total += abs(values[i, j])
            else:
                for j in range(width):
                    total += abs(values[i, j]) + abs(values[i, np_ - 1 - j])
        return total

    def apply_momentum_step(spec, x, lam, half_hbar, B, A, drive, D, dt):
        return _apply_momentum_step_nb(spec, x, lam, float(half_hbar), float(B), float(A),
                                       float(drive), float(D), float(dt))

    def langevin_steps(x, p, alive, noise, t0, dt, m, A, B, lam_drive, omega, noise_scale, escape,
                       symplectic=True):
        return _langevin_steps_nb(x, p, alive, noise, float(t0), float(dt), float(m), float(A), float(B),
                                  float(lam_drive), float(omega), float(noise_scale),
                                  float(escape[0]), float(escape[1]), bool(symplectic))

    def boundary_mass(values, width):
        return float(_boundary_mass_nb(values, int(width)))

else:  # pragma: no cover
    apply_momentum_step = apply_momentum_step_numpy
    langevin_steps = langevin_steps_numpy
    boundary_mass = boundary_mass_numpy


BACKEND = "numba" if HAVE_NUMBA else "numpy"
