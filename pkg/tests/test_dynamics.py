import math

import numpy as np
import pytest
import sympy as sp

from wignerflow import (DiffusionSpec, SystemParams, classical_kernel, driving_period, force_gradient,
                        potential, quantum_kernel, third_derivative)
from wignerflow.errors import ConfigError


def params(**kw):
    base = dict(m=1.0, A=10.0, B=0.5, lambda_=10.0, omega=6.07, hbar=0.1)
    base.update(kw)
    return SystemParams(**base)


def test_potential_values():
    P = params()
    assert potential(0.0, 3.7, P) == 0.0
    assert potential(1.0, 0.0, P) == pytest.approx(0.5)
    P0 = params(lambda_=0.0)
    xs = np.linspace(-3, 3, 11)
    assert np.array_equal(potential(xs, 0.0, P0), potential(xs, 12.3, P0))


def test_force_gradient_values():
    assert force_gradient(0.0, 0.0, params(lambda_=0.0)) == 0.0
    assert force_gradient(1.0, 0.0, params(A=0.0, lambda_=0.0)) == pytest.approx(2.0)


def test_force_gradient_matches_finite_difference(rng):
    h = 1e-5
    for _ in range(5):
        P = params(A=rng.uniform(-10, 10), B=rng.uniform(0, 2), lambda_=rng.uniform(-10, 10),
                   omega=rng.uniform(0.5, 8))
        x = rng.uniform(-4, 4, 1000)
        t = rng.uniform(0, 10, 1000)
        fd = (potential(x + h, t, P) - potential(x - h, t, P)) / (2 * h)
        g = force_gradient(x, t, P)
        # relative, with a floor of 1 for the roundoff of the difference quotient
        assert np.all(np.abs(fd - g) <= 1e-6 * np.maximum(np.abs(g), 1.0))


def test_parity_without_drive(rng):
    P = params(lambda_=0.0)
    x = rng.uniform(-5, 5, 100)
    assert np.array_equal(potential(-x, 1.0, P), potential(x, 1.0, P))
    assert np.array_equal(force_gradient(-x, 1.0, P), -force_gradient(x, 1.0, P))


def test_third_derivative():
    assert third_derivative(0.0, params()) == 0.0
    assert third_derivative(2.0, params(B=0.5)) == pytest.approx(24.0)
    assert np.all(third_derivative(np.linspace(-3, 3, 7), params(B=0.0)) == 0)


def test_third_derivative_symbolic():
    x, t, A, B, L, w = sp.symbols("x t A B Lambda omega", real=True)
    V = B * x**4 - A * x**2 + L * x * sp.cos(w * t)
    assert sp.simplify(sp.diff(V, x, 3) - 24 * B * x) == 0
    assert sp.diff(V, x, 5) == 0


def test_driving_period():
    assert driving_period(params(omega=2 * math.pi)) == pytest.approx(1.0)
    assert driving_period(params(omega=1.0)) == pytest.approx(2 * math.pi)
    assert driving_period(params(omega=6.07)) == 2 * math.pi / 6.07


@pytest.mark.parametrize("bad", [dict(m=0.0), dict(omega=-1.0), dict(hbar=0.0), dict(B=-0.1),
                                 dict(A=math.nan)])
def test_params_validation(bad):
    with pytest.raises(ConfigError):
        params(**bad)


def test_zero_quartic_warns():
    with pytest.warns(UserWarning, match="unbounded"):
        params(B=0.0, A=1.0).warn_if_unbounded()


def test_diffusion_spec():
    assert DiffusionSpec(D=0.025).value == 0.025
    assert DiffusionSpec(gamma=0.5, mass_env=2.0, kbt=0.0125).value == pytest.approx(0.025)
    with pytest.raises(ConfigError):
        DiffusionSpec(D=0.1, gamma=1.0)
    with pytest.raises(ConfigError):
        DiffusionSpec(gamma=1.0, mass_env=1.0)
    with pytest.raises(ConfigError):
        DiffusionSpec(D=-1.0)


# --- Moyal kernels -----------------------------------------------------------

def test_kernels_vanish_at_zero_frequency(rng):
    P = params()
    x = rng.uniform(-5, 5, 50)
    assert np.all(quantum_kernel(x, 0.0, 0.3, P) == 0)
    assert np.all(classical_kernel(x, 0.0, 0.3, P) == 0)


def test_harmonic_kernel_has_no_hbar(rng):
    x = rng.uniform(-5, 5, 200)
    lam = rng.uniform(-50, 50, 200)
    for hbar in (0.01, 0.1, 1.0):
        P = params(B=0.0, hbar=hbar)
        q = quantum_kernel(x, lam, 0.7, P)
        assert np.array_equal(q, classical_kernel(x, lam, 0.7, P))
        assert np.allclose(q, 1j * lam * force_gradient(x, 0.7, P), rtol=1e-14, atol=0)


def test_moyal_kernel_symbolic_expansion():
    # (i/hbar)[V(x + hbar l/2) - V(x - hbar l/2)] = i l V'(x) + i hbar^2 B x l^3, exactly
    x, t, A, B, L, w, hb, lam = sp.symbols("x t A B Lambda omega hbar lambda", real=True)
    V = lambda y: B * y**4 - A * y**2 + L * y * sp.cos(w * t)
    moyal = sp.I / hb * (V(x + hb * lam / 2) - V(x - hb * lam / 2))
    expected = sp.I * lam * sp.diff(V(x), x) + sp.I * hb**2 * B * x * lam**3
    assert sp.expand(moyal - expected) == 0


def test_quantum_kernel_matches_direct_difference(rng):
    # Against a direct mpmath evaluation of the potential difference at 50 digits.
    import mpmath
    mpmath.mp.dps = 50
    P = params()
    for _ in range(200):
        x, lam, t = rng.uniform(-5, 5), rng.uniform(-60, 60), rng.uniform(0, 10)
        X, H = mpmath.mpf(x), mpmath.mpf(P.hbar) * mpmath.mpf(lam) / 2
        c = mpmath.cos(mpmath.mpf(P.omega) * mpmath.mpf(t))
        V = lambda y: mpmath.mpf(P.B) * y**4 - mpmath.mpf(P.A) * y**2 + mpmath.mpf(P.lambda_) * y * c
        ref = (V(X + H) - V(X - H)) / mpmath.mpf(P.hbar)
        got = quantum_kernel(x, lam, t, P)
        assert got.real == 0
        assert abs(got.imag - float(ref)) <= 1e-13 * max(abs(float(ref)), 1.0)
