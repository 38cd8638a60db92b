import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wignerflow import (GaussianSpec, WignerField, break_time, field_distance, init_gaussian, make_grid,
                        negativity_volume, screening_report)
from wignerflow.diagnostics import DiagnosticsRecorder, RunDiagnostics, calibrated_thresholds
from wignerflow.errors import ContractError


def fock1(grid, hbar):
    # first excited oscillator state, m = omega = 1
    X, P = np.meshgrid(grid.x, grid.p, indexing="ij")
    r2 = (X * X + P * P) / hbar
    return WignerField(grid, (2 * r2 - 1) * np.exp(-r2) / (math.pi * hbar))


def test_negativity_of_first_excited_state():
    g = make_grid(1024, 1024, -6, 6, -6, 6)
    # closed form: 2 (2 / sqrt(e) - 1), independent of hbar; the kink of the
    # negative part limits midpoint quadrature to second order
    for hbar in (0.5, 1.0):
        assert negativity_volume(fock1(g, hbar)) == pytest.approx(2 * (2 / math.sqrt(math.e) - 1), rel=1e-4)


def test_negativity_zero_for_gaussian(grid64):
    assert negativity_volume(init_gaussian(grid64, GaussianSpec(0, 0, 0.6, 0.6))) == 0.0


def test_l2_distance_of_shifted_gaussians():
    g = make_grid(256, 256, -8, 8, -8, 8)
    sx, sp, shift = 0.7, 0.5, 1.3
    a = init_gaussian(g, GaussianSpec(-shift / 2, 0, sx, sp))
    b = init_gaussian(g, GaussianSpec(shift / 2, 0, sx, sp))
    self_overlap = 1 / (4 * math.pi * sx * sp)
    expected = math.sqrt(2 * self_overlap * (1 - math.exp(-shift**2 / (4 * sx**2))))
    assert field_distance(a, b, "L2") == pytest.approx(expected, rel=1e-9)
    assert field_distance(a, a, "L1") == 0.0
    assert field_distance(a, b, "L1") == pytest.approx(field_distance(b, a, "L1"))


def test_distance_contracts(grid64):
    a = init_gaussian(grid64, GaussianSpec(0, 0, 0.6, 0.6))
    other = init_gaussian(make_grid(32, 32, -4, 4, -4, 4), GaussianSpec(0, 0, 0.6, 0.6))
    with pytest.raises(ContractError, match="grid"):
        field_distance(a, other)
    with pytest.raises(ContractError, match="metric"):
        field_distance(a, a, "Linf")


def _diag(times, mean_x, var_x):
    n = len(times)
    return RunDiagnostics(np.array(times, float), np.array(mean_x, float), np.zeros(n),
                          np.array(var_x, float), np.ones(n), np.zeros(n), np.ones(n))


def test_break_time_first_crossing():
    t = [0.5, 1.0, 1.5, 2.0]
    c = _diag(t, [0, 0, 0, 0], [1, 1, 4, 4])
    q = _diag(t, [0.1, 1.5, 1.9, 3.5], [1, 1, 1, 1])
    assert break_time(q, c, 1.0) == 1.0
    assert break_time(q, c, 1.6) == 2.0
    assert break_time(q, c, 10.0) is None
    with pytest.raises(ContractError):
        break_time(q, _diag([0.5, 1.0], [0, 0], [1, 1]), 1.0)


def test_diagnostics_reject_bad_series():
    with pytest.raises(ContractError):
        _diag([1.0, 1.0], [0, 0], [1, 1])
    with pytest.raises(ContractError):
        RunDiagnostics(np.zeros(2), np.zeros(3), np.zeros(2), np.zeros(2), np.zeros(2), np.zeros(2), np.zeros(2))


def test_recorder_samples(grid64):
    rec = DiagnosticsRecorder()
    assert len(rec.result()) == 0
    f = init_gaussian(grid64, GaussianSpec(0.5, -0.5, 0.6, 0.6))
    rec(f)
    rec(f.with_values(f.values, time=1.0))
    d = rec.result()
    assert list(d.times) == [0.0, 1.0]
    assert d.mean_x[0] == pytest.approx(0.5, abs=1e-7)
    assert d.mass_series[1] == pytest.approx(1.0, abs=1e-12)


def test_screening_verdict_logic(grid64):
    base = init_gaussian(grid64, GaussianSpec(0, 0, 0.5, 0.5))
    far = init_gaussian(grid64, GaussianSpec(1.0, 0, 0.5, 0.5))
    near = init_gaussian(grid64, GaussianSpec(0.01, 0, 0.5, 0.5))
    d_far = field_distance(base, far)
    hi, lo = calibrated_thresholds(d_far)
    assert (hi, lo) == (0.5 * d_far, 0.1 * d_far)
    v = screening_report(base, far, base, near, hi, lo)
    assert v.unconditional_relevance and v.conditional_irrelevance and v.emergent
    v = screening_report(base, far, base, far, hi, lo)
    assert v.unconditional_relevance and not v.conditional_irrelevance and not v.emergent
    v = screening_report(base, near, base, near, hi, lo)
    assert not v.unconditional_relevance and not v.emergent
    assert v.evidence["d_iso"] == v.d_iso


def test_screening_contracts(grid64):
    f = init_gaussian(grid64, GaussianSpec(0, 0, 0.6, 0.6))
    with pytest.raises(ContractError, match="theta"):
        screening_report(f, f, f, f, 0.1, 0.2)
    with pytest.raises(ContractError, match="theta"):
        screening_report(f, f, f, f, 0.1, 0.0)
    with pytest.raises(ContractError, match="times"):
        screening_report(f, f, f, f.with_values(f.values, time=1.0), 0.2, 0.1)


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_distance_triangle_inequality_and_negativity_sign(seed):
    g = make_grid(16, 16, -1, 1, -1, 1)
    rng = np.random.default_rng(seed)
    a, b, c = (WignerField(g, rng.standard_normal(g.shape)) for _ in range(3))
    for metric in ("L1", "L2"):
        assert field_distance(a, c, metric) <= field_distance(a, b, metric) + field_distance(b, c, metric) + 1e-10
    assert negativity_volume(a) >= -1e-12
