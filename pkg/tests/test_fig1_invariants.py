"""Invariants that are stated for the fig1 preset itself."""

import numpy as np
import pytest

from fig1_runs import fig1_run
from wignerflow.config import load_preset

pytestmark = pytest.mark.slow


def test_classical_positivity_on_fig1():
    D = load_preset("fig1").diffusion.value
    _, worst = fig1_run("classical", D)
    assert worst >= -1e-9, f"min/max|f| reached {worst:.3e}"


def test_negativity_non_increasing_after_first_period():
    cfg = load_preset("fig1")
    res, _ = fig1_run("quantum", cfg.diffusion.value)
    d = res.diagnostics
    late = d.negativity[d.times >= cfg.period - 1e-9]
    rises = np.diff(late)
    assert np.all(rises <= 1e-12), f"largest rise {rises.max():.3e}; series {late[::16]}"
