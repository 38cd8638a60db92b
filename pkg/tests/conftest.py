import math
import warnings

import numpy as np
import pytest

from wignerflow import DiffusionSpec, EvolverConfig, GaussianSpec, SystemParams, init_gaussian, make_grid


@pytest.fixture
def grid64():
    return make_grid(64, 64, -4, 4, -4, 4)


@pytest.fixture
def free_params():
    return SystemParams(m=1.0, A=0.0, B=0.0, lambda_=0.0, omega=1.0, hbar=1.0)


def harmonic_params(k=1.0, m=1.0, hbar=0.5):
    # V = k x^2 / 2 is B = 0, A = -k/2
    return SystemParams(m=m, A=-k / 2, B=0.0, lambda_=0.0, omega=1.0, hbar=hbar)


def make_config(mode, params, D=0.0, dt=0.01, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return EvolverConfig(mode, params, DiffusionSpec(D=D), dt, **kw)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one summary line per acceptance criterion, printed after the test session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
