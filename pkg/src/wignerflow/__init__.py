"""Wigner and Fokker-Planck phase-space evolution of a driven double well."""

from .dynamics import DiffusionSpec, SystemParams, driving_period, force_gradient, potential, third_derivative
from .evolvers import EvolverConfig, StepReport, classical_kernel, quantum_kernel, run, step
from .phase_space import (GaussianSpec, PhaseSpaceGrid, WignerField, init_gaussian, make_grid,
                          marginal, mass, moment)
from .diagnostics import (RunDiagnostics, ScreeningVerdict, break_time, field_distance,
                          negativity_volume, screening_report)

__version__ = "0.1.0"
