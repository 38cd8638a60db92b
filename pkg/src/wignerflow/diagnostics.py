"""Interference, divergence and screening-off measures on phase-space fields."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Literal

import numpy as np

from .errors import ContractError
from .phase_space import WignerField, mean_and_variance, mass

SERIES = ("mean_x", "mean_p", "var_x", "var_p", "negativity", "mass")


@dataclass
class RunDiagnostics:
    """Time series sampled during a run; every array has the same length."""

    times: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    mean_x: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    mean_p: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    var_x: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    var_p: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    negativity: np.ndarray = dc_field(default_factory=lambda: np.empty(0))
    mass_series: np.ndarray = dc_field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        arrays = [np.asarray(getattr(self, n), dtype=float) for n in self._names()]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1:
            raise ContractError("diagnostic series must be 1-D and of equal length")
        for n, a in zip(self._names(), arrays):
            setattr(self, n, a)
        if np.any(np.diff(self.times) <= 0):
            raise ContractError("diagnostic times must be strictly increasing")

    @staticmethod
    def _names():
        return ("times", "mean_x", "mean_p", "var_x", "var_p", "negativity", "mass_series")

    def __len__(self):
        return len(self.times)

    def columns(self) -> dict[str, np.ndarray]:
        """Series keyed by their CSV column names, in CSV order."""
        return {"time": self.times, "mean_x": self.mean_x, "mean_p": self.mean_p,
                "var_x": self.var_x, "var_p": self.var_p,
                "negativity": self.negativity, "mass": self.mass_series}


class DiagnosticsRecorder:
    """Accumulates samples of a run and freezes them into RunDiagnostics."""

    def __init__(self):
        self._rows: list[tuple[float, ...]] = []

    def sample(self, field: WignerField) -> None:
        mx, mp, vx, vp = mean_and_variance(field)
        self._rows.append((field.time, mx, mp, vx, vp, negativity_volume(field), mass(field)))

    def __call__(self, field: WignerField) -> None:
        self.sample(field)

    def result(self) -> RunDiagnostics:
        if not self._rows:
            return RunDiagnostics()
        cols = np.array(self._rows, dtype=float).T
        return RunDiagnostics(*cols)


def negativity_volume(field: WignerField) -> float:
    """Integral of |f| minus integral of f, i.e. twice the negative mass."""
    v = field.values
    return float(2.0 * np.maximum(-v, 0.0).sum() * field.grid.cell_area)


def field_distance(a: WignerField, b: WignerField, metric: Literal["L1", "L2"] = "L2") -> float:
    if a.grid != b.grid:
        raise ContractError(f"grid mismatch: {a.grid} vs {b.grid}")
    diff = np.abs(a.values - b.values)
    area = a.grid.cell_area
    if metric == "L1":
        return float(diff.sum() * area)
    if metric == "L2":
        return float(math.sqrt((diff * diff).sum() * area))
    raise ContractError(f"metric must be 'L1' or 'L2', got {metric!r}")


def break_time(diag_q: RunDiagnostics, diag_c: RunDiagnostics, eta: float) -> float | None:
    """First sampled time where <x> splits by more than eta classical std devs."""
    if diag_q.times.shape != diag_c.times.shape or not np.array_equal(diag_q.times, diag_c.times):
        raise ContractError("break_time needs both runs sampled at the same times")
    gap = np.abs(diag_q.mean_x - diag_c.mean_x)
    limit = eta * np.sqrt(np.maximum(diag_c.var_x, 0.0))
    hits = np.flatnonzero(gap > limit)
    return float(diag_q.times[hits[0]]) if hits.size else None


@dataclass(frozen=True)
class ScreeningVerdict:
    unconditional_relevance: bool
    conditional_irrelevance: bool
    emergent: bool
    d_iso: float
    d_dec: float
    theta_high: float
    theta_low: float

    def __post_init__(self):
        assert self.emergent == (self.unconditional_relevance and self.conditional_irrelevance)

    @property
    def evidence(self) -> dict[str, float]:
        return {"d_iso": self.d_iso, "d_dec": self.d_dec,
                "theta_high": self.theta_high, "theta_low": self.theta_low}


def calibrated_thresholds(d_iso_reference: float, high: float = 0.5, low: float = 0.1) -> tuple[float, float]:
    """Scale-free thresholds as fractions of a reference isolated-pair distance."""
    return high * d_iso_reference, low * d_iso_reference


def screening_report(f_q_iso: WignerField, f_c_iso: WignerField,
                     f_q_dec: WignerField, f_c_dec: WignerField,
                     theta_high: float, theta_low: float) -> ScreeningVerdict:
    """Decide whether the quantum term is relevant alone but screened off by decoherence.

    Relevance: the isolated quantum/classical pair is further apart than
    ``theta_high`` in L2. Irrelevance: the decohered pair is closer than
    ``theta_low``.
    """
    if not theta_high > theta_low > 0:
        raise ContractError(f"need theta_high > theta_low > 0, got {theta_high}, {theta_low}")
    fields = (f_q_iso, f_c_iso, f_q_dec, f_c_dec)
    if any(f.grid != f_q_iso.grid for f in fields):
        raise ContractError("screening_report fields live on different grids")
    if any(abs(f.time - f_q_iso.time) > 1e-9 * max(1.0, abs(f_q_iso.time)) for f in fields):
        raise ContractError("screening_report fields are at different times")
    d_iso = field_distance(f_q_iso, f_c_iso, "L2")
    d_dec = field_distance(f_q_dec, f_c_dec, "L2")
    relevant = d_iso > theta_high
    irrelevant = d_dec < theta_low
    return ScreeningVerdict(relevant, irrelevant, relevant and irrelevant,
                            d_iso, d_dec, float(theta_high), float(theta_low))
