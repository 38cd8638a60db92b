"""Session cache of fig1-preset evolutions shared by the slow test modules."""

import time

import numpy as np

from wignerflow.config import RunConfig, load_preset
from wignerflow.runner import RunResult, simulate

_cache: dict = {}


class _WorstNegative:
    """Tracks min(values) / max|values| over the sampled fields."""

    def __init__(self):
        self.ratio = 0.0

    def __call__(self, field):
        v = field.values
        self.ratio = min(self.ratio, float(v.min() / np.abs(v).max()))


def fig1_run(mode: str, D: float, cfg: RunConfig | None = None) -> tuple[RunResult, float]:
    """(result, worst min/max ratio) of one fig1 run, computed once per session."""
    cfg = cfg or load_preset("fig1")
    key = (cfg.to_text(), mode, D)
    if key not in _cache:
        t = time.perf_counter()
        worst = _WorstNegative()
        res = simulate(cfg, mode, D, hooks=[worst])
        _cache[key] = (res, worst.ratio)
        print(f"  [fig1 {mode} D={D} {cfg.grid.nx}x{cfg.grid.np_}: {time.perf_counter() - t:.0f} s]")
    return _cache[key]


def fig1_final(mode: str, D: float, cfg: RunConfig | None = None):
    return fig1_run(mode, D, cfg)[0].final
