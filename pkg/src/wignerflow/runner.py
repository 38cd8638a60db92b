"""Run orchestration behind the command line: single runs, three-panel
comparisons and parameter sweeps, with all their output files."""

from __future__ import annotations

import csv
import io as _io
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__, _kernels
from . import io as wio
from .config import RunConfig
from .diagnostics import (RunDiagnostics, ScreeningVerdict, break_time, calibrated_thresholds,
                          field_distance, negativity_volume, screening_report)
from .errors import ConfigError
from .evolvers import run as evolve, steps_for
from .phase_space import WignerField, init_gaussian

log = logging.getLogger(__name__)

BREAK_ETA = 1.0
# Below this isolated-pair distance there is no quantum effect to screen off.
D_ISO_FLOOR = 1e-12


@dataclass
class RunResult:
    initial: WignerField
    final: WignerField
    diagnostics: RunDiagnostics


class _Snapshots:
    """Run hook writing a dump and heatmap at every Nth driving period."""

    def __init__(self, directory: Path, prefix: str, every: float, label_step: int, formats):
        self.directory = directory
        self.prefix = prefix
        self.every = every
        self.label_step = label_step
        self.formats = formats
        self.next = 1

    def __call__(self, field: WignerField) -> None:
        if field.time + 1e-9 * self.every < self.next * self.every:
            return
        stem = self.directory / f"{self.prefix}_t{self.next * self.label_step:04d}T"
        if "dump" in self.formats:
            wio.write_dump(field, stem.with_suffix(".wigf"))
        if "pgm" in self.formats:
            wio.write_heatmap(field, stem.with_suffix(".pgm"))
        self.next = math.floor(field.time / self.every + 1e-9) + 1


def simulate(cfg: RunConfig, mode: str, D: float, snapshot_dir: Path | None = None,
             formats=("dump", "pgm"), hooks=()) -> RunResult:
    """One evolution from the configured initial state.

    ``hooks`` are called with the field at every diagnostics sample.
    """
    f0 = init_gaussian(cfg.grid, cfg.init)
    f0.classical = mode == "classical"
    cfg.params.warn_if_unbounded()
    hooks = list(hooks)
    if snapshot_dir is not None and cfg.snapshot_every_periods > 0 and cfg.t_final > 0:
        snapshot_dir.mkdir(parents=True, exist_ok=True)
        hooks.append(_Snapshots(snapshot_dir, mode, cfg.snapshot_every_periods * cfg.period,
                                cfg.snapshot_every_periods, formats))
    final, diag = evolve(f0, cfg.evolver_config(mode=mode, D=D), cfg.t_final,
                         hooks=hooks, sample_every=cfg.sample_every)
    return RunResult(f0, final, diag)


def _manifest_text(cfg: RunConfig, command: str, outputs: dict[str, str]) -> str:
    lines = [f"# wignerflow {__version__} manifest",
             f"# command: {command}",
             f"# kernel backend: {_kernels.BACKEND}",
             "# The configuration below is complete: pass this file as --config to reproduce.",
             ]
    lines += [f"# sha256 {name} {digest}" for name, digest in sorted(outputs.items())]
    return "\n".join(lines) + "\n\n" + cfg.to_text()


def _hash_outputs(out: Path) -> dict[str, str]:
    return {str(p.relative_to(out)): wio.sha256_file(p)
            for p in sorted(out.rglob("*")) if p.is_file() and p.name != "manifest.txt"}


def cmd_run(cfg: RunConfig, out_dir) -> RunResult:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    D = cfg.diffusion.value
    snap = out / "snapshots" if cfg.formats else None
    res = simulate(cfg, cfg.mode, D, snap, cfg.formats)
    if "dump" in cfg.formats:
        wio.write_dump(res.initial, out / "initial.wigf")
        wio.write_dump(res.final, out / "final.wigf")
    if "csv" in cfg.formats:
        wio.write_diagnostics(res.diagnostics, out / "diagnostics.csv")
    if "pgm" in cfg.formats:
        wio.write_heatmap(res.initial, out / "initial.pgm")
        wio.write_heatmap(res.final, out / "final.pgm")
    (out / "manifest.txt").write_text(_manifest_text(cfg, "run", _hash_outputs(out)), encoding="utf-8")
    return res


@dataclass
class CompareResult:
    runs: dict[str, RunResult]
    verdict: ScreeningVerdict
    distances: dict[str, float]
    break_times: dict[str, float | None]
    negativity: dict[str, float]

    def report_text(self) -> str:
        v = self.verdict
        lines = ["# quantum/classical comparison at t = %r" % self.runs["quantum_iso"].final.time]
        lines += [f"{k} = {val!r}" for k, val in self.distances.items()]
        lines += [f"negativity_{k} = {val!r}" for k, val in self.negativity.items()]
        lines += [f"break_time_{k} = {'none' if val is None else repr(val)}" for k, val in self.break_times.items()]
        if self.negativity["quantum_iso"] > 0:
            lines.append("negativity_suppression_ratio = %r"
                         % (self.negativity["quantum_dec"] / self.negativity["quantum_iso"]))
        lines += [f"theta_high = {v.theta_high!r}", f"theta_low = {v.theta_low!r}",
                  f"unconditional_relevance = {str(v.unconditional_relevance).lower()}",
                  f"conditional_irrelevance = {str(v.conditional_irrelevance).lower()}",
                  f"emergent = {str(v.emergent).lower()}"]
        return "\n".join(lines) + "\n"


_iso_cache: dict[tuple[str, str], RunResult] = {}
_iso_lock = threading.Lock()


def _isolated(cfg: RunConfig, mode: str) -> RunResult:
    # D = 0 runs do not depend on the decoherence section; sweeps over d reuse them.
    key = (cfg.with_value("decoherence.d", "0").to_text(), mode)
    with _iso_lock:
        hit = _iso_cache.get(key)
    if hit is None:
        hit = simulate(cfg, mode, 0.0)
        with _iso_lock:
            _iso_cache[key] = hit
    return hit


def compare(cfg: RunConfig) -> CompareResult:
    """Quantum without decoherence, quantum and classical with it, plus the
    classical D = 0 reference for the isolated pair."""
    D0 = cfg.diffusion.value
    if not D0 > 0:
        raise ConfigError("compare needs a positive decoherence strength [decoherence] d")
    runs = {
        "quantum_iso": _isolated(cfg, "quantum"),
        "classical_iso": _isolated(cfg, "classical"),
        "quantum_dec": simulate(cfg, "quantum", D0),
        "classical_dec": simulate(cfg, "classical", D0),
    }
    qi, ci = runs["quantum_iso"].final, runs["classical_iso"].final
    qd, cd = runs["quantum_dec"].final, runs["classical_dec"].final
    distances = {}
    for metric in ("L1", "L2"):
        distances[f"d_iso_{metric}"] = field_distance(qi, ci, metric)
        distances[f"d_dec_{metric}"] = field_distance(qd, cd, metric)
        distances[f"d_panels_top_bottom_{metric}"] = field_distance(qi, cd, metric)
    d_iso = distances["d_iso_L2"]
    theta_high, theta_low = calibrated_thresholds(max(d_iso, D_ISO_FLOOR))
    verdict = screening_report(qi, ci, qd, cd, theta_high, theta_low)
    breaks = {}
    for label in ("iso", "dec"):
        dq, dc = runs[f"quantum_{label}"].diagnostics, runs[f"classical_{label}"].diagnostics
        breaks[label] = break_time(dq, dc, BREAK_ETA) if len(dq) else None
    neg = {k: negativity_volume(r.final) for k, r in runs.items()}
    return CompareResult(runs, verdict, distances, breaks, neg)


def cmd_compare(cfg: RunConfig, out_dir) -> CompareResult:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = compare(cfg)
    for name, r in res.runs.items():
        if "dump" in cfg.formats:
            wio.write_dump(r.final, out / f"{name}_final.wigf")
        if "csv" in cfg.formats:
            wio.write_diagnostics(r.diagnostics, out / f"{name}_diagnostics.csv")
        if "pgm" in cfg.formats:
            wio.write_heatmap(r.final, out / f"{name}_final.pgm")
    if "dump" in cfg.formats:
        wio.write_dump(res.runs["quantum_iso"].initial, out / "initial.wigf")
    if "pgm" in cfg.formats:
        panels = [res.runs[k].final for k in ("quantum_iso", "quantum_dec", "classical_dec")]
        (out / "panels.pgm").write_bytes(wio.side_by_side_heatmap(panels))
    (out / "report.txt").write_text(res.report_text(), encoding="utf-8")
    (out / "manifest.txt").write_text(_manifest_text(cfg, "compare", _hash_outputs(out)), encoding="utf-8")
    return res


SWEEP_COLUMNS = ("value", "d_iso", "d_dec", "d_iso_L1", "d_dec_L1", "negativity_quantum_dec", "emergent")


def cmd_sweep(cfg: RunConfig, key: str, values, out_dir, threads: int = 1) -> list[dict]:
    values = list(values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    configs = [cfg.with_value(key, str(v)) for v in values]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def job(i):
        return cmd_compare(configs[i], out / f"{i:03d}_{key.replace('.', '_')}_{values[i]}")

    if threads > 1:
        if key.startswith("decoherence."):
            # fill the shared D = 0 cache once so concurrent jobs do not race to compute it
            _isolated(configs[0], "quantum")
            _isolated(configs[0], "classical")
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(job, range(len(values))))
    else:
        results = [job(i) for i in range(len(values))]
    rows = []
    for v, r in zip(values, results):
        rows.append({"value": v, "d_iso": r.distances["d_iso_L2"], "d_dec": r.distances["d_dec_L2"],
                     "d_iso_L1": r.distances["d_iso_L1"], "d_dec_L1": r.distances["d_dec_L1"],
                     "negativity_quantum_dec": r.negativity["quantum_dec"],
                     "emergent": r.verdict.emergent})
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for row in rows:
        w.writerow([row["value"]] + [repr(float(row[c])) for c in SWEEP_COLUMNS[1:-1]]
                   + [str(row["emergent"]).lower()])
    (out / "sweep.csv").write_text(buf.getvalue(), encoding="utf-8")
    return rows
