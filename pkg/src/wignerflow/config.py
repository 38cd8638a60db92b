"""Run configuration files.

Configs are INI files (``configparser`` syntax, ``#`` comments)::

    [grid]
    nx = 512            # power of two
    np = 512
    x_min = -6.5
    x_max = 6.5
    p_min = -22
    p_max = 22

    [params]
    m = 1
    a = 10              # -A x^2
    b = 0.5             # B x^4
    lambda = 10         # Lambda x cos(omega t)
    omega = 6.07
    hbar = 0.1          # required, no default

    [init]
    x0 = -3
    p0 = 8
    minimum_uncertainty = true   # sigma_x defaults to sqrt(hbar/2), sigma_p = hbar/(2 sigma_x)
    # sigma_x = 0.3
    # sigma_p = 0.3

    [evolve]
    mode = quantum      # quantum | classical (used by `run`)
    dt = T/256          # number, or T/N for a fraction of the driving period
    t_final_periods = 8 # or t_final_abs = <model time>, exactly one
    sample_every = 8    # diagnostics every N steps
    # boundary_mass_limit = 1e-6

    [decoherence]
    d = 0.025           # or gamma, mass_env and kbt together (D = 2 gamma mass_env kbt)

    [output]
    dir = out           # optional, --out overrides
    formats = dump, csv, pgm
    snapshot_every_periods = 1   # 0 disables periodic snapshots

Unknown sections or keys are errors.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass
from pathlib import Path

from .dynamics import DiffusionSpec, SystemParams, driving_period
from .errors import ConfigError
from .evolvers import EvolverConfig
from .phase_space import GaussianSpec, PhaseSpaceGrid

PRESET_DIR = Path(__file__).parent / "presets"

_SCHEMA = {
    "grid": {"nx", "np", "x_min", "x_max", "p_min", "p_max"},
    "params": {"m", "a", "b", "lambda", "omega", "hbar"},
    "init": {"x0", "p0", "sigma_x", "sigma_p", "minimum_uncertainty"},
    "evolve": {"mode", "dt", "t_final_periods", "t_final_abs", "sample_every", "boundary_mass_limit"},
    "decoherence": {"d", "gamma", "mass_env", "kbt"},
    "output": {"dir", "formats", "snapshot_every_periods"},
}
_REQUIRED = {
    "grid": ("nx", "np", "x_min", "x_max", "p_min", "p_max"),
    "params": ("m", "a", "b", "lambda", "omega", "hbar"),
    "init": ("x0", "p0"),
    "evolve": ("dt",),
}
FORMATS = ("dump", "csv", "pgm")
_PERIOD_FRACTION = re.compile(r"^T\s*/\s*(\d+)$")


@dataclass(frozen=True)
class RunConfig:
    grid: PhaseSpaceGrid
    params: SystemParams
    init: GaussianSpec
    mode: str
    dt: float
    t_final_periods: float | None
    t_final_abs: float | None
    sample_every: int
    diffusion: DiffusionSpec
    out_dir: str | None = None
    formats: tuple[str, ...] = FORMATS
    snapshot_every_periods: int = 1
    boundary_mass_limit: float = 1e-6

    @property
    def period(self) -> float:
        return driving_period(self.params)

    @property
    def t_final(self) -> float:
        if self.t_final_abs is not None:
            return self.t_final_abs
        return self.t_final_periods * self.period

    def evolver_config(self, mode: str | None = None, D: float | None = None) -> EvolverConfig:
        diffusion = self.diffusion if D is None else DiffusionSpec(D=D)
        return EvolverConfig(mode or self.mode, self.params, diffusion, self.dt, self.boundary_mass_limit)

    def with_value(self, key: str, value: str) -> "RunConfig":
        """Copy with one ``section.key`` entry replaced, re-validated."""
        section, _, name = key.partition(".")
        if section not in _SCHEMA or name not in _SCHEMA[section]:
            raise ConfigError(f"unknown config key {key!r}")
        cp = _to_parser(self)
        if section == "decoherence":
            cp.remove_section("decoherence")
            cp.add_section("decoherence")
        if section == "evolve" and name.startswith("t_final"):
            for k in ("t_final_periods", "t_final_abs"):
                cp.remove_option("evolve", k)
        cp.set(section, name, str(value))
        return _from_parser(cp)

    def to_text(self) -> str:
        """Canonical, exactly re-parseable form (floats written with repr)."""
        cp = _to_parser(self)
        lines = []
        for section in cp.sections():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in cp.items(section))
            lines.append("")
        return "\n".join(lines)


def _to_parser(cfg: RunConfig) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    g, P, i = cfg.grid, cfg.params, cfg.init
    cp["grid"] = {"nx": str(g.nx), "np": str(g.np_), "x_min": repr(g.x_min), "x_max": repr(g.x_max),
                  "p_min": repr(g.p_min), "p_max": repr(g.p_max)}
    cp["params"] = {"m": repr(P.m), "a": repr(P.A), "b": repr(P.B), "lambda": repr(P.lambda_),
                    "omega": repr(P.omega), "hbar": repr(P.hbar)}
    cp["init"] = {"x0": repr(i.x0), "p0": repr(i.p0), "sigma_x": repr(i.sigma_x), "sigma_p": repr(i.sigma_p),
                  "minimum_uncertainty": str(i.minimum_uncertainty).lower()}
    ev = {"mode": cfg.mode, "dt": repr(cfg.dt)}
    if cfg.t_final_abs is not None:
        ev["t_final_abs"] = repr(cfg.t_final_abs)
    else:
        ev["t_final_periods"] = repr(cfg.t_final_periods)
    ev["sample_every"] = str(cfg.sample_every)
    ev["boundary_mass_limit"] = repr(cfg.boundary_mass_limit)
    cp["evolve"] = ev
    d = cfg.diffusion
    if d.D is not None:
        cp["decoherence"] = {"d": repr(d.D)}
    else:
        cp["decoherence"] = {"gamma": repr(d.gamma), "mass_env": repr(d.mass_env), "kbt": repr(d.kbt)}
    out = {"formats": ", ".join(cfg.formats), "snapshot_every_periods": str(cfg.snapshot_every_periods)}
    if cfg.out_dir is not None:
        out = {"dir": cfg.out_dir, **out}
    cp["output"] = out
    return cp


def _num(section, key, raw) -> float:
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from None
    if not math.isfinite(v):
        raise ConfigError(f"[{section}] {key} must be finite")
    return v


def _int(section, key, raw) -> int:
    v = _num(section, key, raw)
    if not v.is_integer():
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer")
    return int(v)


def _bool(section, key, raw) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"[{section}] {key} = {raw!r} is not a boolean")


def _from_parser(cp: configparser.ConfigParser) -> RunConfig:
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key [{section}] {key}")
    for section, keys in _REQUIRED.items():
        for key in keys:
            if not cp.has_option(section, key):
                raise ConfigError(f"missing required config key [{section}] {key}")

    def get(section, key):
        return cp.get(section, key) if cp.has_option(section, key) else None

    grid = PhaseSpaceGrid(_int("grid", "nx", get("grid", "nx")), _int("grid", "np", get("grid", "np")),
                          *(_num("grid", k, get("grid", k)) for k in ("x_min", "x_max", "p_min", "p_max")))
    params = SystemParams(*(_num("params", k, get("params", k)) for k in ("m", "a", "b", "lambda", "omega", "hbar")))

    x0, p0 = _num("init", "x0", get("init", "x0")), _num("init", "p0", get("init", "p0"))
    min_unc = _bool("init", "minimum_uncertainty", get("init", "minimum_uncertainty") or "false")
    sx, sp = get("init", "sigma_x"), get("init", "sigma_p")
    sx = None if sx is None else _num("init", "sigma_x", sx)
    sp = None if sp is None else _num("init", "sigma_p", sp)
    if min_unc:
        if sx is None:
            sx = math.sqrt(params.hbar / 2)
        if sp is None:
            sp = params.hbar / (2 * sx)
        init = GaussianSpec(x0, p0, sx, sp, True, params.hbar)
    else:
        if sx is None or sp is None:
            raise ConfigError("[init] needs sigma_x and sigma_p unless minimum_uncertainty = true")
        init = GaussianSpec(x0, p0, sx, sp)

    period = driving_period(params)
    raw_dt = get("evolve", "dt").strip()
    frac = _PERIOD_FRACTION.match(raw_dt)
    if frac:
        if int(frac.group(1)) == 0:
            raise ConfigError("[evolve] dt = T/0 is not allowed")
        dt = period / int(frac.group(1))
    else:
        dt = _num("evolve", "dt", raw_dt)
    if not dt > 0:
        raise ConfigError(f"[evolve] dt must be positive, got {raw_dt}")
    mode = (get("evolve", "mode") or "quantum").strip()
    if mode not in ("quantum", "classical"):
        raise ConfigError(f"[evolve] mode must be quantum or classical, got {mode!r}")
    tp, ta = get("evolve", "t_final_periods"), get("evolve", "t_final_abs")
    if (tp is None) == (ta is None):
        raise ConfigError("[evolve] needs exactly one of t_final_periods and t_final_abs")
    tp = None if tp is None else _num("evolve", "t_final_periods", tp)
    ta = None if ta is None else _num("evolve", "t_final_abs", ta)
    if (tp is not None and tp < 0) or (ta is not None and ta < 0):
        raise ConfigError("[evolve] final time must be nonnegative")
    sample_every = _int("evolve", "sample_every", get("evolve", "sample_every") or "1")
    if sample_every < 1:
        raise ConfigError("[evolve] sample_every must be at least 1")
    bml = _num("evolve", "boundary_mass_limit", get("evolve", "boundary_mass_limit") or "1e-6")

    dec = {k: _num("decoherence", k, v) for k, v in (cp["decoherence"].items() if cp.has_section("decoherence") else [])}
    if "d" in dec and len(dec) > 1:
        raise ConfigError("[decoherence] give either d or gamma/mass_env/kbt, not both")
    if not dec:
        raise ConfigError("missing required config key [decoherence] d (or gamma, mass_env, kbt)")
    if "d" in dec:
        diffusion = DiffusionSpec(D=dec["d"])
    else:
        missing = {"gamma", "mass_env", "kbt"} - dec.keys()
        if missing:
            raise ConfigError(f"missing required config key [decoherence] {sorted(missing)[0]}")
        diffusion = DiffusionSpec(gamma=dec["gamma"], mass_env=dec["mass_env"], kbt=dec["kbt"])

    formats = tuple(f.strip() for f in (get("output", "formats") or ",".join(FORMATS)).split(",") if f.strip())
    bad = set(formats) - set(FORMATS)
    if bad:
        raise ConfigError(f"[output] unknown formats {sorted(bad)}; choose from {FORMATS}")
    snap = _int("output", "snapshot_every_periods", get("output", "snapshot_every_periods") or "1")
    if snap < 0:
        raise ConfigError("[output] snapshot_every_periods must be nonnegative")

    return RunConfig(grid, params, init, mode, dt, tp, ta, sample_every, diffusion,
                     get("output", "dir"), formats, snap, bml)


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    return _from_parser(cp)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def preset_path(name: str) -> Path:
    path = PRESET_DIR / f"{name}.cfg"
    if not path.is_file():
        available = sorted(p.stem for p in PRESET_DIR.glob("*.cfg"))
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(available)}")
    return path


def load_preset(name: str) -> RunConfig:
    return load_config(preset_path(name))


def list_presets() -> list[str]:
    return sorted(p.stem for p in PRESET_DIR.glob("*.cfg"))
