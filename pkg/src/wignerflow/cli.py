"""Command line entry point: ``wignerflow {run,compare,sweep,info}``.

Exit status: 0 on success, 1 for configuration errors, 2 for numerical
failures during evolution.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings

from . import __version__, _kernels
from .config import RunConfig, list_presets, load_config, load_preset, preset_path
from .errors import ConfigError, ContractError, NumericalError
from .evolvers import set_fft_workers, steps_for

log = logging.getLogger("wignerflow")


def _add_common(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH", help="config file")
    src.add_argument("--preset", metavar="NAME", help=f"bundled preset ({', '.join(list_presets())})")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides [output] dir)")
    p.add_argument("--threads", metavar="N", type=int, default=1,
                   help="worker threads for transforms and sweep jobs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wignerflow", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wignerflow {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="evolve one distribution and write dumps, CSV, heatmaps")
    _add_common(p)
    p = sub.add_parser("compare", help="quantum D=0, quantum D=d, classical D=d, plus screening verdict")
    _add_common(p)
    p = sub.add_parser("sweep", help="repeat compare over values of one config entry")
    _add_common(p)
    p.add_argument("--key", required=True, help="section.key to vary, e.g. decoherence.d")
    p.add_argument("--values", required=True, help="comma-separated values")
    p = sub.add_parser("info", help="show the resolved configuration and run size")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", metavar="PATH")
    src.add_argument("--preset", metavar="NAME")
    return parser


def _load(args) -> RunConfig:
    return load_config(args.config) if args.config else load_preset(args.preset)


def _out_dir(args, cfg: RunConfig) -> str:
    out = args.out or cfg.out_dir
    if not out:
        raise ConfigError("no output directory: pass --out or set [output] dir")
    return out


def _info(args) -> None:
    print(f"wignerflow {__version__} (kernels: {_kernels.BACKEND})")
    print(f"presets: {', '.join(list_presets())}")
    if not (args.config or args.preset):
        return
    cfg = _load(args)
    g = cfg.grid
    n, dt = steps_for(cfg.t_final, cfg.dt) if cfg.t_final > 0 else (0, cfg.dt)
    print(f"source: {args.config or preset_path(args.preset)}")
    print(f"grid: {g.nx} x {g.np_}, dx = {g.dx:.6g}, dp = {g.dp:.6g}")
    print(f"driving period T = {cfg.period:.10g}; t_final = {cfg.t_final:.10g} ({cfg.t_final / cfg.period:.6g} T)")
    print(f"steps: {n} of dt = {dt:.6g} ({cfg.period / dt:.6g} per period)")
    print(f"D = {cfg.diffusion.value!r}")
    print()
    print(cfg.to_text(), end="")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "info":
            _info(args)
            return 0
        from . import runner
        set_fft_workers(args.threads)
        cfg = _load(args)
        out = _out_dir(args, cfg)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            if args.command == "run":
                runner.cmd_run(cfg, out)
                print(f"wrote {out}")
            elif args.command == "compare":
                res = runner.cmd_compare(cfg, out)
                print(res.report_text(), end="")
            elif args.command == "sweep":
                values = [v.strip() for v in args.values.split(",") if v.strip()]
                rows = runner.cmd_sweep(cfg, args.key, values, out, threads=args.threads)
                for r in rows:
                    print(f"{args.key}={r['value']}: d_iso={r['d_iso']:.6g} d_dec={r['d_dec']:.6g} "
                          f"emergent={str(r['emergent']).lower()}")
    except (ConfigError, ContractError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
