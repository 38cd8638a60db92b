"""Compare the numba and numpy kernel paths.

    python benchmarks/bench_kernels.py [--nx 1024 --np 512 --particles 100000 --repeat 5]

Kernel timings run both paths in one process. The ``--step`` option also
times a whole evolver step in two subprocesses, one with
WIGNERFLOW_DISABLE_NUMBA=1, since the backend is fixed at import.
"""

import argparse
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from wignerflow import _kernels

STEP_SNIPPET = """
import timeit
from wignerflow import _kernels
from wignerflow.config import load_preset
from wignerflow.evolvers import Propagator
from wignerflow.phase_space import init_gaussian
cfg = (load_preset("fig1").with_value("grid.nx", "{nx}").with_value("grid.np", "{np}")
       .with_value("evolve.boundary_mass_limit", "1"))
prop = Propagator(cfg.grid, cfg.evolver_config(D=0.025))
f = init_gaussian(cfg.grid, cfg.init)
prop.step(f)
t = min(timeit.repeat(lambda: prop.step(f), number=1, repeat={repeat}))
print(_kernels.BACKEND, t)
"""


def best(fn, repeat):
    fn()  # warm up (and compile)
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nx", type=int, default=1024)
    ap.add_argument("--np", type=int, default=512)
    ap.add_argument("--particles", type=int, default=100_000)
    ap.add_argument("--steps", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--step", action="store_true", help="also time a full evolver step per backend")
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        sys.exit("numba is unavailable (or disabled); nothing to compare")

    rng = np.random.default_rng(0)
    x = np.linspace(-6.5, 6.5, args.nx)
    lam = np.arange(args.np // 2 + 1) * (2 * math.pi / 44.0)
    spec0 = rng.standard_normal((args.nx, lam.size)) + 1j * rng.standard_normal((args.nx, lam.size))
    values = rng.standard_normal((args.nx, args.np))
    mom = (0.05, 0.5, 10.0, 3.0, 0.025, 0.004)

    n = args.particles
    xp, pp = rng.standard_normal(n), rng.standard_normal(n)
    noise = rng.standard_normal((args.steps, n))
    lv = (0.0, 1e-3, 1.0, 10.0, 0.5, 10.0, 6.07, 0.007, (65.0, 220.0))

    cases = {
        "momentum step": (lambda: _kernels.apply_momentum_step(spec0.copy(), x, lam, *mom),
                          lambda: _kernels.apply_momentum_step_numpy(spec0.copy(), x, lam, *mom)),
        "boundary mass": (lambda: _kernels.boundary_mass(values, 2),
                          lambda: _kernels.boundary_mass_numpy(values, 2)),
        "langevin chunk": (lambda: _kernels.langevin_steps(xp.copy(), pp.copy(), np.ones(n, bool), noise, *lv),
                           lambda: _kernels.langevin_steps_numpy(xp.copy(), pp.copy(), np.ones(n, bool), noise, *lv)),
    }
    print(f"grid {args.nx} x {args.np}, {n} particles x {args.steps} steps, best of {args.repeat}")
    print(f"{'kernel':<16}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, (fast, ref) in cases.items():
        a, b = best(fast, args.repeat), best(ref, args.repeat)
        print(f"{name:<16}{1e3 * a:12.2f}{1e3 * b:12.2f}{b / a:10.1f}")

    if args.step:
        code = STEP_SNIPPET.format(nx=args.nx, np=args.np, repeat=args.repeat)
        for flag in ("0", "1"):
            env = dict(os.environ, WIGNERFLOW_DISABLE_NUMBA=flag)
            out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                                 text=True, check=True).stdout.split()
            print(f"full step ({out[0]}): {1e3 * float(out[1]):.1f} ms")


if __name__ == "__main__":
    main()
