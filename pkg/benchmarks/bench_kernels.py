"""Compare the compiled and pure-Python RK4 kernels on the Fig. 2 run.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--dt DT]
"""

import argparse
import timeit

import numpy as np

from lambdachirp import kernels
from lambdachirp.dynamics import integrate
from lambdachirp.figures import figure_config


def bench(backend: str, config, repeat: int):
    kernels.set_backend(backend)
    traj = integrate(config)
    best = min(timeit.repeat(lambda: integrate(config), number=1, repeat=repeat))
    return best, traj


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--dt", type=float, default=5e-4)
    args = parser.parse_args()

    config = figure_config(2, dt=args.dt)
    nsteps = round((config.t_end - config.t_start) / config.dt)
    print(f"Fig. 2 run: {nsteps} RK4 steps, best of {args.repeat}")

    results = {name: bench(name, config, args.repeat) for name in kernels.available()}
    for name, (secs, _) in results.items():
        print(f"  {name:9s} {secs:8.4f} s  {nsteps / secs / 1e6:7.3f} Msteps/s")

    if len(results) == 2:
        (tc, trc), (tp, trp) = results["compiled"], results["python"]
        same = np.array_equal(trc.rho, trp.rho)
        print(f"  speedup   {tp / tc:8.1f}x   bit-identical: {same}")
    else:
        print("  compiled extension not built; only the Python fallback was timed")


if __name__ == "__main__":
    main()
