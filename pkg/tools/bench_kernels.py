"""Time the numpy simplex kernel against the compiled one.

Runs the same warm-chained OPF workload through both backends and prints
per-solve wall time plus the speedup. Cold solves (no warm basis) are timed
separately since they take a different code path through phase 1.

Usage: python3 tools/bench_kernels.py [--case case118sx] [--samples 30]
"""

import argparse
import os
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gridrisk import _kernels
from gridrisk.dcopf import solve_dcopf
from gridrisk.grid import designate_wind, load_case
from gridrisk.scenario import default_uniform_bounds, generate_scenarios


def bench(grid, scenarios, kernel, warm):
    times = []
    state = None
    for s in scenarios:
        t0 = time.perf_counter()
        sol = solve_dcopf(grid, s, warm_state=state, kernel=kernel)
        times.append(time.perf_counter() - t0)
        if warm:
            state = sol.warm_state
    return np.array(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--case", default="case118sx")
    ap.add_argument("--samples", type=int, default=30)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--wind", type=float, default=0.25)
    args = ap.parse_args(argv)

    grid = load_case(args.case)
    if args.wind > 0:
        grid = designate_wind(grid, fraction=args.wind, seed=3)
    spec = default_uniform_bounds(grid, load_band=(0.85, 1.05))
    _, scen = generate_scenarios(grid, spec, args.samples, seed=args.seed)

    names = _kernels.available()
    if "compiled" not in names:
        print("compiled kernel not built; timing the numpy kernel alone")
    print(f"{args.case}: {grid.n_buses} buses, {len(grid.branches)} branches, "
          f"{args.samples} scenarios per run")

    results = {}
    for mode in ("warm", "cold"):
        print(f"\n{mode} starts")
        for name in names:
            t = bench(grid, scen, _kernels.get(name), warm=(mode == "warm"))
            results[(mode, name)] = t
            print(f"  {name:9s} median {np.median(t) * 1e3:8.2f} ms   "
                  f"mean {t.mean() * 1e3:8.2f} ms   total {t.sum():6.2f} s")
        if "compiled" in names:
            ratio = (np.median(results[(mode, 'python')])
                     / np.median(results[(mode, 'compiled')]))
            print(f"  speedup {ratio:.2f}x (median python / median compiled)")


if __name__ == "__main__":
    main()
