"""Calibrate and write the bundled case118sx demo run config.

The interesting knobs of a risk study (zonal reserve thresholds, the
overload threshold, consequence costs) only mean something relative to what
the network actually does under the forecast distribution, so this script
runs a pilot OPF ensemble under the demo copula and sets:

  - system and per-zone MRR at chosen quantiles of the pilot reserve, so
    the reserve-inadequacy probabilities sit at informative mid-range values
    instead of 0 or 1;
  - epsilon such that a couple dozen branches carry overload probability
    >= 0.01 (error comparisons over branch probabilities need a populated
    branch set);
  - consequence costs that land reserve and branch risks in readable
    dollar ranges.

Writes src/gridrisk/data/demo_case118.json. Deterministic: fixed seeds.
"""

import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from gridrisk.grid import (contiguous_zones, designate_wind, load_case,
                           partition_zones)
from gridrisk.risk import (ensemble_from_opf, overall_branch_risk,
                           prob_branch_overload, prob_reserve_inadequacy)
from gridrisk.scenario import default_copula_spec, generate_scenarios

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "gridrisk", "data")

CASE = "case118sx"
WIND_FRACTION = 0.25
WIND_SEED = 3
N_ZONES = 3
PILOT_M = 2000
ASSESS_SEED = 2

# target reserve-inadequacy probabilities; mid-range on purpose
P_TARGET = {"system": 0.18, 1: 0.12, 2: 0.16, 3: 0.21}
BRANCHES_WANTED = 20     # branches with overload probability >= 0.01
RESERVE_COST = 50000.0   # $ per reserve-shortfall event


def main():
    grid = load_case(CASE)
    grid = designate_wind(grid, fraction=WIND_FRACTION, seed=WIND_SEED)
    import dataclasses
    grid = dataclasses.replace(
        grid, zones=partition_zones(grid, contiguous_zones(grid, N_ZONES)))
    spec = default_copula_spec(grid)

    print(f"pilot: {PILOT_M} copula scenarios, seed {ASSESS_SEED}")
    _, scenarios = generate_scenarios(grid, spec, PILOT_M, seed=ASSESS_SEED)
    ensemble, dropped = ensemble_from_opf(grid, scenarios)
    if dropped:
        raise SystemExit(
            f"{len(dropped)} of {PILOT_M} pilot scenarios were "
            "infeasible; the demo config must run clean, adjust the copula")
    print(f"  all {ensemble.M} scenarios feasible")

    mrr = {}
    for scope, target in P_TARGET.items():
        reserve = ensemble.reserve_for_scope(scope)
        mrr[scope] = round(float(np.quantile(reserve, target)), 1)
        p, _ = prob_reserve_inadequacy(ensemble, mrr[scope], scope)
        print(f"  scope {scope}: MRR {mrr[scope]:.1f} MW -> "
              f"P {p:.4f} (target {target})")

    # epsilon: smallest-count-gap scan, preferring the stricter threshold
    best = None
    for eps in np.arange(0.50, 0.991, 0.005):
        p = prob_branch_overload(ensemble, grid, float(eps))
        count = int(np.count_nonzero(p >= 0.01))
        gap = abs(count - BRANCHES_WANTED)
        if best is None or gap <= best[0]:
            best = (gap, float(round(eps, 3)), count)
    _, epsilon, count = best
    print(f"  epsilon {epsilon}: {count} branches with P >= 0.01")

    unit_risk, undefined = overall_branch_risk(
        ensemble, grid, epsilon, np.ones(len(ensemble.branch_slots)))
    branch_cost = float(f"{8000.0 / unit_risk.max():.3g}")
    print(f"  branch cost {branch_cost} -> max branch risk "
          f"{unit_risk.max() * branch_cost:.0f} $ "
          f"({len(undefined)} undefined conditional rows)")

    config = {
        "format": "gridrisk-run",
        "version": 1,
        "grid": CASE,
        "out_dir": "demo_run",
        "wind": {"fraction": WIND_FRACTION, "seed": WIND_SEED},
        "zones": {"count": N_ZONES},
        "training_bounds": {"load_band": [0.8, 1.2]},
        "copula": {},
        "train": {"epochs": 500, "batch_size": 32, "learning_rate": 1e-3,
                  "width": 64, "seed": 0, "validation_fraction": 0.15},
        "risk": {
            "epsilon": epsilon,
            "mrr_override": {str(k): v for k, v in mrr.items()},
            "default_reserve_cost": RESERVE_COST,
            "default_branch_cost": branch_cost,
        },
        "samples": {"train": 1000, "assess": PILOT_M},
        "seeds": {"dataset": 1, "assess": ASSESS_SEED},
        "sweep": {"factors": [1.0, 1.05, 1.1, 1.15, 1.2, 1.25]},
    }
    path = os.path.join(DATA, "demo_case118.json")
    with open(path, "w") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
