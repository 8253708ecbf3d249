"""Generate the bundled synthetic cases.

The public index-case archives cannot be fetched in this build environment,
so the package ships dimension-matched stand-ins: same bus/branch/generator
counts and comparable load levels as the familiar 118- and 300-bus test
systems, but synthetic topology and parameters. Names carry an "sx" suffix
so nobody mistakes them for the originals. Line ratings are set from an
unconstrained dispatch at base load (margin * |nominal flow|) so that the
cases are feasible with moderate congestion.

Writes .m files into src/gridrisk/data/. Deterministic: fixed seeds.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from dataclasses import replace

from gridrisk.dcopf import Scenario, solve_dcopf_batch
from gridrisk.grid import (Branch, Bus, Generator, Grid, designate_wind,
                           grid_to_case_text, parse_case, validate)

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "gridrisk", "data")


def envelope_limits(grid, margin, floor_mw, seed, n_probe=48):
    """Rate branches at ``margin`` times the largest unconstrained flow seen
    over probe scenarios (load swings plus wind at assorted levels, using the
    same wind designation the bundled demo configuration uses). Keeps the
    cases feasible under in-distribution sampling with congestion present
    but not dominant."""
    gw = designate_wind(grid, 0.2, 42)
    unlimited = replace(gw, branches=[replace(br, flow_limit=np.inf)
                                      for br in gw.branches])
    rng = np.random.default_rng(seed)
    base = grid.base_loads()
    nw = len(gw.wind_generators)
    pmax_w = np.array([g.p_max for g in gw.wind_generators])
    scens = [Scenario(loads=base, wind=np.zeros(nw))]
    for _ in range(n_probe):
        loads = np.maximum(base * rng.normal(1.0, 0.18, size=len(base)), 0.0)
        level = rng.choice([0.0, 0.3, 0.7, 1.0])
        wind = pmax_w * level * rng.uniform(0.5, 1.0, size=nw)
        scens.append(Scenario(loads=loads, wind=wind))
    sols = solve_dcopf_batch(unlimited, scens)
    env = np.max(np.abs(np.array([s.flows for s in sols])), axis=0)
    return replace(grid, branches=[
        replace(br, flow_limit=round(max(margin * e, floor_mw), 2))
        for br, e in zip(grid.branches, env)])


def ring_and_chords(n_buses, n_branches, rng):
    """Connected topology: a ring over all buses plus random chords."""
    edges = [(i, (i + 1) % n_buses) for i in range(n_buses)]
    have = {tuple(sorted(e)) for e in edges}
    while len(edges) < n_branches:
        i, j = rng.integers(0, n_buses, size=2)
        key = tuple(sorted((int(i), int(j))))
        if i == j or key in have:
            continue
        have.add(key)
        edges.append((int(i), int(j)))
    return edges


def build_case(name, n_buses, n_branches, n_gens, total_load, total_cap,
               margin, seed):
    rng = np.random.default_rng(seed)
    edges = ring_and_chords(n_buses, n_branches, rng)

    gen_buses = rng.choice(np.arange(1, n_buses), size=n_gens - 1, replace=False)
    gen_buses = [0] + sorted(int(b) for b in gen_buses)  # bus 0 hosts the slack unit

    # a few large units, the rest mid-sized; scaled to the capacity target
    raw = np.concatenate([rng.uniform(3.0, 5.0, size=max(n_gens // 8, 1)),
                          rng.uniform(0.8, 2.5, size=n_gens - max(n_gens // 8, 1))])
    p_max = raw / raw.sum() * total_cap
    costs = np.round(rng.uniform(10.0, 40.0, size=n_gens), 4)

    load_raw = rng.uniform(0.2, 1.0, size=n_buses)
    load_raw[rng.uniform(size=n_buses) < 0.15] = 0.0  # some pure transit buses
    loads = load_raw / load_raw.sum() * total_load

    buses = [Bus(id=i + 1, kind="slack" if i == 0 else "PQ",
                 base_load=round(float(loads[i]), 3)) for i in range(n_buses)]
    branches = [Branch(from_bus=i + 1, to_bus=j + 1,
                       reactance_x=round(float(rng.uniform(0.02, 0.2)), 5),
                       flow_limit=np.inf) for i, j in edges]
    generators = [Generator(bus=b + 1, p_min=0.0,
                            p_max=round(float(p), 2),
                            marginal_cost=float(c),
                            kind="slack" if b == 0 else "dispatchable")
                  for b, p, c in zip(gen_buses, p_max, costs)]
    grid = validate(Grid(buses=buses, branches=branches, generators=generators,
                         base_mva=100.0, name=name))
    grid = envelope_limits(grid, margin=margin, floor_mw=25.0, seed=seed + 1)
    return validate(grid)


def main():
    os.makedirs(DATA, exist_ok=True)
    cases = [
        # name, buses, branches, gens, load MW, capacity MW, margin, seed
        ("case9sx", 9, 9, 3, 315.0, 820.0, 1.50, 909),
        ("case118sx", 118, 186, 54, 4242.0, 9966.0, 1.35, 11811),
        ("case300sx", 300, 411, 69, 23525.0, 32700.0, 1.35, 30011),
    ]
    for name, nb, nl, ng, load, cap, margin, seed in cases:
        grid = build_case(name, nb, nl, ng, load, cap, margin, seed)
        text = grid_to_case_text(grid)
        back = parse_case(text)
        assert back == grid, f"{name}: case text round trip changed the grid"
        path = os.path.join(DATA, f"{name}.m")
        with open(path, "w") as fh:
            fh.write(text)
        print(f"{name}: {nb} buses, {nl} branches, {ng} gens, "
              f"load {load:.0f} MW -> {path}")


if __name__ == "__main__":
    main()
