"""DC OPF assembly, solution mapping and quantities of interest."""

import dataclasses

import numpy as np
import pytest

from gridrisk.dcopf import (Scenario, assemble_lp, derive_qois,
                            rate_limits_from_nominal, scenario_reserve,
                            solve_dcopf, solve_dcopf_batch, wind_by_bus,
                            zonal_reserve, zonal_reserves)
from gridrisk.errors import SolverError, ValidationError
from gridrisk.grid import (Branch, Bus, Generator, Grid, contiguous_zones,
                           designate_wind, load_case, partition_zones,
                           validate)

from _helpers import random_scenario, random_toy_grid, two_bus_grid


def scen(grid, loads, wind=()):
    return Scenario(loads=np.asarray(loads, dtype=float),
                    wind=np.asarray(wind, dtype=float))


class TestTwoBus:
    def test_nominal(self):
        g = two_bus_grid()
        sol = solve_dcopf(g, scen(g, [0.0, 50.0]))
        assert sol.status == "optimal"
        assert sol.dispatch == pytest.approx([50.0])
        assert sol.flows == pytest.approx([50.0])
        assert sol.angles == pytest.approx([0.0, -0.05])
        assert sol.objective == pytest.approx(500.0)
        assert sol.slack_injection == pytest.approx(0.0, abs=1e-9)

    def test_shedding_at_capacity(self):
        g = two_bus_grid(limit=200.0)
        sol = solve_dcopf(g, scen(g, [0.0, 150.0]))
        assert sol.status == "shed"
        assert sol.dispatch == pytest.approx([100.0])
        assert sol.slack_injection == pytest.approx(50.0)
        # the penalty never leaks into the reported generation cost
        assert sol.objective == pytest.approx(1000.0)

    def test_congestion_infeasible(self):
        # plenty of capacity, but the load sits behind a 100 MW line and the
        # slack injection lives at the slack bus: nothing can shed remote load
        g = two_bus_grid(limit=100.0, p_max=300.0)
        sol = solve_dcopf(g, scen(g, [0.0, 150.0]))
        assert sol.status == "infeasible"
        assert sol.dispatch is None and sol.objective is None

    def test_wind_netting(self):
        g = two_bus_grid()
        g.generators.append(Generator(2, 0.0, 60.0, 0.0, kind="wind"))
        sol = solve_dcopf(g, scen(g, [0.0, 50.0], wind=[30.0]))
        assert sol.dispatch == pytest.approx([20.0])
        assert sol.flows == pytest.approx([20.0])
        assert sol.objective == pytest.approx(200.0)


class TestAssembly:
    def test_variable_layout(self):
        g = two_bus_grid()
        lp, st = assemble_lp(g, scen(g, [0.0, 50.0]))
        # one generator, the two slack-injection parts, one non-slack angle
        assert lp.n_vars == 4
        assert st.n_disp == 1
        assert (st.col_ps_plus, st.col_ps_minus) == (1, 2)
        assert lp.A_eq.shape == (2, 4)
        assert lp.A_ub.shape == (2, 4)  # one limited branch, two directions

    def test_unlimited_branch_has_no_rows(self):
        g = two_bus_grid()
        g.branches[0] = dataclasses.replace(g.branches[0], flow_limit=np.inf)
        lp, st = assemble_lp(g, scen(g, [0.0, 50.0]))
        assert lp.A_ub.shape[0] == 0
        assert st.limited_branches == []

    def test_scenario_validation(self):
        g = two_bus_grid()
        with pytest.raises(ValidationError, match="every bus"):
            assemble_lp(g, scen(g, [0.0]))
        with pytest.raises(ValidationError, match="wind"):
            assemble_lp(g, scen(g, [0.0, 1.0], wind=[5.0]))
        with pytest.raises(ValidationError, match="negative load"):
            assemble_lp(g, scen(g, [-1.0, 1.0]))
        g.generators.append(Generator(2, 0.0, 60.0, 0.0, kind="wind"))
        with pytest.raises(ValidationError, match="outside"):
            assemble_lp(g, scen(g, [0.0, 1.0], wind=[90.0]))

    def test_wind_by_bus(self):
        g = two_bus_grid()
        g.generators.append(Generator(2, 0.0, 60.0, 0.0, kind="wind"))
        g.generators.append(Generator(2, 0.0, 40.0, 0.0, kind="wind"))
        out = wind_by_bus(g, scen(g, [0.0, 1.0], wind=[25.0, 10.0]))
        assert out == pytest.approx([0.0, 35.0])


class TestPhysicalConsistency:
    """Solved scenarios must satisfy the power-flow physics they encode."""

    @pytest.mark.parametrize("seed", range(12))
    def test_balance_bounds_flows(self, seed):
        rng = np.random.default_rng(seed)
        grid = random_toy_grid(rng)
        sc = random_scenario(grid, rng)
        sol = solve_dcopf(grid, sc)
        if sol.status == "infeasible":
            return
        index = grid.bus_index()
        inj = -np.asarray(sc.loads, dtype=float).copy()
        inj += wind_by_bus(grid, sc)
        for g, p in zip(grid.dispatchable_generators, sol.dispatch):
            inj[index[g.bus]] += p
        inj[grid.slack_index()] += sol.slack_injection
        for br, f in zip(grid.branches, sol.flows):
            if br.in_service:
                inj[index[br.from_bus]] -= f
                inj[index[br.to_bus]] += f
        assert np.max(np.abs(inj)) < 1e-6  # MW

        for g, p in zip(grid.dispatchable_generators, sol.dispatch):
            assert g.p_min - 1e-6 <= p <= g.p_max + 1e-6
        for br, f in zip(grid.branches, sol.flows):
            if br.in_service and np.isfinite(br.flow_limit):
                assert abs(f) <= br.flow_limit + 1e-6

    def test_batch_is_deterministic_and_valid(self):
        rng = np.random.default_rng(99)
        grid = random_toy_grid(rng, max_buses=5)
        scens = [random_scenario(grid, rng) for _ in range(15)]
        a = solve_dcopf_batch(grid, scens)
        b = solve_dcopf_batch(grid, scens)
        for sa, sb in zip(a, b):
            assert sa.status == sb.status
            if sa.dispatch is not None:
                assert np.array_equal(sa.dispatch, sb.dispatch)
        # warm-started optima match fresh solves on objective
        for sc, sa in zip(scens, a):
            fresh = solve_dcopf(grid, sc)
            assert fresh.status == sa.status
            if sa.objective is not None:
                assert sa.objective == pytest.approx(fresh.objective,
                                                     abs=1e-6, rel=1e-9)


class TestQoIs:
    def test_reserve_and_shedding(self):
        g = two_bus_grid()
        g.generators.append(Generator(2, 0.0, 60.0, 0.0, kind="wind"))
        sc = scen(g, [0.0, 50.0], wind=[30.0])
        sol = solve_dcopf(g, sc)
        q = derive_qois(g, sc, sol)
        # capacity 100 against net demand 50 - 30
        assert q.reserve == pytest.approx(80.0)
        assert q.shedding == 0.0
        assert q.total_cost == pytest.approx(200.0)

    def test_reserve_floors_at_zero(self):
        g = two_bus_grid(p_max=40.0, limit=500.0)
        sc = scen(g, [0.0, 90.0])
        assert scenario_reserve(g, sc) == 0.0
        sol = solve_dcopf(g, sc)
        assert sol.status == "shed"
        q = derive_qois(g, sc, sol)
        assert q.shedding == pytest.approx(50.0)

    def test_infeasible_has_no_qois(self):
        g = two_bus_grid(limit=100.0, p_max=300.0)
        sc = scen(g, [0.0, 150.0])
        sol = solve_dcopf(g, sc)
        with pytest.raises(SolverError):
            derive_qois(g, sc, sol)

    def test_zonal_reserve(self):
        g = Grid(
            buses=[Bus(1, "slack", 10.0), Bus(2, "PQ", 40.0), Bus(3, "PQ", 30.0)],
            branches=[Branch(1, 2, 0.1, 500.0), Branch(2, 3, 0.1, 500.0)],
            generators=[Generator(1, 0.0, 100.0, 10.0, kind="slack"),
                        Generator(3, 0.0, 50.0, 20.0),
                        Generator(3, 0.0, 30.0, 0.0, kind="wind")],
        )
        validate(g)
        zp = partition_zones(g, {1: 1, 2: 1, 3: 2})
        sc = scen(g, [10.0, 40.0, 30.0], wind=[12.0])
        zr = zonal_reserves(g, sc, zp)
        assert zr[1] == pytest.approx(100.0 - 50.0)
        assert zr[2] == pytest.approx(50.0 - (30.0 - 12.0))
        with pytest.raises(ValidationError, match="zone"):
            zonal_reserves(g, sc)  # grid.zones not set
        g2 = dataclasses.replace(g, zones=zp)
        assert zonal_reserves(g2, sc) == zr
        assert zonal_reserve(g2, sc, 2) == pytest.approx(zr[2])
        with pytest.raises(ValidationError, match="unknown zone"):
            zonal_reserve(g2, sc, 7)

    def test_zonal_reserve_matches_system_for_one_zone(self):
        g = designate_wind(load_case("case9sx"), 0.25, seed=1)
        zp = partition_zones(g, contiguous_zones(g, 1))
        rng = np.random.default_rng(0)
        sc = random_scenario(g, rng)
        assert zonal_reserve(g, sc, 1, zp) == pytest.approx(scenario_reserve(g, sc))


class TestRateTooling:
    def test_limits_from_nominal(self):
        g = two_bus_grid(limit=100.0)
        rated = rate_limits_from_nominal(g, margin=1.5, floor_mw=10.0)
        # nominal flow is the 50 MW base load transfer
        assert rated.branches[0].flow_limit == pytest.approx(75.0)
        rated = rate_limits_from_nominal(g, margin=1.5, floor_mw=90.0)
        assert rated.branches[0].flow_limit == pytest.approx(90.0)
        with pytest.raises(ValidationError, match="margin"):
            rate_limits_from_nominal(g, margin=0.9)
