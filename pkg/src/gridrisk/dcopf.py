"""DC optimal power flow on top of the LP kernel.

One scenario = nodal loads plus available wind power. Wind is injected in
full (negative load); the dispatchable fleet is optimized against linear
costs subject to nodal balance, generator limits and line limits in both
flow directions. A signed slack injection at the slack bus, split into
nonnegative shortage/surplus parts so the penalty prices its magnitude,
keeps the LP feasible when the fleet cannot balance the system; a positive
net value is unserved load (shedding).

All public quantities are MW and dollars; the LP itself is assembled in
per-unit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError, ValidationError
from .grid import Grid, build_susceptance
from .lp import INFEASIBLE, ITERATION_LIMIT, OPTIMAL, LinearProgram, solve_lp

PENALTY_FACTOR = 1e4     # slack-injection price as a multiple of the costliest unit
SHED_TOL_MW = 1e-6       # net slack injection below this is numerical noise
THETA_BOUND = 1e3        # box bound (rad) standing in for free angle variables

STATUS_OPTIMAL = "optimal"
STATUS_SHED = "shed"
STATUS_INFEASIBLE = "infeasible"


@dataclass
class Scenario:
    """Exogenous operating point: loads per bus (grid order) and available
    wind power per wind generator (order of ``grid.wind_generators``), MW."""

    loads: np.ndarray
    wind: np.ndarray

    def total_load(self):
        return float(np.sum(self.loads))

    def total_wind(self):
        return float(np.sum(self.wind))


@dataclass
class OpfStructure:
    """Column/row bookkeeping of the assembled LP."""

    disp_idx: list[int]      # positions of dispatched generators in grid.generators
    n_disp: int
    col_ps_plus: int
    col_ps_minus: int
    angle_cols: dict[int, int]   # bus index -> column (slack bus absent)
    limited_branches: list[int]  # branch positions with flow-limit rows


@dataclass
class OpfSolution:
    status: str
    dispatch: np.ndarray | None      # MW per dispatched generator
    flows: np.ndarray | None         # MW per branch, 0 for out-of-service
    angles: np.ndarray | None        # rad per bus, slack pinned at 0
    slack_injection: float | None    # MW, positive = unserved load
    objective: float | None          # $/h generation cost, penalty excluded
    iterations: int = 0
    warm_state: tuple | None = None


def _check_scenario(grid: Grid, scenario: Scenario):
    if len(scenario.loads) != grid.n_buses:
        raise ValidationError("scenario loads must cover every bus")
    wind_gens = grid.wind_generators
    if len(scenario.wind) != len(wind_gens):
        raise ValidationError(
            f"scenario has {len(scenario.wind)} wind values for "
            f"{len(wind_gens)} wind generators")
    if not (np.all(np.isfinite(scenario.loads)) and np.all(np.isfinite(scenario.wind))):
        raise ValidationError("scenario values must be finite")
    if np.any(np.asarray(scenario.loads) < 0):
        raise ValidationError("negative load in scenario")
    for val, g in zip(scenario.wind, wind_gens):
        if val < -1e-9 or val > g.p_max + 1e-6:
            raise ValidationError(
                f"wind power {val} outside [0, {g.p_max}] at bus {g.bus}")


def wind_by_bus(grid: Grid, scenario: Scenario) -> np.ndarray:
    """Available wind power aggregated to buses, MW, grid bus order."""
    out = np.zeros(grid.n_buses)
    index = grid.bus_index()
    for val, g in zip(scenario.wind, grid.wind_generators):
        out[index[g.bus]] += val
    return out


def assemble_lp(grid: Grid, scenario: Scenario):
    """Build the OPF linear program for one scenario.

    Variable order: dispatched generators, slack shortage, slack surplus,
    then voltage angles of the non-slack buses. Returns (lp, structure).
    """
    _check_scenario(grid, scenario)
    base = grid.base_mva
    index = grid.bus_index()
    slack = grid.slack_index()
    B = build_susceptance(grid).matrix

    disp_idx = [k for k, g in enumerate(grid.generators) if g.kind != "wind"]
    gens = [grid.generators[k] for k in disp_idx]
    nd = len(gens)
    if nd == 0:
        raise ValidationError("no dispatchable generators")

    angle_buses = [i for i in range(grid.n_buses) if i != slack]
    angle_cols = {i: nd + 2 + t for t, i in enumerate(angle_buses)}
    n_vars = nd + 2 + len(angle_buses)
    col_psp, col_psm = nd, nd + 1

    net_load = (np.asarray(scenario.loads, dtype=float)
                - wind_by_bus(grid, scenario)) / base

    n = grid.n_buses
    A_eq = np.zeros((n, n_vars))
    for col, g in enumerate(gens):
        A_eq[index[g.bus], col] = 1.0
    A_eq[slack, col_psp] = 1.0
    A_eq[slack, col_psm] = -1.0
    for i in range(n):
        for j in angle_buses:
            if B[i, j] != 0.0:
                A_eq[i, angle_cols[j]] = -B[i, j]
    b_eq = net_load

    limited = [k for k, br in enumerate(grid.branches)
               if br.in_service and np.isfinite(br.flow_limit)]
    A_ub = np.zeros((2 * len(limited), n_vars))
    b_ub = np.zeros(2 * len(limited))
    for t, k in enumerate(limited):
        br = grid.branches[k]
        y = 1.0 / br.reactance_x
        i, j = index[br.from_bus], index[br.to_bus]
        if i != slack:
            A_ub[2 * t, angle_cols[i]] = y
            A_ub[2 * t + 1, angle_cols[i]] = -y
        if j != slack:
            A_ub[2 * t, angle_cols[j]] = -y
            A_ub[2 * t + 1, angle_cols[j]] = y
        b_ub[2 * t] = b_ub[2 * t + 1] = br.flow_limit / base

    lb = np.empty(n_vars)
    ub = np.empty(n_vars)
    for col, g in enumerate(gens):
        lb[col], ub[col] = g.p_min / base, g.p_max / base
    big = (float(np.sum(scenario.loads)) + float(np.sum(scenario.wind))
           + sum(g.p_max for g in gens)) / base + 1.0
    lb[col_psp] = lb[col_psm] = 0.0
    ub[col_psp] = ub[col_psm] = big
    for i in angle_buses:
        lb[angle_cols[i]] = -THETA_BOUND
        ub[angle_cols[i]] = THETA_BOUND

    cost = np.zeros(n_vars)
    for col, g in enumerate(gens):
        cost[col] = g.marginal_cost * base
    penalty = PENALTY_FACTOR * max(1.0, max(g.marginal_cost for g in gens)) * base
    cost[col_psp] = cost[col_psm] = penalty

    lp = LinearProgram(c=cost, A_eq=A_eq, b_eq=b_eq, A_ub=A_ub, b_ub=b_ub,
                       lb=lb, ub=ub)
    structure = OpfStructure(disp_idx=disp_idx, n_disp=nd, col_ps_plus=col_psp,
                             col_ps_minus=col_psm, angle_cols=angle_cols,
                             limited_branches=limited)
    return lp, structure


def solve_dcopf(grid: Grid, scenario: Scenario, kernel=None,
                warm_state=None) -> OpfSolution:
    """Solve one scenario. ``warm_state`` from a previous solution on the
    same grid usually cuts the solve time substantially."""
    lp, st = assemble_lp(grid, scenario)
    res = solve_lp(lp, kernel=kernel, warm_state=warm_state)
    if res.status == ITERATION_LIMIT:
        raise SolverError("simplex hit its iteration limit on an OPF scenario")
    if res.status == INFEASIBLE:
        return OpfSolution(status=STATUS_INFEASIBLE, dispatch=None, flows=None,
                           angles=None, slack_injection=None, objective=None,
                           iterations=res.iterations)
    assert res.status == OPTIMAL
    base = grid.base_mva
    x = res.x
    dispatch = x[:st.n_disp] * base
    ps = (x[st.col_ps_plus] - x[st.col_ps_minus]) * base

    slack = grid.slack_index()
    angles = np.zeros(grid.n_buses)
    for i, col in st.angle_cols.items():
        angles[i] = x[col]
    index = grid.bus_index()
    flows = np.zeros(len(grid.branches))
    for k, br in enumerate(grid.branches):
        if br.in_service:
            i, j = index[br.from_bus], index[br.to_bus]
            flows[k] = (angles[i] - angles[j]) / br.reactance_x * base

    gens = [grid.generators[k] for k in st.disp_idx]
    objective = float(sum(g.marginal_cost * p for g, p in zip(gens, dispatch)))
    status = STATUS_SHED if ps > SHED_TOL_MW else STATUS_OPTIMAL
    return OpfSolution(status=status, dispatch=dispatch, flows=flows,
                       angles=angles, slack_injection=float(ps),
                       objective=objective, iterations=res.iterations,
                       warm_state=res.warm_state)


def solve_dcopf_batch(grid: Grid, scenarios, kernel=None):
    """Solve scenarios in sequence, chaining warm starts. Returns a list of
    :class:`OpfSolution` in input order."""
    out = []
    warm = None
    for sc in scenarios:
        sol = solve_dcopf(grid, sc, kernel=kernel, warm_state=warm)
        if sol.warm_state is not None:
            warm = sol.warm_state
        out.append(sol)
    return out


# ---------------------------------------------------------------------------
# quantities of interest
# ---------------------------------------------------------------------------


@dataclass
class SystemQoIs:
    reserve: float      # MW of spare dispatchable capacity, floored at 0
    shedding: float     # MW of unserved load
    total_cost: float   # $/h generation cost


def scenario_reserve(grid: Grid, scenario: Scenario) -> float:
    """System reserve: dispatchable capacity minus net demand, floored at 0.
    A pure function of the scenario; no power flow involved."""
    cap = sum(g.p_max for g in grid.dispatchable_generators)
    net = scenario.total_load() - scenario.total_wind()
    return max(cap - net, 0.0)


def zonal_reserves(grid: Grid, scenario: Scenario, zones=None) -> dict[int, float]:
    """Reserve restricted to each zone's own fleet and demand."""
    zp = zones if zones is not None else grid.zones
    if zp is None:
        raise ValidationError("grid has no zone partition")
    cap = {z: 0.0 for z in zp.zones()}
    net = {z: 0.0 for z in zp.zones()}
    for g in grid.dispatchable_generators:
        cap[zp.zone_of_bus[g.bus]] += g.p_max
    for i, b in enumerate(grid.buses):
        net[zp.zone_of_bus[b.id]] += float(scenario.loads[i])
    for val, g in zip(scenario.wind, grid.wind_generators):
        net[zp.zone_of_bus[g.bus]] -= float(val)
    return {z: max(cap[z] - net[z], 0.0) for z in zp.zones()}


def zonal_reserve(grid: Grid, scenario: Scenario, zone: int, zones=None) -> float:
    """Reserve of one zone; the single-zone restriction of the system formula."""
    per_zone = zonal_reserves(grid, scenario, zones)
    if zone not in per_zone:
        raise ValidationError(f"unknown zone index {zone}")
    return per_zone[zone]


def derive_qois(grid: Grid, scenario: Scenario, solution: OpfSolution) -> SystemQoIs:
    if solution.status == STATUS_INFEASIBLE:
        raise SolverError("no quantities of interest for an infeasible scenario")
    return SystemQoIs(reserve=scenario_reserve(grid, scenario),
                      shedding=max(float(solution.slack_injection), 0.0),
                      total_cost=float(solution.objective))


# ---------------------------------------------------------------------------
# case tooling
# ---------------------------------------------------------------------------


def rate_limits_from_nominal(grid: Grid, margin: float = 1.6,
                             floor_mw: float = 25.0) -> Grid:
    """Replace every branch limit with ``max(margin * |nominal flow|, floor)``
    where the nominal flow comes from an unconstrained solve at base load.
    Intended for preparing cases whose source data lacks meaningful ratings."""
    from dataclasses import replace
    if margin <= 1.0:
        raise ValidationError("margin must exceed 1")
    unlimited = replace(grid, branches=[replace(br, flow_limit=np.inf)
                                        for br in grid.branches])
    sc = Scenario(loads=grid.base_loads(),
                  wind=np.zeros(len(grid.wind_generators)))
    sol = solve_dcopf(unlimited, sc)
    if sol.status == STATUS_INFEASIBLE:
        raise SolverError("base case is infeasible even without line limits")
    branches = [replace(br, flow_limit=max(margin * abs(f), floor_mw))
                for br, f in zip(grid.branches, sol.flows)]
    return replace(grid, branches=branches)
