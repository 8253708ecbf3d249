"""Reliability and risk metrics over Monte Carlo ensembles of grid outcomes.

The failure modes are reserve inadequacy (system-wide and per zone, judged
against a minimum reserve requirement) and branch overloading (|flow| at or
beyond a fraction epsilon of the rating). Probabilities are indicator means
over the ensemble; risk is probability times a configured consequence cost.
For branches the overall risk of branch i adds, on top of its own term, the
conditional overload probabilities of every other branch given i.

Two ensemble sources are supported: "opf" fills the records from solver
output, "gnn" from surrogate predictions. Zonal reserve on the surrogate
side is reconstructed from predicted dispatch and predicted tie-line flows
through the zonal power balance, so its error reflects genuine surrogate
error rather than a change of definition.

Conditional probabilities given a branch that never overloads are undefined,
not zero; they are carried as NaN, flagged, and contribute nothing to risk.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dcopf import Scenario, derive_qois, solve_dcopf, zonal_reserves
from .errors import ConfigError, ValidationError
from .grid import Grid
from .surrogate import HEAD_BRANCH, HEAD_BUS, HEAD_SYSTEM, predict_batch

SOURCE_OPF = "opf"
SOURCE_GNN = "gnn"

SCOPE_SYSTEM = "system"

REPORT_SCHEMA = 1


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RiskConfig:
    """Risk-assessment knobs.

    ``epsilon`` is the overload threshold as a fraction of the branch rating.
    ``mrr_override`` fixes the minimum reserve requirement for a scope
    ("system" or a zone id) in MW; scopes without an override use the largest
    dispatchable generator in the scope. ``reserve_costs`` and
    ``branch_costs`` are consequence costs in $ per scope / per branch
    position; missing entries fall back to the defaults.
    """

    epsilon: float = 0.9
    mrr_override: dict = field(default_factory=dict)
    reserve_costs: dict = field(default_factory=dict)
    default_reserve_cost: float = 0.0
    branch_costs: dict = field(default_factory=dict)
    default_branch_cost: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1.0:
            raise ConfigError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        for scope, mw in self.mrr_override.items():
            if mw < 0:
                raise ConfigError(f"MRR override for {scope!r} is negative")
        for what, costs, default in (
                ("reserve", self.reserve_costs, self.default_reserve_cost),
                ("branch", self.branch_costs, self.default_branch_cost)):
            if default < 0:
                raise ConfigError(f"default {what} cost is negative")
            for key, c in costs.items():
                if c < 0:
                    raise ConfigError(f"{what} cost for {key!r} is negative")

    def reserve_cost(self, scope):
        return float(self.reserve_costs.get(scope, self.default_reserve_cost))

    def branch_cost(self, slot):
        return float(self.branch_costs.get(slot, self.default_branch_cost))

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "mrr_override": {str(k): v for k, v in
                             sorted(self.mrr_override.items(), key=repr)},
            "reserve_costs": {str(k): v for k, v in
                              sorted(self.reserve_costs.items(), key=repr)},
            "default_reserve_cost": self.default_reserve_cost,
            "branch_costs": {str(k): v for k, v in
                             sorted(self.branch_costs.items())},
            "default_branch_cost": self.default_branch_cost,
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            epsilon=float(doc.get("epsilon", 0.9)),
            mrr_override={_scope_key(k): float(v) for k, v in
                          doc.get("mrr_override", {}).items()},
            reserve_costs={_scope_key(k): float(v) for k, v in
                           doc.get("reserve_costs", {}).items()},
            default_reserve_cost=float(doc.get("default_reserve_cost", 0.0)),
            branch_costs={int(k): float(v) for k, v in
                          doc.get("branch_costs", {}).items()},
            default_branch_cost=float(doc.get("default_branch_cost", 0.0)),
        )


def _scope_key(key):
    """JSON round-trips zone ids as strings; bring them back to ints."""
    if isinstance(key, str) and key.lstrip("-").isdigit():
        return int(key)
    return key


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------


@dataclass
class QoIEnsemble:
    """M records of system QoIs, per-zone reserves and branch flows.

    ``zonal_reserve`` columns follow ``zones``; ``flows`` columns follow
    ``branch_slots`` (positions into grid.branches, in-service only).
    """

    source: str
    reserve: np.ndarray
    shedding: np.ndarray
    cost: np.ndarray
    zones: list
    zonal_reserve: np.ndarray
    branch_slots: list
    flows: np.ndarray

    def __post_init__(self):
        if self.source not in (SOURCE_OPF, SOURCE_GNN):
            raise ValidationError(f"unknown ensemble source {self.source!r}")
        self.reserve = np.asarray(self.reserve, dtype=float)
        self.shedding = np.asarray(self.shedding, dtype=float)
        self.cost = np.asarray(self.cost, dtype=float)
        self.zonal_reserve = np.asarray(self.zonal_reserve, dtype=float)
        self.flows = np.asarray(self.flows, dtype=float)
        m = len(self.reserve)
        if m < 1:
            raise ValidationError("an ensemble needs at least one record")
        if self.shedding.shape != (m,) or self.cost.shape != (m,):
            raise ValidationError("system QoI arrays disagree on length")
        if self.zonal_reserve.shape != (m, len(self.zones)):
            raise ValidationError("zonal reserve shape does not match zones")
        if self.flows.shape != (m, len(self.branch_slots)):
            raise ValidationError("flow shape does not match branch slots")

    @property
    def M(self):
        return len(self.reserve)

    def reserve_for_scope(self, scope):
        if scope == SCOPE_SYSTEM:
            return self.reserve
        if scope in self.zones:
            return self.zonal_reserve[:, self.zones.index(scope)]
        raise ValidationError(f"ensemble has no scope {scope!r}")


def _branch_slot_list(grid: Grid):
    return [k for k, br in enumerate(grid.branches) if br.in_service]


def ensemble_from_opf(grid: Grid, scenarios, kernel=None):
    """Solve every scenario and collect the ensemble. Scenarios the solver
    cannot balance are dropped; returns (ensemble, dropped indices)."""
    zones = grid.zones.zones() if grid.zones is not None else []
    slots = _branch_slot_list(grid)
    reserve, shedding, cost, zonal, flows = [], [], [], [], []
    dropped = []
    warm = None
    for i, sc in enumerate(scenarios):
        sol = solve_dcopf(grid, sc, kernel=kernel, warm_state=warm)
        if sol.warm_state is not None:
            warm = sol.warm_state
        if sol.status == "infeasible":
            dropped.append(i)
            continue
        q = derive_qois(grid, sc, sol)
        reserve.append(q.reserve)
        shedding.append(q.shedding)
        cost.append(q.total_cost)
        if zones:
            zr = zonal_reserves(grid, sc)
            zonal.append([zr[z] for z in zones])
        else:
            zonal.append([])
        flows.append([sol.flows[k] for k in slots])
    if not reserve:
        raise ValidationError("no scenario could be solved")
    return QoIEnsemble(source=SOURCE_OPF,
                       reserve=np.array(reserve), shedding=np.array(shedding),
                       cost=np.array(cost), zones=zones,
                       zonal_reserve=np.array(zonal).reshape(len(reserve),
                                                             len(zones)),
                       branch_slots=slots,
                       flows=np.array(flows)), dropped


def ensemble_from_records(grid: Grid, records) -> QoIEnsemble:
    """Build the OPF-side ensemble from solved dataset records (the output
    of generate_dataset), skipping infeasible ones."""
    zones = grid.zones.zones() if grid.zones is not None else []
    slots = _branch_slot_list(grid)
    feasible = [r for r in records if r["status"] != "infeasible"]
    if not feasible:
        raise ValidationError("no feasible records in the dataset")
    reserve = np.array([r["reserve"] for r in feasible])
    shedding = np.array([r["shedding"] for r in feasible])
    cost = np.array([r["cost"] for r in feasible])
    zonal = np.zeros((len(feasible), len(zones)))
    for m, r in enumerate(feasible):
        if zones:
            sc = Scenario(loads=np.asarray(r["loads"], dtype=float),
                          wind=np.asarray(r["wind"], dtype=float))
            zr = zonal_reserves(grid, sc)
            zonal[m] = [zr[z] for z in zones]
    flows = np.array([[r["flows"][k] for k in slots] for r in feasible])
    return QoIEnsemble(source=SOURCE_OPF, reserve=reserve, shedding=shedding,
                       cost=cost, zones=zones, zonal_reserve=zonal,
                       branch_slots=slots, flows=flows)


def zonal_reserve_from_outputs(grid: Grid, bus_dispatch, branch_flows,
                               slack_injection=0.0, zones=None):
    """Per-zone reserve reconstructed from OPF outputs via zonal balance.

    Each zone's net load equals its dispatched generation plus the slack
    injection it hosts minus its net tie-line export, so the reserve formula
    can be evaluated without touching the inputs. With exact solver outputs
    this reproduces the scenario-based zonal reserve; with surrogate outputs
    it inherits their error. ``bus_dispatch`` follows the sorted generator
    buses, ``branch_flows`` the in-service branch positions.
    """
    zp = zones if zones is not None else grid.zones
    if zp is None:
        raise ValidationError("grid has no zone partition")
    gen_buses = sorted({g.bus for g in grid.dispatchable_generators})
    slot_list = _branch_slot_list(grid)
    if len(bus_dispatch) != len(gen_buses):
        raise ValidationError("dispatch vector does not match generator buses")
    if len(branch_flows) != len(slot_list):
        raise ValidationError("flow vector does not match in-service branches")

    cap = {z: 0.0 for z in zp.zones()}
    gen = {z: 0.0 for z in zp.zones()}
    export = {z: 0.0 for z in zp.zones()}
    for g in grid.dispatchable_generators:
        cap[zp.zone_of_bus[g.bus]] += g.p_max
    for bus, val in zip(gen_buses, bus_dispatch):
        gen[zp.zone_of_bus[bus]] += float(val)
    for k, f in zip(slot_list, branch_flows):
        br = grid.branches[k]
        zf, zt = zp.zone_of_bus[br.from_bus], zp.zone_of_bus[br.to_bus]
        if zf != zt:
            export[zf] += float(f)
            export[zt] -= float(f)
    slack_zone = zp.zone_of_bus[grid.slack_bus.id]
    out = {}
    for z in zp.zones():
        net_load = gen[z] - export[z]
        if z == slack_zone:
            net_load += float(slack_injection)
        out[z] = max(cap[z] - net_load, 0.0)
    return out


def ensemble_from_gnn(grid: Grid, scenarios, models) -> QoIEnsemble:
    """Predict the ensemble with the three surrogate heads. ``models`` maps
    head name to a SurrogateModel trained on this grid."""
    for head in (HEAD_BUS, HEAD_BRANCH, HEAD_SYSTEM):
        if head not in models:
            raise ConfigError(f"missing surrogate model for head {head!r}")
    if len(scenarios) == 0:
        raise ValidationError("an ensemble needs at least one record")
    sys_pred, _ = predict_batch(models[HEAD_SYSTEM], grid, scenarios)
    bus_pred, _ = predict_batch(models[HEAD_BUS], grid, scenarios)
    flow_pred, _ = predict_batch(models[HEAD_BRANCH], grid, scenarios)
    reserve = np.maximum(sys_pred[:, 0], 0.0)
    shedding = np.maximum(sys_pred[:, 1], 0.0)
    cost = sys_pred[:, 2]
    zones = grid.zones.zones() if grid.zones is not None else []
    zonal = np.zeros((len(scenarios), len(zones)))
    if zones:
        for m in range(len(scenarios)):
            # predicted shedding stands in for the signed slack injection;
            # spill (negative injection) is not a surrogate output
            zr = zonal_reserve_from_outputs(grid, bus_pred[m], flow_pred[m],
                                            slack_injection=shedding[m])
            zonal[m] = [zr[z] for z in zones]
    return QoIEnsemble(source=SOURCE_GNN, reserve=reserve, shedding=shedding,
                       cost=cost, zones=zones, zonal_reserve=zonal,
                       branch_slots=list(models[HEAD_BRANCH].outputs),
                       flows=flow_pred)


# ---------------------------------------------------------------------------
# reserve metrics
# ---------------------------------------------------------------------------


def minimum_reserve_requirement(grid: Grid, scope=SCOPE_SYSTEM,
                                override=None) -> float:
    """MW threshold for reserve adequacy: the explicit override when given,
    otherwise the capacity of the largest dispatchable generator in scope."""
    if override is not None:
        return float(override)
    gens = grid.dispatchable_generators
    if scope != SCOPE_SYSTEM:
        if grid.zones is None:
            raise ValidationError("grid has no zone partition")
        if scope not in grid.zones.zones():
            raise ValidationError(f"unknown zone index {scope}")
        zone_of = grid.zones.zone_of_bus
        gens = [g for g in gens if zone_of[g.bus] == scope]
    if not gens:
        raise ConfigError(
            f"scope {scope!r} has no dispatchable generator and no explicit "
            "minimum reserve requirement")
    return float(max(g.p_max for g in gens))


def prob_reserve_inadequacy(ensemble: QoIEnsemble, mrr: float,
                            scope=SCOPE_SYSTEM):
    """Indicator-mean estimate of p(reserve < MRR) for one scope, returned
    with its binomial standard error sqrt(p(1-p)/M)."""
    reserve = ensemble.reserve_for_scope(scope)
    p = float(np.count_nonzero(reserve < mrr)) / ensemble.M
    stderr = math.sqrt(p * (1.0 - p) / ensemble.M)
    return p, stderr


def risk_reserve(p: float, cost: float) -> float:
    """Risk in $: failure probability times the consequence cost."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"probability {p} outside [0, 1]")
    return p * cost


# ---------------------------------------------------------------------------
# branch metrics
# ---------------------------------------------------------------------------


def _overload_table(ensemble: QoIEnsemble, grid: Grid, epsilon: float):
    """Boolean (M, B) indicator: |flow| at or beyond epsilon * rating."""
    limits = np.array([grid.branches[k].flow_limit
                       for k in ensemble.branch_slots])
    return np.abs(ensemble.flows) >= epsilon * limits


def prob_branch_overload(ensemble: QoIEnsemble, grid: Grid,
                         epsilon: float) -> np.ndarray:
    """Per-branch overload probability, aligned with ensemble.branch_slots."""
    U = _overload_table(ensemble, grid, epsilon)
    return U.sum(axis=0) / float(ensemble.M)


def conditional_overload_matrix(ensemble: QoIEnsemble, grid: Grid,
                                epsilon: float):
    """Matrix of p(branch j overloaded | branch i overloaded).

    Row i conditions on branch i (both indices follow branch_slots). The
    diagonal is NaN by construction; a row whose branch never overloads is
    entirely NaN: the probability is undefined there, which is distinct from
    zero. Returns (matrix, undefined slot list).
    """
    U = _overload_table(ensemble, grid, epsilon).astype(float)
    counts = U.sum(axis=0)
    joint = U.T @ U                      # co-occurrence counts, exact integers
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = joint / counts[:, None]
    cond[counts == 0.0, :] = np.nan
    np.fill_diagonal(cond, np.nan)
    undefined = [ensemble.branch_slots[i]
                 for i in np.flatnonzero(counts == 0.0)]
    return cond, undefined


def cond_prob_branch_overload(ensemble: QoIEnsemble, grid: Grid,
                              epsilon: float, slot) -> np.ndarray:
    """One row of the conditional matrix: p(j overloaded | slot overloaded)
    over all j, NaN at j = slot. All NaN when the condition never occurs."""
    if slot not in ensemble.branch_slots:
        raise ValidationError(f"ensemble has no branch slot {slot}")
    cond, _ = conditional_overload_matrix(ensemble, grid, epsilon)
    return cond[ensemble.branch_slots.index(slot)]


def overall_branch_risk(ensemble: QoIEnsemble, grid: Grid, epsilon: float,
                        costs):
    """Overall overload risk per branch i: its own probability-weighted cost
    plus the conditional overload cost of every other branch given i.
    Undefined conditional rows contribute zero and are flagged. ``costs``
    is an array aligned with branch_slots. Returns (risk, undefined slots).
    """
    costs = np.asarray(costs, dtype=float)
    if costs.shape != (len(ensemble.branch_slots),):
        raise ValidationError("costs do not match the ensemble's branches")
    p = prob_branch_overload(ensemble, grid, epsilon)
    cond, undefined = conditional_overload_matrix(ensemble, grid, epsilon)
    # nansum drops the NaN diagonal; all-NaN undefined rows collapse to 0
    conditional_term = np.nansum(np.where(np.isnan(cond), 0.0,
                                          cond * costs[None, :]), axis=1)
    return p * costs + conditional_term, undefined


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class RiskReport:
    """Everything the assessment produced, ready to serialize."""

    source: str
    M: int
    epsilon: float
    scopes: dict                      # label -> {mrr, probability, stderr, ...}
    branch_slots: list
    branch_terminals: list            # (from_bus, to_bus) per slot
    branch_probability: np.ndarray
    branch_risk: np.ndarray
    branch_costs: np.ndarray
    conditional: np.ndarray
    undefined_branches: list
    seed: int | None = None

    def __post_init__(self):
        self.branch_probability = np.asarray(self.branch_probability,
                                             dtype=float)
        self.branch_risk = np.asarray(self.branch_risk, dtype=float)
        self.branch_costs = np.asarray(self.branch_costs, dtype=float)
        self.conditional = np.asarray(self.conditional, dtype=float)
        probs = [s["probability"] for s in self.scopes.values()]
        if probs and not all(0.0 <= q <= 1.0 for q in probs):
            raise ValidationError("scope probability outside [0, 1]")
        if self.branch_probability.size and not (
                np.all(self.branch_probability >= 0.0)
                and np.all(self.branch_probability <= 1.0)):
            raise ValidationError("branch probability outside [0, 1]")

    def scope_labels(self):
        return list(self.scopes)

    def to_dict(self):
        def cell(v):
            return None if math.isnan(v) else v

        return {
            "format": "gridrisk-report",
            "version": REPORT_SCHEMA,
            "source": self.source,
            "M": self.M,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "scopes": {str(k): v for k, v in self.scopes.items()},
            "branches": {
                "slots": list(self.branch_slots),
                "terminals": [list(t) for t in self.branch_terminals],
                "probability": self.branch_probability.tolist(),
                "risk": self.branch_risk.tolist(),
                "costs": self.branch_costs.tolist(),
                "undefined": list(self.undefined_branches),
            },
            "conditional": [[cell(v) for v in row] for row in self.conditional],
        }

    @classmethod
    def from_dict(cls, doc):
        if doc.get("format") != "gridrisk-report" or \
                doc.get("version") != REPORT_SCHEMA:
            raise ValidationError("not a supported risk report document")
        br = doc["branches"]
        cond = np.array([[np.nan if v is None else float(v) for v in row]
                         for row in doc["conditional"]], dtype=float)
        cond = cond.reshape((len(br["slots"]), len(br["slots"])))
        return cls(source=doc["source"], M=int(doc["M"]),
                   epsilon=float(doc["epsilon"]),
                   scopes={_scope_key(k): v
                           for k, v in doc["scopes"].items()},
                   branch_slots=[int(s) for s in br["slots"]],
                   branch_terminals=[tuple(t) for t in br["terminals"]],
                   branch_probability=np.array(br["probability"]),
                   branch_risk=np.array(br["risk"]),
                   branch_costs=np.array(br["costs"]),
                   conditional=cond,
                   undefined_branches=[int(s) for s in br["undefined"]],
                   seed=doc.get("seed"))


def assess(grid: Grid, ensemble: QoIEnsemble, config: RiskConfig,
           seed=None) -> RiskReport:
    """Run the full metric set over one ensemble."""
    scopes = {}
    for scope in [SCOPE_SYSTEM] + list(ensemble.zones):
        mrr = minimum_reserve_requirement(
            grid, scope, override=config.mrr_override.get(scope))
        p, stderr = prob_reserve_inadequacy(ensemble, mrr, scope)
        cost = config.reserve_cost(scope)
        scopes[scope] = {"mrr": mrr, "probability": p, "stderr": stderr,
                         "cost": cost, "risk": risk_reserve(p, cost)}
    costs = np.array([config.branch_cost(s) for s in ensemble.branch_slots])
    p_branch = prob_branch_overload(ensemble, grid, config.epsilon)
    cond, undefined = conditional_overload_matrix(ensemble, grid,
                                                  config.epsilon)
    conditional_term = np.nansum(np.where(np.isnan(cond), 0.0,
                                          cond * costs[None, :]), axis=1)
    risk = p_branch * costs + conditional_term
    terminals = [(grid.branches[k].from_bus, grid.branches[k].to_bus)
                 for k in ensemble.branch_slots]
    return RiskReport(source=ensemble.source, M=ensemble.M,
                      epsilon=config.epsilon, scopes=scopes,
                      branch_slots=list(ensemble.branch_slots),
                      branch_terminals=terminals,
                      branch_probability=p_branch, branch_risk=risk,
                      branch_costs=costs, conditional=cond,
                      undefined_branches=undefined, seed=seed)


def top_critical_branches(report: RiskReport, n=20):
    """Branch slots ranked by descending overload probability, ties broken
    by slot index."""
    order = sorted(range(len(report.branch_slots)),
                   key=lambda i: (-report.branch_probability[i],
                                  report.branch_slots[i]))
    return [report.branch_slots[i] for i in order[:n]]


# ---------------------------------------------------------------------------
# comparison
# ---------------------------------------------------------------------------

MAPE_PROBABILITY_FLOOR = 0.01


@dataclass
class ErrorSummary:
    """Per-metric errors of a candidate report against a reference."""

    scope_abs_error: dict
    scope_risk_abs_error: dict
    max_scope_abs_error: float
    max_branch_abs_error: float
    mean_branch_abs_error: float
    mape_branch_probability: float | None   # percent; None without any
    n_mape_branches: int                     # branches above the floor

    def to_dict(self):
        return {
            "scope_abs_error": {str(k): v
                                for k, v in self.scope_abs_error.items()},
            "scope_risk_abs_error": {str(k): v for k, v in
                                     self.scope_risk_abs_error.items()},
            "max_scope_abs_error": self.max_scope_abs_error,
            "max_branch_abs_error": self.max_branch_abs_error,
            "mean_branch_abs_error": self.mean_branch_abs_error,
            "mape_branch_probability": self.mape_branch_probability,
            "n_mape_branches": self.n_mape_branches,
        }


def compare_reports(reference: RiskReport,
                    candidate: RiskReport) -> ErrorSummary:
    """Absolute errors per scope and branch, plus MAPE over branch overload
    probabilities restricted to reference probabilities >= 0.01 so small
    denominators cannot blow the average up."""
    if reference.scope_labels() != candidate.scope_labels():
        raise ValidationError("reports cover different scopes")
    if list(reference.branch_slots) != list(candidate.branch_slots):
        raise ValidationError("reports cover different branches")
    if abs(reference.epsilon - candidate.epsilon) > 1e-12:
        raise ValidationError("reports used different overload thresholds")

    scope_err, risk_err = {}, {}
    for label in reference.scopes:
        scope_err[label] = abs(reference.scopes[label]["probability"]
                               - candidate.scopes[label]["probability"])
        risk_err[label] = abs(reference.scopes[label]["risk"]
                              - candidate.scopes[label]["risk"])
    branch_abs = np.abs(reference.branch_probability
                        - candidate.branch_probability)
    keep = reference.branch_probability >= MAPE_PROBABILITY_FLOOR
    if np.any(keep):
        mape = float(np.mean(branch_abs[keep]
                             / reference.branch_probability[keep])) * 100.0
    else:
        mape = None
    return ErrorSummary(
        scope_abs_error=scope_err,
        scope_risk_abs_error=risk_err,
        max_scope_abs_error=max(scope_err.values()) if scope_err else 0.0,
        max_branch_abs_error=float(branch_abs.max()) if branch_abs.size
        else 0.0,
        mean_branch_abs_error=float(branch_abs.mean()) if branch_abs.size
        else 0.0,
        mape_branch_probability=mape,
        n_mape_branches=int(np.count_nonzero(keep)))


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def save_report(report: RiskReport, path: str):
    with open(path, "w") as fh:
        json.dump(report.to_dict(), fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_report(path: str) -> RiskReport:
    with open(path) as fh:
        return RiskReport.from_dict(json.load(fh))


def write_branch_table_csv(report: RiskReport, path: str):
    """Per-branch table: slot, terminals, probability, cost, overall risk."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["slot", "from_bus", "to_bus", "probability", "cost",
                    "risk", "conditional_undefined"])
        for i, slot in enumerate(report.branch_slots):
            fb, tb = report.branch_terminals[i]
            w.writerow([slot, fb, tb,
                        repr(float(report.branch_probability[i])),
                        repr(float(report.branch_costs[i])),
                        repr(float(report.branch_risk[i])),
                        int(slot in report.undefined_branches)])


def write_conditional_csv(report: RiskReport, path: str):
    """Conditional matrix: row = given-overloaded branch i, column = branch
    j; empty cells where the probability is undefined."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["given_slot"] + [str(s) for s in report.branch_slots])
        for i, slot in enumerate(report.branch_slots):
            row = [slot]
            for v in report.conditional[i]:
                row.append("" if math.isnan(v) else repr(float(v)))
            w.writerow(row)
