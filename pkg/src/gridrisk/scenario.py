"""Scenario sampling and dataset generation.

Two samplers cover the two roles datasets play here. Training ensembles use
independent uniforms, one variable per load bus and one per wind generator,
wide enough to blanket the operating range. Forecast ensembles work at the
zone level: one load variable per zone and one wind-speed variable per
wind-capable zone, tied together by a Gaussian copula (draw z ~ N(0, C), map
through the standard normal CDF to uniforms, then through each variable's
marginal quantile function). Zonal loads spread to buses by the fixed load
shares of the partition; zonal wind speed turns into zonal power through the
turbine power curve at the zone's rated capacity and spreads to wind
generators by capacity shares.

Copula variable order everywhere (correlation matrix, sampled rows,
manifests): load variables for zones 1..s, then wind-speed variables for the
wind-capable zones in ascending zone order. Uniform-ensemble variable order:
load buses in grid order, then wind generators in grid order.

Datasets are written as a JSON-lines file of per-scenario records plus a
manifest; both are canonical JSON so identical configurations and seeds
produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr, ndtri

from .dcopf import Scenario, derive_qois, scenario_reserve, solve_dcopf
from .errors import ConfigError, ValidationError
from .grid import Grid, grid_hash

_U_EPS = 1e-15  # numerical floor keeping quantile arguments inside (0, 1)

DATASET_SCHEMA = 1


# ---------------------------------------------------------------------------
# marginals
# ---------------------------------------------------------------------------


@dataclass
class MarginalSpec:
    """One-dimensional sampling distribution.

    kinds and parameters:
      uniform      low, high
      trunc_normal mean, std, low, high (normal restricted to [low, high])
      weibull      shape, scale (support [0, inf))
    """

    kind: str
    params: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        p = self.params
        if self.kind == "uniform":
            need = {"low", "high"}
            ok = need <= set(p) and p["low"] < p["high"]
        elif self.kind == "trunc_normal":
            need = {"mean", "std", "low", "high"}
            ok = need <= set(p) and p["std"] > 0 and p["low"] < p["high"]
        elif self.kind == "weibull":
            need = {"shape", "scale"}
            ok = need <= set(p) and p["shape"] > 0 and p["scale"] > 0
        else:
            raise ConfigError(f"unknown marginal kind {self.kind!r}")
        if not ok:
            raise ConfigError(f"{self.kind} marginal needs parameters {sorted(need)}, "
                              f"got {sorted(p)}")

    def inverse_cdf(self, u):
        """Quantile function, vectorized over u; every u must lie in (0, 1)."""
        u = np.asarray(u, dtype=float)
        if np.any((u <= 0.0) | (u >= 1.0)):
            raise ValidationError("quantile argument must lie strictly in (0, 1)")
        u = np.clip(u, _U_EPS, 1 - _U_EPS)
        p = self.params
        if self.kind == "uniform":
            return p["low"] + u * (p["high"] - p["low"])
        if self.kind == "trunc_normal":
            a = (p["low"] - p["mean"]) / p["std"]
            b = (p["high"] - p["mean"]) / p["std"]
            fa, fb = ndtr(a), ndtr(b)
            return p["mean"] + p["std"] * ndtri(fa + u * (fb - fa))
        # weibull
        return p["scale"] * (-np.log1p(-u)) ** (1.0 / p["shape"])

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "uniform":
            return np.clip((x - p["low"]) / (p["high"] - p["low"]), 0.0, 1.0)
        if self.kind == "trunc_normal":
            a = (p["low"] - p["mean"]) / p["std"]
            b = (p["high"] - p["mean"]) / p["std"]
            fa, fb = ndtr(a), ndtr(b)
            z = ndtr((x - p["mean"]) / p["std"])
            return np.clip((z - fa) / (fb - fa), 0.0, 1.0)
        with np.errstate(over="ignore"):
            out = -np.expm1(-((np.maximum(x, 0.0) / p["scale"]) ** p["shape"]))
        return np.where(x <= 0, 0.0, out)

    def to_dict(self):
        return {"kind": self.kind, "params": dict(sorted(self.params.items()))}

    @classmethod
    def from_dict(cls, doc):
        return cls(kind=doc["kind"], params=dict(doc["params"]))


# ---------------------------------------------------------------------------
# wind power curve
# ---------------------------------------------------------------------------


@dataclass
class PowerCurve:
    """Turbine power rating curve: zero below cut-in, cubic ramp to rated
    speed, flat at rated_power until cut-out, zero beyond. Speeds in m/s,
    rated_power in MW (1.0 gives the normalized curve)."""

    cut_in: float = 3.0
    rated_speed: float = 12.0
    cut_out: float = 25.0
    rated_power: float = 1.0

    def __post_init__(self):
        if not 0 < self.cut_in < self.rated_speed < self.cut_out:
            raise ConfigError("power curve needs 0 < cut_in < rated_speed < cut_out")
        if self.rated_power <= 0:
            raise ConfigError("rated_power must be positive")

    def output(self, speed):
        v = np.asarray(speed, dtype=float)
        ci3, r3 = self.cut_in ** 3, self.rated_speed ** 3
        ramp = (v ** 3 - ci3) / (r3 - ci3)
        out = self.rated_power * np.where(
            v < self.cut_in, 0.0,
            np.where(v < self.rated_speed, ramp,
                     np.where(v < self.cut_out, 1.0, 0.0)))
        return out if out.ndim else float(out)

    def at_capacity(self, rated_mw):
        """Same curve shape rescaled to a fleet of ``rated_mw`` capacity."""
        return dataclasses.replace(self, rated_power=rated_mw)

    def to_dict(self):
        return {"cut_in": self.cut_in, "rated_speed": self.rated_speed,
                "cut_out": self.cut_out, "rated_power": self.rated_power}

    @classmethod
    def from_dict(cls, doc):
        return cls(**doc)


def wind_speed_to_power(speed, curve: PowerCurve):
    """MW produced at wind speed ``speed`` by a fleet rated per the curve."""
    return curve.output(speed)


# ---------------------------------------------------------------------------
# uniform training ensembles
# ---------------------------------------------------------------------------


@dataclass
class UniformEnsembleSpec:
    """Independent uniform bounds for every stochastic variable.

    ``load_bounds`` maps load-bus ids to (low, high) MW; ``wind_bounds`` maps
    generator positions (index into grid.generators) to (low, high) MW of
    directly sampled wind power. Variables are mutually independent.
    """

    load_bounds: dict[int, tuple[float, float]]
    wind_bounds: dict[int, tuple[float, float]]

    def __post_init__(self):
        for where, bounds in (("load", self.load_bounds),
                              ("wind", self.wind_bounds)):
            for key, (lo, hi) in bounds.items():
                if lo > hi:
                    raise ConfigError(f"{where} bounds for {key} have low "
                                      f"{lo} > high {hi}")
                if lo < 0:
                    raise ConfigError(f"{where} bounds for {key} reach below zero")

    @property
    def dimension(self):
        return len(self.load_bounds) + len(self.wind_bounds)

    def variable_names(self):
        return ([f"load_b{b}" for b in sorted(self.load_bounds)]
                + [f"wind_g{k}" for k in sorted(self.wind_bounds)])

    def validate_against(self, grid: Grid):
        load_buses = {b.id for b in grid.buses if b.base_load > 0}
        if set(self.load_bounds) != load_buses:
            raise ConfigError("load bounds must cover exactly the load buses")
        wind_pos = {k for k, g in enumerate(grid.generators) if g.kind == "wind"}
        if set(self.wind_bounds) != wind_pos:
            raise ConfigError("wind bounds must cover exactly the wind generators")
        for k, (lo, hi) in self.wind_bounds.items():
            if hi > grid.generators[k].p_max + 1e-6:
                raise ConfigError(f"wind bound {hi} exceeds generator {k} "
                                  f"capacity {grid.generators[k].p_max}")
        return self

    def to_dict(self):
        return {"kind": "uniform",
                "load_bounds": {str(b): [lo, hi] for b, (lo, hi)
                                in sorted(self.load_bounds.items())},
                "wind_bounds": {str(k): [lo, hi] for k, (lo, hi)
                                in sorted(self.wind_bounds.items())}}

    @classmethod
    def from_dict(cls, doc):
        return cls(
            load_bounds={int(b): (float(v[0]), float(v[1]))
                         for b, v in doc["load_bounds"].items()},
            wind_bounds={int(k): (float(v[0]), float(v[1]))
                         for k, v in doc["wind_bounds"].items()})


def default_uniform_bounds(grid: Grid, load_band=(0.8, 1.2)) -> UniformEnsembleSpec:
    """Training bounds: load_band times base load per load bus, full
    [0, p_max] per wind generator."""
    lo, hi = load_band
    return UniformEnsembleSpec(
        load_bounds={b.id: (lo * b.base_load, hi * b.base_load)
                     for b in grid.buses if b.base_load > 0},
        wind_bounds={k: (0.0, g.p_max) for k, g in enumerate(grid.generators)
                     if g.kind == "wind"}).validate_against(grid)


def _uniform_rows(grid: Grid, spec: UniformEnsembleSpec, n: int, seed: int):
    spec.validate_against(grid)
    cols = ([spec.load_bounds[b] for b in sorted(spec.load_bounds)]
            + [spec.wind_bounds[k] for k in sorted(spec.wind_bounds)])
    lo = np.array([c[0] for c in cols])
    hi = np.array([c[1] for c in cols])
    rng = np.random.default_rng(seed)
    return lo + rng.random((n, len(cols))) * (hi - lo)


def _uniform_row_to_scenario(grid: Grid, spec: UniformEnsembleSpec, row):
    load_buses = sorted(spec.load_bounds)
    col = {b: m for m, b in enumerate(load_buses)}
    loads = np.array([row[col[b.id]] if b.id in col else 0.0
                      for b in grid.buses])
    nw = len(load_buses)
    wind = np.asarray(row[nw:], dtype=float)
    return Scenario(loads=loads, wind=wind)


def sample_uniform_ensemble(grid: Grid, bounds: UniformEnsembleSpec, n: int,
                            seed: int) -> list[Scenario]:
    """n independent scenarios with every variable uniform on its bounds."""
    rows = _uniform_rows(grid, bounds, n, seed)
    return [_uniform_row_to_scenario(grid, bounds, rows[i]) for i in range(n)]


# ---------------------------------------------------------------------------
# copula forecast ensembles
# ---------------------------------------------------------------------------


@dataclass
class CopulaSpec:
    """Zone-level forecast model: marginals per variable, one correlation
    matrix, and the power curve shape shared by all wind fleets.

    ``load_marginals`` maps every zone to its load distribution (MW);
    ``wind_marginals`` maps each wind-capable zone to its wind-speed
    distribution (m/s). Variable order is loads by zone, then wind by zone.
    ``power_curve`` is the normalized (rated_power 1.0) curve shape; each
    zone applies it at the zone's rated capacity.
    """

    load_marginals: dict[int, MarginalSpec]
    wind_marginals: dict[int, MarginalSpec]
    correlation: np.ndarray
    power_curve: PowerCurve = field(default_factory=PowerCurve)

    @property
    def dimension(self):
        return len(self.load_marginals) + len(self.wind_marginals)

    def variable_names(self):
        return ([f"load_z{z}" for z in sorted(self.load_marginals)]
                + [f"wind_z{z}" for z in sorted(self.wind_marginals)])

    def marginals_in_order(self):
        return ([self.load_marginals[z] for z in sorted(self.load_marginals)]
                + [self.wind_marginals[z] for z in sorted(self.wind_marginals)])

    def validate_against(self, grid: Grid):
        zp = grid.zones
        if zp is None:
            raise ConfigError("grid has no zone partition; sampling is zonal")
        if sorted(self.load_marginals) != zp.zones():
            raise ConfigError("load marginals must cover exactly zones "
                              f"{zp.zones()}")
        windy = [z for z in zp.zones() if zp.zone_wind_capacity[z] > 0]
        if sorted(self.wind_marginals) != windy:
            raise ConfigError(f"wind marginals must cover exactly the "
                              f"wind-capable zones {windy}")
        C = np.asarray(self.correlation, dtype=float)
        d = self.dimension
        if C.shape != (d, d):
            raise ConfigError(f"correlation must be {d}x{d} for "
                              f"{len(self.load_marginals)} load and "
                              f"{len(self.wind_marginals)} wind variables")
        if not np.allclose(C, C.T, atol=1e-12):
            raise ConfigError("correlation matrix must be symmetric")
        if not np.allclose(np.diag(C), 1.0, atol=1e-12):
            raise ConfigError("correlation matrix needs unit diagonal")
        return self

    def to_dict(self):
        return {
            "kind": "copula",
            "load_marginals": {str(z): m.to_dict()
                               for z, m in sorted(self.load_marginals.items())},
            "wind_marginals": {str(z): m.to_dict()
                               for z, m in sorted(self.wind_marginals.items())},
            "correlation": [[float(v) for v in row]
                            for row in np.asarray(self.correlation)],
            "power_curve": self.power_curve.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc):
        return cls(
            load_marginals={int(z): MarginalSpec.from_dict(m)
                            for z, m in doc["load_marginals"].items()},
            wind_marginals={int(z): MarginalSpec.from_dict(m)
                            for z, m in doc["wind_marginals"].items()},
            correlation=np.asarray(doc["correlation"], dtype=float),
            power_curve=PowerCurve.from_dict(doc["power_curve"]),
        )


def default_copula_spec(grid: Grid, load_cv=0.1, rho_load=0.6, rho_wind=0.4,
                        rho_cross=-0.2, wind_shape=2.0, wind_scale=9.0,
                        power_curve=None) -> CopulaSpec:
    """Demo forecast model for a partitioned grid, an assumption rather than
    data: truncated-normal zone loads around the base level, Weibull wind
    speeds, uniform correlations within and across the two blocks."""
    zp = grid.zones
    if zp is None:
        raise ConfigError("grid has no zone partition")
    load_marginals = {}
    for z in zp.zones():
        mean = zp.zone_load[z]
        if mean <= 0:
            raise ConfigError(f"zone {z} has no load; give it an explicit "
                              "marginal instead of the default model")
        std = load_cv * mean
        load_marginals[z] = MarginalSpec("trunc_normal", {
            "mean": mean, "std": std,
            "low": max(mean - 3.5 * std, 0.0), "high": mean + 3.5 * std})
    windy = [z for z in zp.zones() if zp.zone_wind_capacity[z] > 0]
    wind_marginals = {z: MarginalSpec("weibull", {"shape": wind_shape,
                                                  "scale": wind_scale})
                      for z in windy}
    nl, nw = len(load_marginals), len(wind_marginals)
    C = np.eye(nl + nw)
    C[:nl, :nl] += rho_load * (1 - np.eye(nl))
    C[nl:, nl:] += rho_wind * (1 - np.eye(nw))
    C[:nl, nl:] = rho_cross
    C[nl:, :nl] = rho_cross
    spec = CopulaSpec(load_marginals=load_marginals,
                      wind_marginals=wind_marginals, correlation=C,
                      power_curve=power_curve or PowerCurve())
    _copula_factor(spec.correlation)  # fail fast on a non-PSD combination
    return spec.validate_against(grid)


def shift_load_means(spec: CopulaSpec, factor: float) -> CopulaSpec:
    """Forecast variant with every zonal load mean scaled by ``factor``.

    A pure translation of each truncated normal: the spread stays, the
    truncation window slides along (floored at zero). Wind marginals and the
    correlation matrix are untouched, so a family of factors probes exactly
    one axis: how far the load level sits from the one the surrogate saw.
    """
    if factor <= 0:
        raise ConfigError("mean-shift factor must be positive")
    shifted = {}
    for z, m in spec.load_marginals.items():
        if m.kind != "trunc_normal":
            raise ConfigError("mean shifts are defined for trunc_normal "
                              f"load marginals, zone {z} has {m.kind!r}")
        p = dict(m.params)
        delta = (factor - 1.0) * p["mean"]
        p["mean"] += delta
        p["low"] = max(p["low"] + delta, 0.0)
        p["high"] += delta
        shifted[z] = MarginalSpec("trunc_normal", p)
    return CopulaSpec(load_marginals=shifted,
                      wind_marginals=dict(spec.wind_marginals),
                      correlation=np.array(spec.correlation, copy=True),
                      power_curve=spec.power_curve)


def _copula_factor(C: np.ndarray) -> np.ndarray:
    """Cholesky factor of the correlation matrix, with a whiff of jitter for
    matrices that are PSD only up to rounding."""
    C = np.asarray(C, dtype=float)
    jitter = 0.0
    while True:
        try:
            return np.linalg.cholesky(C + jitter * np.eye(len(C)))
        except np.linalg.LinAlgError:
            jitter = 1e-12 if jitter == 0.0 else jitter * 10
            if jitter > 1e-10:
                raise ValidationError(
                    "correlation matrix is not positive semidefinite")


def sample_copula(spec: CopulaSpec, n: int, seed: int) -> np.ndarray:
    """Draw n rows of zone-level variables through the Gaussian copula.
    Columns follow ``spec.variable_names()``."""
    marginals = spec.marginals_in_order()
    L = _copula_factor(spec.correlation)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, len(marginals))) @ L.T
    u = np.clip(ndtr(z), _U_EPS, 1 - _U_EPS)
    out = np.empty_like(u)
    for m, marg in enumerate(marginals):
        out[:, m] = marg.inverse_cdf(u[:, m])
    return out


def disaggregate(grid: Grid, spec: CopulaSpec, row) -> Scenario:
    """Spread one zonal sample row down to a bus/generator scenario."""
    zp = grid.zones
    load_zones = sorted(spec.load_marginals)
    wind_zones = sorted(spec.wind_marginals)
    zload = dict(zip(load_zones, row[:len(load_zones)]))
    zspeed = dict(zip(wind_zones, row[len(load_zones):]))

    for z, val in zload.items():
        if val > 1e-9 and zp.zone_load[z] <= 0:
            raise ValidationError(f"zone {z} has zero load shares but a "
                                  f"nonzero zonal load {val}")

    loads = np.empty(grid.n_buses)
    for i, b in enumerate(grid.buses):
        loads[i] = zp.load_share[b.id] * zload[zp.zone_of_bus[b.id]]

    zpower = {z: wind_speed_to_power(
        v, spec.power_curve.at_capacity(zp.zone_wind_capacity[z]))
        for z, v in zspeed.items()}
    wind = []
    for k, g in enumerate(grid.generators):
        if g.kind == "wind":
            z = zp.zone_of_bus[g.bus]
            wind.append(zp.wind_share.get(k, 0.0) * zpower.get(z, 0.0))
    return Scenario(loads=loads, wind=np.asarray(wind))


def generate_scenarios(grid: Grid, spec, n: int, seed: int):
    """Sampled variable rows plus their scenarios: (inputs, scenarios).
    ``spec`` may be a CopulaSpec or a UniformEnsembleSpec."""
    spec.validate_against(grid)
    if isinstance(spec, UniformEnsembleSpec):
        S = _uniform_rows(grid, spec, n, seed)
        return S, [_uniform_row_to_scenario(grid, spec, S[i]) for i in range(n)]
    S = sample_copula(spec, n, seed)
    return S, [disaggregate(grid, spec, S[i]) for i in range(n)]


def sampler_from_dict(doc):
    if doc.get("kind") == "uniform":
        return UniformEnsembleSpec.from_dict(doc)
    if doc.get("kind") == "copula":
        return CopulaSpec.from_dict(doc)
    raise ConfigError(f"unknown sampler kind {doc.get('kind')!r}")


# ---------------------------------------------------------------------------
# dataset generation and persistence
# ---------------------------------------------------------------------------


@dataclass
class Dataset:
    """Scenario/solution pairs for surrogate training and risk estimation.

    ``records`` is a list of dicts with the scenario (bus loads and per-wind-
    generator power, MW), the sampled variable row, the OPF outcome (status,
    per-dispatched-generator output, per-branch flows, per-bus angles) and
    the scalar quantities of interest. Infeasible scenarios keep their inputs
    and get null outputs.
    """

    grid_hash: str
    seed: int
    spec: CopulaSpec | UniformEnsembleSpec
    records: list[dict]

    def __len__(self):
        return len(self.records)

    def feasible_records(self):
        return [r for r in self.records if r["status"] != "infeasible"]

    def counts(self):
        out = {}
        for r in self.records:
            out[r["status"]] = out.get(r["status"], 0) + 1
        return dict(sorted(out.items()))


def _round_list(arr, nd=10):
    return [round(float(v), nd) for v in np.asarray(arr).ravel()]


def generate_dataset(grid: Grid, spec, n: int, seed: int,
                     kernel=None) -> Dataset:
    """Sample n scenarios and solve the OPF for each (warm-started chain).
    ``spec`` picks the sampler: CopulaSpec or UniformEnsembleSpec."""
    S, scenarios = generate_scenarios(grid, spec, n, seed)
    records = []
    warm = None
    for i, sc in enumerate(scenarios):
        sol = solve_dcopf(grid, sc, kernel=kernel, warm_state=warm)
        if sol.warm_state is not None:
            warm = sol.warm_state
        rec = {
            "index": i,
            "inputs": _round_list(S[i]),
            "loads": _round_list(sc.loads),
            "wind": _round_list(sc.wind),
            "status": sol.status,
        }
        if sol.status == "infeasible":
            rec.update(dispatch=None, flows=None, angles=None,
                       slack_injection=None,
                       reserve=round(scenario_reserve(grid, sc), 10),
                       shedding=None, cost=None)
        else:
            q = derive_qois(grid, sc, sol)
            rec.update(dispatch=_round_list(sol.dispatch),
                       flows=_round_list(sol.flows),
                       angles=_round_list(sol.angles),
                       slack_injection=round(float(sol.slack_injection), 10),
                       reserve=round(q.reserve, 10),
                       shedding=round(q.shedding, 10),
                       cost=round(q.total_cost, 6))
        records.append(rec)
    return Dataset(grid_hash=grid_hash(grid), seed=seed, spec=spec,
                   records=records)


def _canon(doc):
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def save_dataset(ds: Dataset, path: str):
    """Write records as JSON lines next to a ``<path>.manifest.json``."""
    with open(path, "w") as fh:
        for rec in ds.records:
            fh.write(_canon(rec) + "\n")
    manifest = {
        "schema": DATASET_SCHEMA,
        "grid_hash": ds.grid_hash,
        "seed": ds.seed,
        "n_records": len(ds.records),
        "status_counts": ds.counts(),
        "sampling": ds.spec.to_dict(),
    }
    with open(path + ".manifest.json", "w") as fh:
        fh.write(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def load_dataset(path: str) -> Dataset:
    with open(path + ".manifest.json") as fh:
        manifest = json.load(fh)
    if manifest.get("schema") != DATASET_SCHEMA:
        raise ValidationError(f"unsupported dataset schema in {path}")
    records = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValidationError(
                    f"{path} line {lineno}: corrupted record ({exc})") from exc
    if len(records) != manifest["n_records"]:
        raise ValidationError(
            f"dataset {path} has {len(records)} records, manifest says "
            f"{manifest['n_records']}")
    return Dataset(grid_hash=manifest["grid_hash"], seed=manifest["seed"],
                   spec=sampler_from_dict(manifest["sampling"]),
                   records=records)


# ---------------------------------------------------------------------------
# ensemble distance
# ---------------------------------------------------------------------------


def scenario_matrix(scenarios) -> np.ndarray:
    """Bus-level input coordinates, one row per scenario: per-bus loads then
    per-wind-generator power, MW. The common space for comparing ensembles
    drawn by different samplers."""
    return np.array([np.concatenate([sc.loads, sc.wind]) for sc in scenarios])


def record_matrix(records) -> np.ndarray:
    """Same coordinates as :func:`scenario_matrix`, from dataset records."""
    return np.array([list(r["loads"]) + list(r["wind"]) for r in records])


def ensemble_distance(X, Y, normalize=False):
    """Mean pairwise Euclidean distance between two sample ensembles.

    D = (1/mn) sum_i sum_j ||x_i - y_j||. Deliberately uncentered: identical
    ensembles score their internal spread, not zero. With ``normalize`` both
    ensembles are scaled by the pooled per-dimension standard deviation
    first, making the distance unitless.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if X.shape[1] != Y.shape[1]:
        raise ValidationError("ensembles must share their dimension")
    if X.shape[0] == 0 or Y.shape[0] == 0:
        raise ValidationError("ensembles must be nonempty")
    if normalize:
        pooled = np.concatenate([X, Y], axis=0)
        scale = pooled.std(axis=0)
        scale[scale == 0] = 1.0
        X = X / scale
        Y = Y / scale
    # ||x - y||^2 = ||x||^2 + ||y||^2 - 2 x.y, clipped against rounding
    xx = np.sum(X * X, axis=1)[:, None]
    yy = np.sum(Y * Y, axis=1)[None, :]
    sq = np.maximum(xx + yy - 2.0 * (X @ Y.T), 0.0)
    return float(np.mean(np.sqrt(sq)))


def centered_ensemble_distance(X, Y, normalize=False):
    """Between-ensemble distance with the within-ensemble spread removed:
    D(X,Y) - (D(X,X) + D(Y,Y)) / 2. Zero when the ensembles coincide; a
    diagnostic companion to :func:`ensemble_distance`, not a replacement."""
    return (ensemble_distance(X, Y, normalize)
            - 0.5 * (ensemble_distance(X, X, normalize)
                     + ensemble_distance(Y, Y, normalize)))
