"""Command-line front end: the pipeline stages as verbs over one JSON config.

Every experimental knob lives in a single run configuration. Each verb reads
it, performs one stage, and drops plain JSON/CSV artifacts into the run's
output directory, starting with a frozen copy of the fully resolved
configuration. Rerunning a verb with the same config and seeds reproduces its
artifacts byte for byte; the ``timing_*`` and ``bench`` files are wall-clock
measurement logs and the one exception.

Config document (JSON)::

    {
      "grid": "case118sx",             bundled name or path to a .m/.json file
      "out_dir": "runs/demo",
      "wind": {"fraction": 0.25, "seed": 11},
      "zones": {"count": 3},           or {"assignment": {"<bus id>": zone}}
      "training_bounds": {"load_band": [0.8, 1.2]},   or a full uniform spec
      "copula": {"load_cv": 0.1, "rho_load": 0.6, ...},  knobs or a full spec
      "train": {"epochs": 500, "width": 64, "seed": 0, ...},
      "risk": {"epsilon": 0.9, "mrr_override": {...}, ...},
      "samples": {"train": 1000, "assess": 2000},
      "seeds": {"dataset": 1, "assess": 2},
      "sweep": {"factors": [1.0, 1.05, 1.1, 1.15, 1.2, 1.25]}
    }

Only ``grid`` and ``out_dir`` are required; everything else has the defaults
shown by ``resolved_config.json``. ``train.validation_fraction`` defaults to
0.3 here (the CLI's 70/30 convention). The frozen resolved config is itself a
valid input to ``--config`` and pins the grid content by hash.

Exit codes: 0 success, 1 domain error (validation, solver, training),
2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dcopf import solve_dcopf
from .errors import ConfigError, GridRiskError, SolverError
from .grid import (GEN_SLACK, GEN_WIND, Grid, contiguous_zones,
                   designate_wind, grid_hash, load_case, partition_zones)
from .risk import (SOURCE_GNN, SOURCE_OPF, RiskConfig, assess,
                   compare_reports, ensemble_from_gnn, ensemble_from_opf,
                   load_report, save_report, write_branch_table_csv,
                   write_conditional_csv)
from .scenario import (CopulaSpec, PowerCurve, UniformEnsembleSpec,
                       default_copula_spec, default_uniform_bounds,
                       ensemble_distance, generate_dataset,
                       generate_scenarios, load_dataset, record_matrix,
                       save_dataset, scenario_matrix, shift_load_means)
from .surrogate import (HEADS, TrainConfig, load_model, predict_batch,
                        save_model, train)

CONFIG_FORMAT = "gridrisk-run"
CONFIG_VERSION = 1
RESOLVED_CONFIG = "resolved_config.json"

_ENGINES = (SOURCE_OPF, SOURCE_GNN)
_SWEEP_FACTORS = (1.0, 1.05, 1.1, 1.15, 1.2, 1.25)


def dataset_file(mode):
    return f"dataset_{mode}.jsonl"


def model_file(head):
    return f"model_{head}.json"


def loss_file(head):
    return f"loss_{head}.csv"


def report_file(engine):
    return f"report_{engine}.json"


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    """One run's knobs, resolved against the grid they name.

    ``grid`` is the loaded network with wind designated and zones attached;
    the sampler specs are fully expanded. ``resolved()`` returns the frozen
    document every verb writes before doing work.
    """

    grid_file: str
    out_dir: str
    wind_fraction: float
    wind_seed: int
    zone_assignment: dict
    grid: Grid
    uniform: UniformEnsembleSpec
    copula: CopulaSpec
    train: TrainConfig
    risk: RiskConfig
    n_train: int
    n_assess: int
    dataset_seed: int
    assess_seed: int
    sweep_factors: tuple

    def resolved(self):
        return {
            "format": CONFIG_FORMAT,
            "version": CONFIG_VERSION,
            "grid": self.grid_file,
            "grid_hash": grid_hash(self.grid),
            "out_dir": self.out_dir,
            "wind": {"fraction": self.wind_fraction, "seed": self.wind_seed},
            "zones": {"assignment": {str(b): z for b, z in
                                     sorted(self.zone_assignment.items())}},
            "training_bounds": self.uniform.to_dict(),
            "copula": self.copula.to_dict(),
            "train": self.train.to_dict(),
            "risk": self.risk.to_dict(),
            "samples": {"train": self.n_train, "assess": self.n_assess},
            "seeds": {"dataset": self.dataset_seed,
                      "assess": self.assess_seed},
            "sweep": {"factors": list(self.sweep_factors)},
        }

    def path(self, name):
        return os.path.join(self.out_dir, name)


def _check_keys(doc, allowed, where):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a JSON object")
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ConfigError(f"unknown {where} key(s): {', '.join(extra)}")


_TOP_KEYS = {"format", "version", "grid", "grid_hash", "out_dir", "wind",
             "zones", "training_bounds", "copula", "train", "risk",
             "samples", "seeds", "sweep"}


def config_from_dict(doc) -> RunConfig:
    """Validate a config document as a whole and resolve it against its grid.

    Accepts both hand-written configs and previously frozen resolved ones;
    a stored ``grid_hash`` must still match the grid file's content.
    """
    _check_keys(doc, _TOP_KEYS, "config")
    if doc.get("format", CONFIG_FORMAT) != CONFIG_FORMAT:
        raise ConfigError(f"not a run config: format {doc.get('format')!r}")
    if doc.get("version", CONFIG_VERSION) != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {doc.get('version')!r}")
    for key in ("grid", "out_dir"):
        if key not in doc:
            raise ConfigError(f"config is missing {key!r}")

    grid_file = str(doc["grid"])
    grid = load_case(grid_file)

    wind = doc.get("wind", {})
    _check_keys(wind, {"fraction", "seed"}, "wind")
    wind_fraction = float(wind.get("fraction", 0.0))
    wind_seed = int(wind.get("seed", 0))
    grid = designate_wind(grid, wind_fraction, wind_seed)

    zones = doc.get("zones", {"count": 1})
    _check_keys(zones, {"count", "assignment"}, "zones")
    if ("count" in zones) == ("assignment" in zones):
        raise ConfigError("zones needs exactly one of 'count' or 'assignment'")
    if "assignment" in zones:
        assignment = {int(b): int(z) for b, z in zones["assignment"].items()}
    else:
        assignment = contiguous_zones(grid, int(zones["count"]))
    grid = dataclasses.replace(grid,
                               zones=partition_zones(grid, assignment))

    stored_hash = doc.get("grid_hash")
    if stored_hash is not None and stored_hash != grid_hash(grid):
        raise ConfigError(
            f"grid {grid_file!r} no longer matches the hash this config was "
            "resolved with; refusing to mix artifacts across grids")

    bounds = doc.get("training_bounds", {})
    if bounds.get("kind") == "uniform":
        uniform = UniformEnsembleSpec.from_dict(bounds).validate_against(grid)
    else:
        _check_keys(bounds, {"load_band"}, "training_bounds")
        band = tuple(float(v) for v in bounds.get("load_band", (0.8, 1.2)))
        uniform = default_uniform_bounds(grid, band)

    cop = doc.get("copula", {})
    if cop.get("kind") == "copula":
        copula = CopulaSpec.from_dict(cop).validate_against(grid)
    else:
        knob_names = {"load_cv", "rho_load", "rho_wind", "rho_cross",
                      "wind_shape", "wind_scale", "power_curve"}
        _check_keys(cop, knob_names, "copula")
        knobs = {k: float(v) for k, v in cop.items() if k != "power_curve"}
        if "power_curve" in cop:
            knobs["power_curve"] = PowerCurve.from_dict(cop["power_curve"])
        copula = default_copula_spec(grid, **knobs)

    train_doc = dict(doc.get("train", {}))
    defaults = TrainConfig().to_dict()
    _check_keys(train_doc, defaults, "train")
    train_doc.setdefault("validation_fraction", 0.3)
    train_cfg = TrainConfig(**{**defaults, **train_doc})

    risk_cfg = RiskConfig.from_dict(doc.get("risk", {}))

    samples = doc.get("samples", {})
    _check_keys(samples, {"train", "assess"}, "samples")
    n_train = int(samples.get("train", 1000))
    n_assess = int(samples.get("assess", 2000))
    if n_train < 0 or n_assess < 0:
        raise ConfigError("sample counts must be nonnegative")

    seeds = doc.get("seeds", {})
    _check_keys(seeds, {"dataset", "assess"}, "seeds")

    sweep = doc.get("sweep", {})
    _check_keys(sweep, {"factors"}, "sweep")
    factors = tuple(float(f) for f in sweep.get("factors", _SWEEP_FACTORS))
    if not factors:
        raise ConfigError("sweep.factors must not be empty")
    if any(f <= 0 for f in factors):
        raise ConfigError("sweep factors must be positive")

    return RunConfig(
        grid_file=grid_file, out_dir=str(doc["out_dir"]),
        wind_fraction=wind_fraction, wind_seed=wind_seed,
        zone_assignment=assignment, grid=grid,
        uniform=uniform, copula=copula, train=train_cfg, risk=risk_cfg,
        n_train=n_train, n_assess=n_assess,
        dataset_seed=int(seeds.get("dataset", 1)),
        assess_seed=int(seeds.get("assess", 2)),
        sweep_factors=factors)


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))


def write_resolved_config(cfg: RunConfig) -> str:
    """Freeze the resolved config into the output directory."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = cfg.path(RESOLVED_CONFIG)
    with open(path, "w") as fh:
        fh.write(json.dumps(cfg.resolved(), sort_keys=True, indent=2) + "\n")
    return path


def _write_json(path, doc):
    with open(path, "w") as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_info(path_or_name, stream=None) -> int:
    """Print a short structural summary of a grid."""
    stream = stream or sys.stdout
    g = load_case(path_or_name)
    wind = len(g.wind_generators)
    slack_gens = sum(1 for gen in g.generators if gen.kind == GEN_SLACK)
    in_service = sum(1 for br in g.branches if br.in_service)
    base_load = sum(b.base_load for b in g.buses)
    stream.write(f"grid {g.name}\n")
    stream.write(f"  buses       {g.n_buses:6d}  (slack bus {g.slack_bus.id})\n")
    stream.write(f"  branches    {len(g.branches):6d}  ({in_service} in service)\n")
    stream.write(f"  generators  {len(g.generators):6d}  "
                 f"({wind} wind, {slack_gens} slack)\n")
    stream.write(f"  base load   {base_load:9.1f} MW\n")
    if g.zones is None:
        stream.write("  zones       none\n")
    else:
        zp = g.zones
        stream.write("  zone    buses    load MW    wind cap MW\n")
        n_in_zone = {z: 0 for z in zp.zones()}
        for b in g.buses:
            n_in_zone[zp.zone_of_bus[b.id]] += 1
        for z in zp.zones():
            stream.write(f"  {z:4d} {n_in_zone[z]:8d} {zp.zone_load[z]:10.1f} "
                         f"{zp.zone_wind_capacity[z]:14.1f}\n")
    return 0


def cmd_gen(cfg: RunConfig, mode, stream=None) -> str:
    """Sample scenarios, solve each, and persist the dataset for ``mode``
    (train: uniform sampler / dataset seed; forecast: copula / assess seed).
    Returns the dataset path."""
    stream = stream or sys.stdout
    if mode not in ("train", "forecast"):
        raise ConfigError(f"unknown dataset mode {mode!r}")
    write_resolved_config(cfg)
    if mode == "train":
        spec, n, seed = cfg.uniform, cfg.n_train, cfg.dataset_seed
    else:
        spec, n, seed = cfg.copula, cfg.n_assess, cfg.assess_seed
    ds = generate_dataset(cfg.grid, spec, n, seed)
    counts = ds.counts()
    bad = counts.get("infeasible", 0)
    if n > 0 and bad > 0.5 * n:
        raise SolverError(
            f"{bad} of {n} scenarios unsolvable under mode={mode}; the "
            "sampler ranges are out of step with the grid's limits "
            f"(status counts: {counts})")
    path = cfg.path(dataset_file(mode))
    save_dataset(ds, path)
    stream.write(f"wrote {len(ds)} records to {path} "
                 f"(seed {seed}, statuses {counts or '{}'})\n")
    return path


def cmd_train(cfg: RunConfig, dataset_path, head, stream=None) -> str:
    """Fit one surrogate head on a dataset; persist the model JSON and the
    per-epoch loss curve CSV. Returns the model path."""
    stream = stream or sys.stdout
    write_resolved_config(cfg)
    ds = load_dataset(dataset_path)
    model, report = train(cfg.grid, ds, head, cfg.train)
    mpath = cfg.path(model_file(head))
    save_model(model, mpath)
    cpath = cfg.path(loss_file(head))
    with open(cpath, "w") as fh:
        fh.write("epoch,train_loss,validation_loss\n")
        for i, tl in enumerate(report.train_loss):
            vl = repr(report.validation_loss[i]) if report.validation_loss else ""
            fh.write(f"{i + 1},{repr(tl)},{vl}\n")
    stream.write(f"trained {head}: {report.n_train} train / "
                 f"{report.n_validation} validation records, "
                 f"{len(report.train_loss)} epochs in {report.seconds:.1f}s, "
                 f"final loss {report.train_loss[-1]:.6f} -> {mpath}\n")
    return mpath


def _load_models(cfg: RunConfig):
    models = {}
    for head in HEADS:
        path = cfg.path(model_file(head))
        if not os.path.exists(path):
            raise ConfigError(f"missing surrogate model {path}; "
                              f"run 'train --head {head}' first")
        models[head] = load_model(path)
    return models


def cmd_assess(cfg: RunConfig, engine, stream=None) -> str:
    """Draw the forecast ensemble, evaluate it with the chosen engine, and
    persist the risk report plus branch tables. Returns the report path."""
    stream = stream or sys.stdout
    if engine not in _ENGINES:
        raise ConfigError(f"unknown engine {engine!r}; expected {_ENGINES}")
    if cfg.n_assess < 1:
        raise ConfigError("assessment needs at least one sample")
    write_resolved_config(cfg)
    m, seed = cfg.n_assess, cfg.assess_seed
    _, scenarios = generate_scenarios(cfg.grid, cfg.copula, m, seed)
    models = _load_models(cfg) if engine == SOURCE_GNN else None
    t0 = time.perf_counter()
    if engine == SOURCE_OPF:
        ensemble, dropped = ensemble_from_opf(cfg.grid, scenarios)
    else:
        ensemble, dropped = ensemble_from_gnn(cfg.grid, scenarios, models), []
    seconds = time.perf_counter() - t0

    report = assess(cfg.grid, ensemble, cfg.risk, seed=seed)
    rpath = cfg.path(report_file(engine))
    save_report(report, rpath)
    write_branch_table_csv(report, cfg.path(f"branches_{engine}.csv"))
    write_conditional_csv(report, cfg.path(f"conditional_{engine}.csv"))
    _write_json(cfg.path(f"samples_{engine}.json"), {
        "engine": engine, "seed": seed, "requested": m, "used": ensemble.M,
        "dropped_indices": list(dropped)})
    # wall-clock log; the one artifact a rerun will not reproduce exactly
    _write_json(cfg.path(f"timing_{engine}.json"), {
        "engine": engine, "samples": ensemble.M, "seconds_total": seconds,
        "seconds_per_sample": seconds / max(ensemble.M, 1)})

    p_sys = report.scopes["system"]["probability"]
    note = f", {len(dropped)} unsolvable dropped" if dropped else ""
    stream.write(f"{engine}: {ensemble.M} samples{note}, "
                 f"P[reserve short | system] = {p_sys:.4f}, "
                 f"{seconds / max(ensemble.M, 1) * 1e3:.3f} ms/sample "
                 f"-> {rpath}\n")
    return rpath


_SCOPE_W = 10  # label column width in the compare table


def _scope_label(scope):
    return scope if scope == "system" else f"zone {scope}"


def cmd_compare(path_a, path_b, out_dir, stream=None) -> str:
    """Compare two risk reports (A is the reference); write the error summary
    JSON and print a side-by-side table. Returns the summary path."""
    stream = stream or sys.stdout
    ra, rb = load_report(path_a), load_report(path_b)
    summary = compare_reports(ra, rb)
    os.makedirs(out_dir, exist_ok=True)
    spath = os.path.join(out_dir, "error_summary.json")
    _write_json(spath, summary.to_dict())

    stream.write(f"reserve inadequacy: {ra.source} (reference, M={ra.M}) "
                 f"vs {rb.source} (M={rb.M})\n")
    stream.write(f"  {'scope':<{_SCOPE_W}} {'P.ref':>8} {'P.cand':>8} "
                 f"{'|dP|':>8} {'risk.ref':>12} {'risk.cand':>12}\n")
    zones = sorted(s for s in ra.scopes if s != "system")
    for scope in ["system"] + zones:
        row, other = ra.scopes[scope], rb.scopes[scope]
        stream.write(
            f"  {_scope_label(scope):<{_SCOPE_W}} {row['probability']:8.4f} "
            f"{other['probability']:8.4f} "
            f"{abs(row['probability'] - other['probability']):8.4f} "
            f"{row['risk']:12.2f} {other['risk']:12.2f}\n")
    stream.write(f"branch overload (eps={ra.epsilon:g}): "
                 f"max |dP| {summary.max_branch_abs_error:.4f}, "
                 f"mean |dP| {summary.mean_branch_abs_error:.4f}\n")
    if summary.mape_branch_probability is None:
        stream.write("MAPE: no branch with reference P >= 0.01\n")
    else:
        stream.write(f"MAPE over {summary.n_mape_branches} branches with "
                     f"reference P >= 0.01: "
                     f"{summary.mape_branch_probability:.2f}%\n")
    return spath


def cmd_distance_sweep(cfg: RunConfig, stream=None) -> str:
    """Re-run both engines across mean-shifted forecast variants; emit a CSV
    of (variant, input distance, surrogate error) sorted by distance.

    Every variant draws with the same assess seed, so rows differ only
    through the shifted marginals. A variant that fails keeps a row with
    whatever was computed plus the error message, and the sweep continues.
    """
    stream = stream or sys.stdout
    if cfg.n_assess < 1:
        raise ConfigError("sweep needs at least one sample per variant")
    write_resolved_config(cfg)
    models = _load_models(cfg)
    train_path = cfg.path(dataset_file("train"))
    if not os.path.exists(train_path):
        raise ConfigError(f"missing training dataset {train_path}; "
                          "run 'gen --mode train' first")
    X = record_matrix(load_dataset(train_path).records)

    rows = []
    for factor in cfg.sweep_factors:
        row = {"factor": factor, "distance": None, "mape": None,
               "max_scope": None, "n_mape": None, "dropped": None,
               "status": "ok"}
        try:
            variant = shift_load_means(cfg.copula, factor)
            _, scenarios = generate_scenarios(cfg.grid, variant,
                                              cfg.n_assess, cfg.assess_seed)
            row["distance"] = ensemble_distance(X, scenario_matrix(scenarios))
            ens_opf, dropped = ensemble_from_opf(cfg.grid, scenarios)
            row["dropped"] = len(dropped)
            ref = assess(cfg.grid, ens_opf, cfg.risk, seed=cfg.assess_seed)
            ens_gnn = ensemble_from_gnn(cfg.grid, scenarios, models)
            cand = assess(cfg.grid, ens_gnn, cfg.risk, seed=cfg.assess_seed)
            summary = compare_reports(ref, cand)
            row["mape"] = summary.mape_branch_probability
            row["max_scope"] = summary.max_scope_abs_error
            row["n_mape"] = summary.n_mape_branches
        except GridRiskError as exc:
            row["status"] = f"failed: {exc}"
        rows.append(row)

    done = sorted((r for r in rows if r["status"] == "ok"),
                  key=lambda r: r["distance"])
    failed = [r for r in rows if r["status"] != "ok"]

    def cell(v):
        return "" if v is None else repr(v) if isinstance(v, float) else str(v)

    path = cfg.path("sweep.csv")
    with open(path, "w") as fh:
        fh.write("factor,distance,mape_percent,max_scope_abs_error,"
                 "n_mape_branches,n_dropped,status\n")
        for r in done + failed:
            status = r["status"].replace(",", ";").replace("\n", " ")
            fh.write(",".join([cell(r["factor"]), cell(r["distance"]),
                               cell(r["mape"]), cell(r["max_scope"]),
                               cell(r["n_mape"]), cell(r["dropped"]),
                               f'"{status}"' if status != "ok" else "ok"])
                     + "\n")

    stream.write(f"  {'factor':>8} {'distance':>12} {'MAPE %':>10}\n")
    for r in done:
        mape = f"{r['mape']:10.2f}" if r["mape"] is not None else " " * 10
        stream.write(f"  {r['factor']:8.3f} {r['distance']:12.2f} {mape}\n")
    for r in failed:
        stream.write(f"  {r['factor']:8.3f} {r['status']}\n")
    stream.write(f"wrote {path}\n")
    return path


def cmd_bench(cfg: RunConfig, stream=None) -> dict:
    """Median per-sample wall time, OPF solver vs surrogate batch, on the
    forecast ensemble. Returns (and persists) the timing document."""
    stream = stream or sys.stdout
    if cfg.n_assess < 1:
        raise ConfigError("bench needs at least one sample")
    write_resolved_config(cfg)
    models = _load_models(cfg)
    m = cfg.n_assess
    _, scenarios = generate_scenarios(cfg.grid, cfg.copula, m,
                                      cfg.assess_seed)

    # the production chain warm-starts each solve from the previous basis
    times, warm = [], None
    for sc in scenarios:
        t0 = time.perf_counter()
        sol = solve_dcopf(cfg.grid, sc, warm_state=warm)
        times.append(time.perf_counter() - t0)
        if sol.warm_state is not None:
            warm = sol.warm_state
    opf_median = float(np.median(times))

    gnn_total = 0.0
    for head in HEADS:
        _, seconds = predict_batch(models[head], cfg.grid, scenarios)
        gnn_total += seconds
    gnn_per_sample = gnn_total / m  # batched: every sample costs the same

    speedup = opf_median / gnn_per_sample if gnn_per_sample > 0 else float("inf")
    doc = {
        "kernel": _kernels.DEFAULT_NAME,
        "samples": m,
        "opf_median_s": opf_median,
        "opf_mean_s": float(np.mean(times)),
        "gnn_batch_s": gnn_total,
        "gnn_per_sample_s": gnn_per_sample,
        "speedup": speedup,
    }
    _write_json(cfg.path("bench.json"), doc)
    stream.write(f"OPF ({_kernels.DEFAULT_NAME} kernel): "
                 f"{opf_median * 1e3:.3f} ms/sample median | "
                 f"surrogate (3 heads, batched): "
                 f"{gnn_per_sample * 1e3:.3f} ms/sample | "
                 f"speedup x{speedup:.1f}\n")
    return doc


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _config_for(args) -> RunConfig:
    """Load the config and fold the command-line overrides into it."""
    cfg = load_config(args.config)
    if getattr(args, "out", None):
        cfg = dataclasses.replace(cfg, out_dir=args.out)
    samples = getattr(args, "samples", None)
    if samples is not None:
        if samples < 0:
            raise ConfigError("--samples must be nonnegative")
        if args.verb == "gen" and args.mode == "train":
            cfg = dataclasses.replace(cfg, n_train=samples)
        else:
            cfg = dataclasses.replace(cfg, n_assess=samples)
    seed = getattr(args, "seed", None)
    if seed is not None:
        if args.verb == "train":
            doc = {**cfg.train.to_dict(), "seed": seed}
            cfg = dataclasses.replace(cfg, train=TrainConfig(**doc))
        elif args.verb == "gen" and args.mode == "train":
            cfg = dataclasses.replace(cfg, dataset_seed=seed)
        else:
            cfg = dataclasses.replace(cfg, assess_seed=seed)
    return cfg


def _run_info(args):
    return cmd_info(args.grid)


def _run_gen(args):
    cmd_gen(_config_for(args), args.mode)
    return 0


def _run_train(args):
    cfg = _config_for(args)
    dataset = args.dataset or cfg.path(dataset_file("train"))
    cmd_train(cfg, dataset, args.head)
    return 0


def _run_assess(args):
    cmd_assess(_config_for(args), args.engine)
    return 0


def _run_compare(args):
    out_dir = args.out
    if out_dir is None and args.config:
        out_dir = load_config(args.config).out_dir
    if out_dir is None:
        raise ConfigError("compare needs --out or --config for its output")
    cmd_compare(args.report_a, args.report_b, out_dir)
    return 0


def _run_sweep(args):
    cmd_distance_sweep(_config_for(args))
    return 0


def _run_bench(args):
    cmd_bench(_config_for(args))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridrisk",
        description="Monte Carlo reliability and risk assessment for grids, "
                    "with a graph-network surrogate standing in for the "
                    "optimal power flow solver.")
    sub = parser.add_subparsers(dest="verb", required=True, metavar="verb")

    def add(name, func, help_text, config=True, samples=True, seed=True):
        q = sub.add_parser(name, help=help_text)
        q.set_defaults(func=func)
        if config:
            q.add_argument("--config", required=True,
                           help="run configuration JSON")
            q.add_argument("--out", help="override the output directory")
            if samples:
                q.add_argument("--samples", type=int,
                               help="override the sample count")
            if seed:
                q.add_argument("--seed", type=int,
                               help="override the seed this verb draws from")
        return q

    q = sub.add_parser("info", help="summarize a grid file or bundled case")
    q.add_argument("grid", help="case path or bundled name (e.g. case118sx)")
    q.set_defaults(func=_run_info)

    q = add("gen", _run_gen, "sample scenarios and solve them into a dataset")
    q.add_argument("--mode", choices=("train", "forecast"), default="train",
                   help="train: uniform sampler; forecast: copula (default "
                        "train)")

    q = add("train", _run_train, "fit one surrogate head on a dataset")
    q.add_argument("--head", required=True, choices=HEADS,
                   help="which quantity the surrogate predicts")
    q.add_argument("--dataset",
                   help="dataset path (default: the run's train dataset)")

    q = add("assess", _run_assess, "estimate reliability and risk")
    q.add_argument("--engine", choices=_ENGINES, default=SOURCE_OPF,
                   help="what evaluates each scenario (default opf)")

    q = sub.add_parser("compare",
                       help="error summary between two risk reports")
    q.add_argument("report_a", help="reference report JSON")
    q.add_argument("report_b", help="candidate report JSON")
    q.add_argument("--out", help="output directory for the summary")
    q.add_argument("--config", help="borrow out_dir from this config")
    q.set_defaults(func=_run_compare)

    add("sweep", _run_sweep,
        "surrogate error vs distance from the training distribution")
    add("bench", _run_bench, "per-sample wall time, solver vs surrogate")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message
        return int(exc.code or 0)
    try:
        return int(args.func(args) or 0)
    except GridRiskError as exc:
        print(f"gridrisk: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"gridrisk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
