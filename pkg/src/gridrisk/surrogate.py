"""Graph-convolutional surrogates for the OPF outcome.

Three separate models share one architecture: three graph-convolution layers
(H_{l+1} = ReLU(A_hat H_l W_l + b_l) with A_hat = D^{-1/2}(A+I)D^{-1/2}) and
a single linear readout. They differ only in what the readout produces:

  bus_pg     a shared per-node scalar, read at the buses that host
             dispatchable generation -> total dispatch per generator bus
  branch_pf  a shared scalar over concatenated endpoint embeddings
             -> flow per in-service branch
  system     three outputs from mean-pooled embeddings
             -> [reserve, shedding, total cost]

Training minimizes L = w1 * L_E + w2 * L_IE on z-scored targets, where L_E
is plain MSE and L_IE penalizes predictions outside their physical bounds
through the squared hinge zeta = max(x - x_max, 0) - min(x - x_min, 0).
Gradients are exact reverse-mode, computed by hand; the optimizer is Adam
with an exponential learning-rate decay to a tenth of the initial rate.

Models are grid-specific: output slots are tied to bus/branch positions of
the grid the model was trained on, and the stored grid hash is checked at
prediction time.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .dcopf import Scenario, wind_by_bus
from .errors import ConfigError, TrainingError, ValidationError
from .grid import Grid, grid_hash

HEAD_BUS = "bus_pg"
HEAD_BRANCH = "branch_pf"
HEAD_SYSTEM = "system"
HEADS = (HEAD_BUS, HEAD_BRANCH, HEAD_SYSTEM)

SYSTEM_OUTPUTS = ("reserve", "shedding", "cost")

N_FEATURES = 6
MODEL_SCHEMA = 1

_STD_FLOOR = 1e-9


# ---------------------------------------------------------------------------
# encoding
# ---------------------------------------------------------------------------


@dataclass
class GraphEncoding:
    """One scenario as GCN input: the degree-normalized adjacency with self
    loops and a 6-feature row per bus (load MW, wind MW, local dispatchable
    p_min / p_max / marginal-cost sums, slack flag)."""

    normalized_adjacency: np.ndarray
    node_features: np.ndarray
    normalized: bool = False


def normalized_adjacency(grid: Grid) -> np.ndarray:
    """A_hat = D^{-1/2}(A + I)D^{-1/2} over in-service branches; parallel
    branches collapse to a single edge."""
    n = grid.n_buses
    index = grid.bus_index()
    A = np.eye(n)
    for br in grid.branches:
        if not br.in_service:
            continue
        i, j = index[br.from_bus], index[br.to_bus]
        A[i, j] = 1.0
        A[j, i] = 1.0
    d = A.sum(axis=1)
    return A / np.sqrt(np.outer(d, d))


def _static_features(grid: Grid) -> np.ndarray:
    """The scenario-independent feature columns (p_min, p_max, cost, slack)."""
    n = grid.n_buses
    index = grid.bus_index()
    out = np.zeros((n, 4))
    for g in grid.dispatchable_generators:
        i = index[g.bus]
        out[i, 0] += g.p_min
        out[i, 1] += g.p_max
        out[i, 2] += g.marginal_cost
    out[grid.slack_index(), 3] = 1.0
    return out


def encode(grid: Grid, scenario: Scenario, normalization=None) -> GraphEncoding:
    """Build the GCN input for one scenario. ``normalization`` is an optional
    (mean, std) pair per feature column; without it features stay raw."""
    if len(scenario.loads) != grid.n_buses:
        raise ValidationError("scenario does not match the grid bus count")
    feats = np.empty((grid.n_buses, N_FEATURES))
    feats[:, 0] = scenario.loads
    feats[:, 1] = wind_by_bus(grid, scenario)
    feats[:, 2:] = _static_features(grid)
    if normalization is not None:
        mean, std = normalization
        feats = (feats - mean) / std
    return GraphEncoding(normalized_adjacency=normalized_adjacency(grid),
                         node_features=feats,
                         normalized=normalization is not None)


def _feature_batch(grid: Grid, scenarios) -> np.ndarray:
    static = _static_features(grid)
    out = np.empty((len(scenarios), grid.n_buses, N_FEATURES))
    for b, sc in enumerate(scenarios):
        out[b, :, 0] = sc.loads
        out[b, :, 1] = wind_by_bus(grid, sc)
        out[b, :, 2:] = static
    return out


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------


@dataclass
class SurrogateModel:
    """A trained GCN surrogate. ``params`` holds W1,b1,W2,b2,W3,b3 for the
    graph layers plus R, rb for the readout. ``outputs`` names the output
    slots (generator bus ids, branch positions, or the system QoI names)
    while ``slots`` pins them to node indices so the forward pass needs no
    grid. Bounds and normalization are in physical units."""

    head: str
    width: int
    params: dict[str, np.ndarray]
    feature_mean: np.ndarray
    feature_std: np.ndarray
    target_mean: np.ndarray
    target_std: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    outputs: list
    slots: dict
    grid_hash: str
    training: dict | None = None

    @property
    def layer_weights(self):
        return [(self.params[f"W{i}"], self.params[f"b{i}"]) for i in (1, 2, 3)]

    @property
    def readout_weights(self):
        return self.params["R"], self.params["rb"]

    @property
    def n_outputs(self):
        return len(self.outputs)

    def normalize_features(self, feats):
        return (feats - self.feature_mean) / self.feature_std

    def denormalize_targets(self, y):
        return y * self.target_std + self.target_mean

    def normalize_targets(self, y):
        return (y - self.target_mean) / self.target_std

    def normalized_bounds(self):
        lo = (self.lower - self.target_mean) / self.target_std
        hi = (self.upper - self.target_mean) / self.target_std
        return lo, hi


@dataclass
class TrainConfig:
    epochs: int = 500
    batch_size: int = 32
    learning_rate: float = 1e-3
    w1: float = 0.5
    w2: float = 0.5
    seed: int = 0
    validation_fraction: float = 0.15
    width: int = 64

    def __post_init__(self):
        if not (self.w1 > 0 and self.w2 > 0):
            raise ConfigError("loss weights must be positive")
        if abs(self.w1 + self.w2 - 1.0) > 1e-12:
            raise ConfigError("loss weights must sum to 1")
        if not 0 <= self.validation_fraction < 1:
            raise ConfigError("validation fraction must lie in [0, 1)")
        if self.epochs < 1 or self.batch_size < 1 or self.width < 1:
            raise ConfigError("epochs, batch size and width must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning rate must be positive")

    def to_dict(self):
        return {"epochs": self.epochs, "batch_size": self.batch_size,
                "learning_rate": self.learning_rate, "w1": self.w1,
                "w2": self.w2, "seed": self.seed,
                "validation_fraction": self.validation_fraction,
                "width": self.width}


@dataclass
class TrainingReport:
    head: str
    n_train: int
    n_validation: int
    train_loss: list[float]
    validation_loss: list[float]
    seconds: float

    def to_dict(self):
        return {"head": self.head, "n_train": self.n_train,
                "n_validation": self.n_validation,
                "train_loss": self.train_loss,
                "validation_loss": self.validation_loss,
                "seconds": self.seconds}


# ---------------------------------------------------------------------------
# forward pass
# ---------------------------------------------------------------------------


def _head_layout(grid: Grid, head: str):
    """Output names and node-index slots for a head on this grid."""
    index = grid.bus_index()
    if head == HEAD_BUS:
        buses = sorted({g.bus for g in grid.dispatchable_generators})
        return buses, {"node_index": [index[b] for b in buses]}
    if head == HEAD_BRANCH:
        pos = [k for k, br in enumerate(grid.branches) if br.in_service]
        return pos, {"from_index": [index[grid.branches[k].from_bus]
                                    for k in pos],
                     "to_index": [index[grid.branches[k].to_bus]
                                  for k in pos]}
    if head == HEAD_SYSTEM:
        return list(SYSTEM_OUTPUTS), {}
    raise ConfigError(f"unknown surrogate head {head!r}; expected one of {HEADS}")


def _selectors(head: str, slots: dict, n: int):
    """0/1 matrices picking output rows out of the node embeddings."""
    if head == HEAD_BUS:
        idx = slots["node_index"]
        E = np.zeros((len(idx), n))
        E[np.arange(len(idx)), idx] = 1.0
        return (E,)
    if head == HEAD_BRANCH:
        fi, ti = slots["from_index"], slots["to_index"]
        Ef = np.zeros((len(fi), n))
        Et = np.zeros((len(ti), n))
        Ef[np.arange(len(fi)), fi] = 1.0
        Et[np.arange(len(ti)), ti] = 1.0
        return Ef, Et
    return ()


def _forward_batch(params, head, A_hat, F, selectors):
    """Batched forward pass on normalized features. Returns the normalized
    output (B, n_out) and the cache needed for backprop."""
    H = F
    cache = {"A": A_hat, "inputs": [], "pre": []}
    for i in (1, 2, 3):
        AH = A_hat @ H
        P = AH @ params[f"W{i}"] + params[f"b{i}"]
        cache["inputs"].append(AH)
        cache["pre"].append(P)
        H = np.maximum(P, 0.0)
    cache["H3"] = H
    R, rb = params["R"], params["rb"]
    if head == HEAD_BUS:
        (E,) = selectors
        picked = E @ H                       # (B, n_out, w)
        pooled = H.mean(axis=-2)             # (B, w)
        ctx = np.concatenate(
            [picked, np.broadcast_to(pooled[:, None, :], picked.shape)],
            axis=-1)
        pre = ctx @ params["V"] + params["vb"]
        hid = np.maximum(pre, 0.0)
        Y = hid @ R[:, 0] + rb[0]
        cache["picked"] = picked
        cache["pooled"] = pooled
        cache["rpre"] = pre
        cache["rhid"] = hid
    elif head == HEAD_BRANCH:
        Ef, Et = selectors
        w = H.shape[-1]
        pf, pt = Ef @ H, Et @ H
        Y = pf @ R[:w, 0] + pt @ R[w:, 0] + rb[0]
        cache["picked"] = (pf, pt)
    else:
        pooled = H.mean(axis=-2)             # (B, w)
        Y = pooled @ R + rb
        cache["picked"] = pooled
    return Y, cache


def forward(model: SurrogateModel, enc: GraphEncoding) -> np.ndarray:
    """Physical-unit prediction for one encoding."""
    feats = enc.node_features
    if not enc.normalized:
        feats = model.normalize_features(feats)
    selectors = _selectors(model.head, model.slots, feats.shape[0])
    Y, _ = _forward_batch(model.params, model.head,
                          enc.normalized_adjacency, feats[None], selectors)
    return model.denormalize_targets(Y[0])


def predict_batch(model: SurrogateModel, grid: Grid, scenarios):
    """Predictions (n_scenarios, n_outputs) in physical units, plus the
    wall-clock seconds the batch took."""
    if grid_hash(grid) != model.grid_hash:
        raise ValidationError("model was trained for a different grid")
    t0 = time.perf_counter()
    if len(scenarios) == 0:
        return np.zeros((0, model.n_outputs)), time.perf_counter() - t0
    A_hat = normalized_adjacency(grid)
    F = model.normalize_features(_feature_batch(grid, scenarios))
    selectors = _selectors(model.head, model.slots, grid.n_buses)
    Y, _ = _forward_batch(model.params, model.head, A_hat, F, selectors)
    return model.denormalize_targets(Y), time.perf_counter() - t0


# ---------------------------------------------------------------------------
# loss and gradients
# ---------------------------------------------------------------------------


def loss(pred, target, bounds, w1=0.5, w2=0.5):
    """L = w1 * MSE + w2 * mean(zeta^2) with the two-sided hinge zeta.
    ``bounds`` is a (lower, upper) pair of arrays. Returns (L, L_E, L_IE)."""
    pred = np.asarray(pred, dtype=float)
    target = np.asarray(target, dtype=float)
    if pred.shape != target.shape:
        raise ValidationError("prediction and target shapes differ")
    lo, hi = bounds
    L_E = float(np.mean((pred - target) ** 2))
    zeta = _zeta(pred, lo, hi)
    L_IE = float(np.mean(zeta ** 2))
    return w1 * L_E + w2 * L_IE, L_E, L_IE


def _zeta(x, lo, hi):
    over = np.maximum(x - hi, 0.0)
    under = np.minimum(x - lo, 0.0)
    return np.where(np.isfinite(hi), over, 0.0) - np.where(
        np.isfinite(lo), under, 0.0)


def _loss_grad(Y, T, lo, hi, w1, w2):
    """Loss on a normalized batch plus dL/dY."""
    m = Y.size
    diff = Y - T
    # signed violation: zeta = |s|, so zeta^2 = s^2 and d zeta^2/dY = 2s
    # (negative below the lower bound, where the penalty pushes Y upward)
    over = np.where(np.isfinite(hi), np.maximum(Y - hi, 0.0), 0.0)
    under = np.where(np.isfinite(lo), np.minimum(Y - lo, 0.0), 0.0)
    s = over + under
    L_E = float(np.sum(diff ** 2) / m)
    L_IE = float(np.sum(s ** 2) / m)
    dY = (2.0 * w1 * diff + 2.0 * w2 * s) / m
    return w1 * L_E + w2 * L_IE, L_E, L_IE, dY


def _backward_batch(params, head, cache, selectors, dY):
    """Exact reverse-mode gradients for every parameter."""
    grads = {}
    H3 = cache["H3"]
    R = params["R"]
    if head == HEAD_BUS:
        (E,) = selectors
        picked = cache["picked"]
        grads["R"] = np.einsum("bow,bo->w", picked, dY)[:, None]
        grads["rb"] = np.array([float(np.sum(dY))])
        dH = np.einsum("on,bo,w->bnw", E, dY, R[:, 0])
    elif head == HEAD_BRANCH:
        Ef, Et = selectors
        pf, pt = cache["picked"]
        w = H3.shape[-1]
        gR = np.concatenate([np.einsum("bow,bo->w", pf, dY),
                             np.einsum("bow,bo->w", pt, dY)])
        grads["R"] = gR[:, None]
        grads["rb"] = np.array([float(np.sum(dY))])
        dH = (np.einsum("on,bo,w->bnw", Ef, dY, R[:w, 0])
              + np.einsum("on,bo,w->bnw", Et, dY, R[w:, 0]))
    else:
        pooled = cache["picked"]
        grads["R"] = pooled.T @ dY
        grads["rb"] = dY.sum(axis=0)
        n = H3.shape[-2]
        dH = np.repeat((dY @ R.T)[:, None, :], n, axis=1) / n
    A = cache["A"]
    for i in (3, 2, 1):
        P = cache["pre"][i - 1]
        AH = cache["inputs"][i - 1]
        dP = dH * (P > 0)
        grads[f"W{i}"] = np.einsum("bnf,bnw->fw", AH, dP)
        grads[f"b{i}"] = dP.sum(axis=(0, 1))
        dAH = dP @ params[f"W{i}"].T
        dH = A.T @ dAH
    return grads


def gradients(model: SurrogateModel, enc: GraphEncoding, target,
              w1=0.5, w2=0.5):
    """Parameter gradients of the training loss for one scenario, using the
    model's own normalization and bounds. ``target`` is in physical units.
    Returns (grads dict, (L, L_E, L_IE))."""
    feats = enc.node_features
    if not enc.normalized:
        feats = model.normalize_features(feats)
    selectors = _selectors(model.head, model.slots, feats.shape[0])
    Y, cache = _forward_batch(model.params, model.head,
                              enc.normalized_adjacency, feats[None], selectors)
    T = model.normalize_targets(np.asarray(target, dtype=float))[None]
    lo, hi = model.normalized_bounds()
    L, L_E, L_IE, dY = _loss_grad(Y, T, lo, hi, w1, w2)
    grads = _backward_batch(model.params, model.head, cache, selectors, dY)
    return grads, (L, L_E, L_IE)


# ---------------------------------------------------------------------------
# targets and bounds per head
# ---------------------------------------------------------------------------


def _head_targets(grid: Grid, head: str, records):
    """Target matrix (n_records, n_out) plus physical bounds for a head."""
    outputs, _ = _head_layout(grid, head)
    if head == HEAD_BUS:
        index = {b: r for r, b in enumerate(outputs)}
        disp = grid.dispatchable_generators
        T = np.zeros((len(records), len(outputs)))
        for m, rec in enumerate(records):
            for d, g in zip(rec["dispatch"], disp):
                T[m, index[g.bus]] += d
        lo = np.zeros(len(outputs))
        hi = np.zeros(len(outputs))
        for g in disp:
            lo[index[g.bus]] += g.p_min
            hi[index[g.bus]] += g.p_max
        return outputs, T, lo, hi
    if head == HEAD_BRANCH:
        T = np.array([[rec["flows"][k] for k in outputs] for rec in records])
        lim = np.array([grid.branches[k].flow_limit for k in outputs])
        return outputs, T, -lim, lim
    T = np.array([[rec["reserve"], rec["shedding"], rec["cost"]]
                  for rec in records])
    return outputs, T, np.zeros(3), np.full(3, np.inf)


def _scenarios_from_records(grid: Grid, records):
    return [Scenario(loads=np.asarray(r["loads"], dtype=float),
                     wind=np.asarray(r["wind"], dtype=float))
            for r in records]


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


def _init_params(rng, n_features, width, head):
    def glorot(fan_in, fan_out):
        s = np.sqrt(6.0 / (fan_in + fan_out))
        return rng.uniform(-s, s, size=(fan_in, fan_out))

    read_in = 2 * width if head == HEAD_BRANCH else width
    read_out = len(SYSTEM_OUTPUTS) if head == HEAD_SYSTEM else 1
    params = {
        "W1": glorot(n_features, width), "b1": np.zeros(width),
        "W2": glorot(width, width), "b2": np.zeros(width),
        "W3": glorot(width, width), "b3": np.zeros(width),
        "R": glorot(read_in, read_out), "rb": np.zeros(read_out),
    }
    if head == HEAD_BUS:
        # dispatch is set by system-wide merit order, which three hops of
        # propagation cannot see; the bus readout therefore joins each node
        # row with the graph mean and passes through one hidden layer so a
        # unit's on/off threshold against the global level is representable
        params["V"] = glorot(2 * width, width)
        params["vb"] = np.zeros(width)
    return params


def train(grid: Grid, dataset, head: str, config: TrainConfig | None = None):
    """Fit one surrogate head on the feasible records of a dataset.
    Returns (SurrogateModel, TrainingReport)."""
    config = config or TrainConfig()
    if head not in HEADS:
        raise ConfigError(f"unknown surrogate head {head!r}; expected one of {HEADS}")
    if dataset.grid_hash != grid_hash(grid):
        raise ValidationError("dataset was generated for a different grid")
    records = dataset.feasible_records()
    if len(records) < 2:
        raise TrainingError("need at least two feasible records to train")

    t0 = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    perm = rng.permutation(len(records))
    n_val = int(round(config.validation_fraction * len(records)))
    n_val = min(n_val, len(records) - 1)
    val_idx, train_idx = perm[:n_val], perm[n_val:]

    scenarios = _scenarios_from_records(grid, records)
    F_raw = _feature_batch(grid, scenarios)
    outputs, T_raw, lo_phys, hi_phys = _head_targets(grid, head, records)

    # normalization statistics come from the training split alone
    f_mean = F_raw[train_idx].reshape(-1, N_FEATURES).mean(axis=0)
    f_std = F_raw[train_idx].reshape(-1, N_FEATURES).std(axis=0)
    f_std[f_std < _STD_FLOOR] = 1.0
    t_mean = T_raw[train_idx].mean(axis=0)
    t_std = T_raw[train_idx].std(axis=0)
    t_std[t_std < _STD_FLOOR] = 1.0

    F = (F_raw - f_mean) / f_std
    T = (T_raw - t_mean) / t_std
    lo = (lo_phys - t_mean) / t_std
    hi = (hi_phys - t_mean) / t_std

    A_hat = normalized_adjacency(grid)
    _, slots = _head_layout(grid, head)
    selectors = _selectors(head, slots, grid.n_buses)
    params = _init_params(rng, N_FEATURES, config.width, head)

    adam_m = {k: np.zeros_like(v) for k, v in params.items()}
    adam_v = {k: np.zeros_like(v) for k, v in params.items()}
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0

    train_curve, val_curve = [], []
    decay_span = max(config.epochs - 1, 1)
    for epoch in range(config.epochs):
        lr = config.learning_rate * 10.0 ** (-epoch / decay_span)
        order = rng.permutation(len(train_idx))
        total, seen = 0.0, 0
        for start in range(0, len(order), config.batch_size):
            rows = train_idx[order[start:start + config.batch_size]]
            Y, cache = _forward_batch(params, head, A_hat, F[rows], selectors)
            L, _, _, dY = _loss_grad(Y, T[rows], lo, hi, config.w1, config.w2)
            if not np.isfinite(L):
                raise TrainingError(
                    f"loss became non-finite at epoch {epoch} ({head})")
            grads = _backward_batch(params, head, cache, selectors, dY)
            step += 1
            for k in params:
                adam_m[k] = beta1 * adam_m[k] + (1 - beta1) * grads[k]
                adam_v[k] = beta2 * adam_v[k] + (1 - beta2) * grads[k] ** 2
                mhat = adam_m[k] / (1 - beta1 ** step)
                vhat = adam_v[k] / (1 - beta2 ** step)
                params[k] -= lr * mhat / (np.sqrt(vhat) + eps)
            total += L * len(rows)
            seen += len(rows)
        train_curve.append(total / seen)
        if n_val:
            Yv, _ = _forward_batch(params, head, A_hat, F[val_idx], selectors)
            Lv, _, _, _ = _loss_grad(Yv, T[val_idx], lo, hi,
                                     config.w1, config.w2)
            val_curve.append(Lv)

    model = SurrogateModel(
        head=head, width=config.width, params=params,
        feature_mean=f_mean, feature_std=f_std,
        target_mean=t_mean, target_std=t_std,
        lower=lo_phys, upper=hi_phys, outputs=outputs, slots=slots,
        grid_hash=dataset.grid_hash,
        training={"config": config.to_dict(), "n_train": len(train_idx),
                  "n_validation": n_val,
                  "final_train_loss": train_curve[-1],
                  "final_validation_loss": val_curve[-1] if val_curve else None})
    report = TrainingReport(head=head, n_train=len(train_idx),
                            n_validation=n_val, train_loss=train_curve,
                            validation_loss=val_curve,
                            seconds=time.perf_counter() - t0)
    return model, report


# ---------------------------------------------------------------------------
# persistence
# ---------------------------------------------------------------------------


def _bound_to_json(arr):
    return [None if not np.isfinite(v) else float(v) for v in arr]


def _bound_from_json(vals, sign):
    return np.array([sign * np.inf if v is None else float(v) for v in vals])


def save_model(model: SurrogateModel, path: str):
    doc = {
        "format": "gridrisk-surrogate",
        "version": MODEL_SCHEMA,
        "head": model.head,
        "width": model.width,
        "grid_hash": model.grid_hash,
        "outputs": model.outputs,
        "slots": model.slots,
        "weights": {k: {"shape": list(v.shape), "data": v.ravel().tolist()}
                    for k, v in sorted(model.params.items())},
        "feature_norm": {"mean": model.feature_mean.tolist(),
                         "std": model.feature_std.tolist()},
        "target_norm": {"mean": model.target_mean.tolist(),
                        "std": model.target_std.tolist()},
        "bounds": {"lower": _bound_to_json(model.lower),
                   "upper": _bound_to_json(model.upper)},
        "training": model.training,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path: str) -> SurrogateModel:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != "gridrisk-surrogate" or \
            doc.get("version") != MODEL_SCHEMA:
        raise ValidationError(f"{path} is not a supported surrogate model file")
    params = {k: np.array(w["data"], dtype=float).reshape(w["shape"])
              for k, w in doc["weights"].items()}
    return SurrogateModel(
        head=doc["head"], width=doc["width"], params=params,
        feature_mean=np.array(doc["feature_norm"]["mean"]),
        feature_std=np.array(doc["feature_norm"]["std"]),
        target_mean=np.array(doc["target_norm"]["mean"]),
        target_std=np.array(doc["target_norm"]["std"]),
        lower=_bound_from_json(doc["bounds"]["lower"], -1),
        upper=_bound_from_json(doc["bounds"]["upper"], +1),
        outputs=doc["outputs"],
        slots=doc["slots"],
        grid_hash=doc["grid_hash"],
        training=doc.get("training"))
