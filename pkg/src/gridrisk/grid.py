"""Power network model: case-file parsing, validation, susceptance matrix,
zone partitioning and wind-fleet designation.

The network is held in MW / per-unit hybrid form: all limits, loads and
capacities at the public interface are MW; branch reactances are per-unit on
``base_mva``. Solver-facing matrices are built in per-unit.

Grids and everything derived from them are treated as immutable: operations
that "modify" a grid (:func:`designate_wind`, :func:`partition_zones`) return
a new object and never touch their input.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import CaseParseError, ValidationError

BUS_PQ = "PQ"
BUS_PV = "PV"
BUS_SLACK = "slack"

GEN_DISPATCHABLE = "dispatchable"
GEN_WIND = "wind"
GEN_SLACK = "slack"

_BUS_TYPE_CODE = {1: BUS_PQ, 2: BUS_PV, 3: BUS_SLACK}


@dataclass
class Bus:
    id: int
    kind: str
    base_load: float  # MW


@dataclass
class Branch:
    from_bus: int
    to_bus: int
    reactance_x: float          # per-unit
    flow_limit: float           # MW; math.inf means unlimited
    in_service: bool = True


@dataclass
class Generator:
    bus: int
    p_min: float                # MW
    p_max: float                # MW
    marginal_cost: float        # $/MWh, linear term only
    kind: str = GEN_DISPATCHABLE


@dataclass
class ZonePartition:
    """Fixed zonal split of a grid with per-bus load shares and per-generator
    wind shares (each zone's shares sum to one).

    ``load_share`` is keyed by original bus id, ``wind_share`` by generator
    position in ``grid.generators``. Build partitions only after wind
    designation so the wind fleet is final.
    """

    n_zones: int
    zone_of_bus: dict[int, int]
    load_share: dict[int, float]
    wind_share: dict[int, float]
    zone_load: dict[int, float]           # MW of base load aggregated per zone
    zone_wind_capacity: dict[int, float]  # MW of wind p_max aggregated per zone
    warnings: tuple[str, ...] = ()

    def zones(self):
        return list(range(1, self.n_zones + 1))

    def buses_in_zone(self, zone):
        return [b for b, z in self.zone_of_bus.items() if z == zone]


@dataclass
class Grid:
    """Static network: buses, branches, generators plus optional zone data."""

    buses: list[Bus]
    branches: list[Branch]
    generators: list[Generator]
    base_mva: float = 100.0
    zones: ZonePartition | None = None
    name: str = "grid"

    # -- index helpers ----------------------------------------------------

    @property
    def n_buses(self):
        return len(self.buses)

    def bus_index(self):
        """Map original bus id -> internal index 0..n-1."""
        return {b.id: i for i, b in enumerate(self.buses)}

    @property
    def slack_bus(self):
        for b in self.buses:
            if b.kind == BUS_SLACK:
                return b
        raise ValidationError("grid has no slack bus")

    def slack_index(self):
        return self.bus_index()[self.slack_bus.id]

    def generators_of_kind(self, *kinds):
        return [g for g in self.generators if g.kind in kinds]

    @property
    def dispatchable_generators(self):
        """Generators that are dispatched by the OPF (includes the slack-bus
        generator, excludes wind)."""
        return self.generators_of_kind(GEN_DISPATCHABLE, GEN_SLACK)

    @property
    def wind_generators(self):
        return self.generators_of_kind(GEN_WIND)

    def base_loads(self):
        return np.array([b.base_load for b in self.buses], dtype=float)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def validate(grid: Grid) -> Grid:
    """Check structural invariants; returns the grid unchanged on success."""
    ids = [b.id for b in grid.buses]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate bus ids")
    index = grid.bus_index()

    slacks = [b for b in grid.buses if b.kind == BUS_SLACK]
    if len(slacks) != 1:
        raise ValidationError(f"expected exactly one slack bus, found {len(slacks)}")

    for br in grid.branches:
        if br.from_bus not in index or br.to_bus not in index:
            raise ValidationError(
                f"branch {br.from_bus}-{br.to_bus} references unknown bus")
        if br.from_bus == br.to_bus:
            raise ValidationError(f"branch at bus {br.from_bus} is a self-loop")
        if not br.reactance_x > 0:
            raise ValidationError(
                f"branch {br.from_bus}-{br.to_bus} has non-positive reactance")
        if not br.flow_limit > 0:
            raise ValidationError(
                f"branch {br.from_bus}-{br.to_bus} has non-positive flow limit")

    if not grid.generators:
        raise ValidationError("grid has no generators")
    for g in grid.generators:
        if g.bus not in index:
            raise ValidationError(f"generator references unknown bus {g.bus}")
        if not (0 <= g.p_min <= g.p_max):
            raise ValidationError(
                f"generator at bus {g.bus}: need 0 <= p_min <= p_max")
        if g.kind == GEN_WIND and g.marginal_cost != 0:
            raise ValidationError(
                f"wind generator at bus {g.bus} must have zero marginal cost")

    if grid.base_mva <= 0:
        raise ValidationError("base_mva must be positive")

    # connectivity over in-service branches
    n = grid.n_buses
    adj = [[] for _ in range(n)]
    for br in grid.branches:
        if br.in_service:
            i, j = index[br.from_bus], index[br.to_bus]
            adj[i].append(j)
            adj[j].append(i)
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                stack.append(v)
    if not seen.all():
        missing = [grid.buses[i].id for i in np.flatnonzero(~seen)[:5]]
        raise ValidationError(f"network is disconnected (e.g. buses {missing})")
    return grid


# ---------------------------------------------------------------------------
# MATPOWER-style case parsing
# ---------------------------------------------------------------------------

_MATRIX_RE = re.compile(r"mpc\.(\w+)\s*=\s*\[")
_SCALAR_RE = re.compile(r"mpc\.(\w+)\s*=\s*([^\[;]+);")
_NAME_RE = re.compile(r"function\s+mpc\s*=\s*(\w+)")


def _strip_comment(line: str) -> str:
    pos = line.find("%")
    return line if pos < 0 else line[:pos]


def _parse_matrices(text: str):
    """Extract `mpc.<name> = [rows];` tables, tracking source line numbers."""
    matrices = {}
    scalars = {}
    name = None
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        raw = _strip_comment(lines[i])
        m = _NAME_RE.search(raw)
        if m:
            name = m.group(1)
        m = _SCALAR_RE.search(raw)
        if m and "[" not in raw:
            try:
                scalars[m.group(1)] = float(m.group(2))
            except ValueError:
                pass  # non-numeric scalar (e.g. version string), ignored
        m = _MATRIX_RE.search(raw)
        if m:
            table = m.group(1)
            rows = []
            buf = raw[m.end():]
            while True:
                lineno = i + 1
                closed = "]" in buf
                if closed:
                    buf = buf[: buf.index("]")]
                for chunk in buf.split(";"):
                    chunk = chunk.strip()
                    if not chunk:
                        continue
                    try:
                        rows.append(([float(t) for t in chunk.split()], lineno))
                    except ValueError:
                        raise CaseParseError(
                            f"malformed row in mpc.{table}: {chunk!r}", line=lineno)
                if closed:
                    break
                i += 1
                if i >= len(lines):
                    raise CaseParseError(f"unterminated matrix mpc.{table}",
                                         line=lineno)
                buf = _strip_comment(lines[i])
            matrices[table] = rows
        i += 1
    return name, scalars, matrices


def parse_case(text: str) -> Grid:
    """Parse a MATPOWER-style case file (bus/gen/branch/gencost tables,
    polynomial costs of degree <= 2) into a validated :class:`Grid`.

    Out-of-service generators are dropped; branch status is kept as
    ``in_service``. A zero RATE_A is the MATPOWER convention for "no limit"
    and becomes ``flow_limit = inf``.
    """
    parsed = _parse_matrices(text)
    name, scalars, matrices = parsed
    for required in ("bus", "gen", "branch"):
        if required not in matrices:
            raise CaseParseError(f"case file has no mpc.{required} table")

    base_mva = scalars.get("baseMVA", 100.0)

    buses = []
    for row, lineno in matrices["bus"]:
        if len(row) < 3:
            raise CaseParseError("bus row needs at least 3 columns", line=lineno)
        code = int(row[1])
        if code not in _BUS_TYPE_CODE:
            raise CaseParseError(
                f"unsupported bus type {code} at bus {int(row[0])}", line=lineno)
        buses.append(Bus(id=int(row[0]), kind=_BUS_TYPE_CODE[code],
                         base_load=float(row[2])))

    gencost = matrices.get("gencost", [])
    costs = []
    for row, lineno in gencost:
        if len(row) < 4:
            raise CaseParseError("gencost row needs at least 4 columns", line=lineno)
        model, ncost = int(row[0]), int(row[3])
        if model != 2:
            raise CaseParseError(
                "only polynomial (model 2) generation costs are supported",
                line=lineno)
        if ncost > 3:
            raise CaseParseError(
                "polynomial cost degree must be <= 2", line=lineno)
        coeffs = row[4:4 + ncost]
        if len(coeffs) != ncost:
            raise CaseParseError("gencost row is shorter than NCOST", line=lineno)
        # linear term: second-to-last coefficient of the polynomial
        linear = coeffs[-2] if ncost >= 2 else 0.0
        costs.append(float(linear))

    slack_ids = {b.id for b in buses if b.kind == BUS_SLACK}
    generators = []
    for k, (row, lineno) in enumerate(matrices["gen"]):
        if len(row) < 10:
            raise CaseParseError("gen row needs at least 10 columns", line=lineno)
        if int(row[7]) == 0:
            continue
        cost = costs[k] if k < len(costs) else 0.0
        kind = GEN_SLACK if int(row[0]) in slack_ids else GEN_DISPATCHABLE
        generators.append(Generator(bus=int(row[0]), p_min=float(row[9]),
                                    p_max=float(row[8]), marginal_cost=cost,
                                    kind=kind))

    branches = []
    for row, lineno in matrices["branch"]:
        if len(row) < 11:
            raise CaseParseError("branch row needs at least 11 columns", line=lineno)
        rate = float(row[5])
        branches.append(Branch(
            from_bus=int(row[0]), to_bus=int(row[1]), reactance_x=float(row[3]),
            flow_limit=math.inf if rate == 0 else rate,
            in_service=bool(int(row[10]))))

    grid = Grid(buses=buses, branches=branches, generators=generators,
                base_mva=base_mva, name=name or "case")
    return validate(grid)


def grid_to_case_text(grid: Grid) -> str:
    """Serialize a grid back to the MATPOWER-style subset read by
    :func:`parse_case`. Floats keep full precision so the round trip is exact."""
    code = {BUS_PQ: 1, BUS_PV: 2, BUS_SLACK: 3}

    def f(x):
        if x == math.inf:
            return "0"  # MATPOWER convention: 0 == unlimited
        return repr(float(x))

    out = [f"function mpc = {grid.name}", "mpc.version = '2';",
           f"mpc.baseMVA = {f(grid.base_mva)};", "mpc.bus = ["]
    for b in grid.buses:
        out.append(f"\t{b.id}\t{code[b.kind]}\t{f(b.base_load)}\t0\t0\t0\t1\t1\t0\t138\t1\t1.06\t0.94;")
    out.append("];")
    out.append("mpc.gen = [")
    for g in grid.generators:
        out.append(f"\t{g.bus}\t0\t0\t0\t0\t1\t{f(grid.base_mva)}\t1\t{f(g.p_max)}\t{f(g.p_min)};")
    out.append("];")
    out.append("mpc.branch = [")
    for br in grid.branches:
        out.append(f"\t{br.from_bus}\t{br.to_bus}\t0\t{f(br.reactance_x)}\t0\t{f(br.flow_limit)}"
                   f"\t0\t0\t0\t0\t{int(br.in_service)}\t-360\t360;")
    out.append("];")
    out.append("mpc.gencost = [")
    for g in grid.generators:
        out.append(f"\t2\t0\t0\t2\t{f(g.marginal_cost)}\t0;")
    out.append("];")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# native JSON round trip
# ---------------------------------------------------------------------------


def grid_to_json(grid: Grid) -> str:
    """Native JSON form (schema v1); inverse of :func:`grid_from_json`."""
    doc = {
        "format": "gridrisk-grid",
        "version": 1,
        "name": grid.name,
        "base_mva": float(grid.base_mva),
        "buses": [{"id": int(b.id), "kind": b.kind, "base_load": float(b.base_load)}
                  for b in grid.buses],
        "branches": [{"from_bus": int(br.from_bus), "to_bus": int(br.to_bus),
                      "reactance_x": float(br.reactance_x),
                      "flow_limit": None if br.flow_limit == math.inf
                      else float(br.flow_limit),
                      "in_service": bool(br.in_service)}
                     for br in grid.branches],
        "generators": [{"bus": int(g.bus), "p_min": float(g.p_min),
                        "p_max": float(g.p_max),
                        "marginal_cost": float(g.marginal_cost), "kind": g.kind}
                       for g in grid.generators],
        "zones": None if grid.zones is None else {
            "n_zones": grid.zones.n_zones,
            "zone_of_bus": {str(k): v for k, v in grid.zones.zone_of_bus.items()},
            "load_share": {str(k): v for k, v in grid.zones.load_share.items()},
            "wind_share": {str(k): v for k, v in grid.zones.wind_share.items()},
            "zone_load": {str(k): v for k, v in grid.zones.zone_load.items()},
            "zone_wind_capacity": {str(k): v for k, v in
                                   grid.zones.zone_wind_capacity.items()},
            "warnings": list(grid.zones.warnings),
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def grid_from_json(text: str) -> Grid:
    doc = json.loads(text)
    if doc.get("format") != "gridrisk-grid" or doc.get("version") != 1:
        raise ValidationError("not a gridrisk grid JSON document (v1)")
    zones = None
    if doc.get("zones") is not None:
        z = doc["zones"]
        zones = ZonePartition(
            n_zones=int(z["n_zones"]),
            zone_of_bus={int(k): int(v) for k, v in z["zone_of_bus"].items()},
            load_share={int(k): float(v) for k, v in z["load_share"].items()},
            wind_share={int(k): float(v) for k, v in z["wind_share"].items()},
            zone_load={int(k): float(v) for k, v in z["zone_load"].items()},
            zone_wind_capacity={int(k): float(v)
                                for k, v in z["zone_wind_capacity"].items()},
            warnings=tuple(z.get("warnings", ())),
        )
    grid = Grid(
        buses=[Bus(id=b["id"], kind=b["kind"], base_load=b["base_load"])
               for b in doc["buses"]],
        branches=[Branch(from_bus=b["from_bus"], to_bus=b["to_bus"],
                         reactance_x=b["reactance_x"],
                         flow_limit=math.inf if b["flow_limit"] is None else b["flow_limit"],
                         in_service=b["in_service"])
                  for b in doc["branches"]],
        generators=[Generator(bus=g["bus"], p_min=g["p_min"], p_max=g["p_max"],
                              marginal_cost=g["marginal_cost"], kind=g["kind"])
                    for g in doc["generators"]],
        base_mva=doc["base_mva"],
        zones=zones,
        name=doc.get("name", "grid"),
    )
    return validate(grid)


def grid_hash(grid: Grid) -> str:
    """Stable content hash used to tie datasets, models and reports to a grid."""
    return hashlib.sha256(grid_to_json(grid).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# wind designation
# ---------------------------------------------------------------------------


def designate_wind(grid: Grid, fraction: float, seed: int) -> Grid:
    """Relabel ``floor(fraction * n_generators)`` non-slack generators as wind
    turbines (zero marginal cost). The draw is a pure function of
    ``(grid, fraction, seed)``.
    """
    if not 0 <= fraction < 1:
        raise ValidationError("wind fraction must be in [0, 1)")
    n_total = len(grid.generators)
    k = int(math.floor(fraction * n_total))
    candidates = [i for i, g in enumerate(grid.generators) if g.kind != GEN_SLACK]
    if k >= len(candidates) and k > 0:
        raise ValidationError(
            f"converting {k} of {len(candidates)} non-slack generators would "
            "leave no dispatchable generator")
    if k == 0:
        return grid
    rng = np.random.default_rng(seed)
    chosen = set(rng.choice(np.array(candidates), size=k, replace=False).tolist())
    generators = [
        replace(g, kind=GEN_WIND, marginal_cost=0.0) if i in chosen else replace(g)
        for i, g in enumerate(grid.generators)
    ]
    return replace(grid, generators=generators)


# ---------------------------------------------------------------------------
# susceptance matrix
# ---------------------------------------------------------------------------


@dataclass
class BMatrix:
    """Nodal susceptance matrix in per-unit with the slack index recorded."""

    matrix: np.ndarray
    slack_index: int

    @property
    def reduced(self) -> np.ndarray:
        """Matrix with the slack row and column removed (the solvable system)."""
        keep = [i for i in range(self.matrix.shape[0]) if i != self.slack_index]
        return self.matrix[np.ix_(keep, keep)]


def build_susceptance(grid: Grid) -> BMatrix:
    """B[i][j] = -sum of 1/x over in-service branches i-j; diagonal balances
    the rows to zero. Out-of-service branches contribute nothing."""
    index = grid.bus_index()
    n = grid.n_buses
    B = np.zeros((n, n))
    for br in grid.branches:
        if not br.in_service:
            continue
        if br.reactance_x == 0:
            raise ValidationError(
                f"branch {br.from_bus}-{br.to_bus} has zero reactance")
        y = 1.0 / br.reactance_x
        i, j = index[br.from_bus], index[br.to_bus]
        B[i, j] -= y
        B[j, i] -= y
        B[i, i] += y
        B[j, j] += y
    return BMatrix(matrix=B, slack_index=grid.slack_index())


# ---------------------------------------------------------------------------
# zone partitioning
# ---------------------------------------------------------------------------


def partition_zones(grid: Grid, assignment: dict[int, int]) -> ZonePartition:
    """Build a :class:`ZonePartition` from a bus -> zone map covering every bus
    with zone labels 1..s.

    Load shares are proportional to base load within the zone; wind shares
    proportional to wind generator capacity. Zones with zero load or no wind
    capacity are recorded in ``warnings`` (disaggregation to such a zone is an
    error if it is ever handed a nonzero zonal value).
    """
    ids = {b.id for b in grid.buses}
    if set(assignment) != ids:
        missing = sorted(ids - set(assignment))[:5]
        extra = sorted(set(assignment) - ids)[:5]
        raise ValidationError(
            f"zone assignment must cover every bus exactly (missing {missing}, "
            f"unknown {extra})")
    zones = sorted(set(assignment.values()))
    s = len(zones)
    if zones != list(range(1, s + 1)):
        raise ValidationError("zone labels must be exactly 1..s")

    zone_load = {z: 0.0 for z in zones}
    for b in grid.buses:
        zone_load[assignment[b.id]] += b.base_load
    zone_cap = {z: 0.0 for z in zones}
    for g in grid.generators:
        if g.kind == GEN_WIND:
            zone_cap[assignment[g.bus]] += g.p_max

    warnings = []
    load_share = {}
    for b in grid.buses:
        z = assignment[b.id]
        load_share[b.id] = b.base_load / zone_load[z] if zone_load[z] > 0 else 0.0
    wind_share = {}
    for k, g in enumerate(grid.generators):
        if g.kind != GEN_WIND:
            continue
        z = assignment[g.bus]
        wind_share[k] = g.p_max / zone_cap[z] if zone_cap[z] > 0 else 0.0
    for z in zones:
        if zone_load[z] == 0:
            warnings.append(f"zone {z} has zero total load")
        if zone_cap[z] == 0:
            warnings.append(f"zone {z} has no wind capacity")

    return ZonePartition(n_zones=s, zone_of_bus=dict(assignment),
                         load_share=load_share, wind_share=wind_share,
                         zone_load=zone_load, zone_wind_capacity=zone_cap,
                         warnings=tuple(warnings))


def load_case(path_or_name: str) -> Grid:
    """Read a grid from a case file path, a grid JSON path, or the name of a
    bundled case (e.g. ``case118sx``)."""
    import os
    from importlib import resources

    text = None
    if os.path.exists(path_or_name):
        with open(path_or_name) as fh:
            text = fh.read()
        if path_or_name.endswith(".json"):
            return grid_from_json(text)
        return parse_case(text)
    if os.sep in path_or_name or path_or_name.endswith((".m", ".json")):
        # explicit path, not a bundled-case name
        raise FileNotFoundError(f"no such case file: {path_or_name}")
    name = path_or_name if path_or_name.endswith(".m") else path_or_name + ".m"
    ref = resources.files("gridrisk") / "data" / name
    if not ref.is_file():
        bundled = sorted(p.name[:-2] for p in (resources.files("gridrisk") / "data").iterdir()
                         if p.name.endswith(".m"))
        raise CaseParseError(
            f"no such file or bundled case: {path_or_name!r} (bundled: {bundled})")
    return parse_case(ref.read_text())


def contiguous_zones(grid: Grid, s: int) -> dict[int, int]:
    """Demo helper: split buses (in file order) into ``s`` contiguous blocks.
    Real studies should supply an explicit assignment instead."""
    if s < 1 or s > grid.n_buses:
        raise ValidationError("zone count must be in [1, n_buses]")
    n = grid.n_buses
    assignment = {}
    for i, b in enumerate(grid.buses):
        assignment[b.id] = min(s, 1 + (i * s) // n)
    return assignment
