"""Grid model: parsing, validation, round trips, wind designation, zones."""

import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gridrisk.errors import CaseParseError, ValidationError
from gridrisk.grid import (Branch, Bus, Generator, Grid, build_susceptance,
                           contiguous_zones, designate_wind, grid_from_json,
                           grid_hash, grid_to_case_text, grid_to_json,
                           load_case, parse_case, partition_zones, validate)

from _helpers import random_toy_grid, two_bus_grid

CASE_TEXT = """\
function mpc = tiny
% three buses, two branches, two generators
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
    1  3   0    0 0 0 1 1 0 138 1 1.06 0.94;
    2  1  90.5  0 0 0 1 1 0 138 1 1.06 0.94;
    5  2  10    0 0 0 1 1 0 138 1 1.06 0.94;
];
mpc.gen = [
    1  0 0 0 0 1 100 1 250  0;
    5  0 0 0 0 1 100 1  80 10;
    5  0 0 0 0 1 100 0  40  0;  % out of service, dropped
];
mpc.branch = [
    1 2 0.01 0.085 0 120 0 0 0 0 1 -360 360;
    2 5 0.02 0.161 0   0 0 0 0 0 0 -360 360;
    1 5 0.01 0.100 0  60 0 0 0 0 1 -360 360;
];
mpc.gencost = [
    2 0 0 3 0.01 14.0 100;
    2 0 0 2 31.5 0;
    2 0 0 2  5.0 0;
];
"""


class TestParseCase:
    def test_values(self):
        g = parse_case(CASE_TEXT)
        assert g.name == "tiny"
        assert g.base_mva == 100.0
        assert [b.id for b in g.buses] == [1, 2, 5]
        assert [b.kind for b in g.buses] == ["slack", "PQ", "PV"]
        assert g.buses[1].base_load == 90.5
        # third generator is out of service and dropped
        assert len(g.generators) == 2
        g0, g1 = g.generators
        assert (g0.bus, g0.p_min, g0.p_max, g0.kind) == (1, 0.0, 250.0, "slack")
        assert g0.marginal_cost == 14.0  # linear term of the quadratic row
        assert (g1.bus, g1.p_max, g1.marginal_cost) == (5, 80.0, 31.5)
        assert g1.kind == "dispatchable"

    def test_branches(self):
        g = parse_case(CASE_TEXT)
        b0, b1, b2 = g.branches
        assert (b0.from_bus, b0.to_bus, b0.reactance_x) == (1, 2, 0.085)
        assert b0.flow_limit == 120.0 and b0.in_service
        assert b1.flow_limit == math.inf          # RATE_A = 0 means no limit
        assert not b1.in_service
        assert b2.flow_limit == 60.0

    def test_malformed_row_reports_line(self):
        bad = CASE_TEXT.replace("2  1  90.5", "2  oops  90.5")
        with pytest.raises(CaseParseError, match=r"line 7"):
            parse_case(bad)

    def test_unsupported_bus_type(self):
        bad = CASE_TEXT.replace("5  2  10", "5  4  10")
        with pytest.raises(CaseParseError, match="bus type"):
            parse_case(bad)

    def test_piecewise_cost_rejected(self):
        bad = CASE_TEXT.replace("2 0 0 3 0.01 14.0 100", "1 0 0 2 10 100 20 200")
        with pytest.raises(CaseParseError, match="polynomial"):
            parse_case(bad)

    def test_cubic_cost_rejected(self):
        bad = CASE_TEXT.replace("2 0 0 3 0.01 14.0 100", "2 0 0 4 0 0.01 14.0 100")
        with pytest.raises(CaseParseError, match="degree"):
            parse_case(bad)

    def test_missing_table(self):
        bad = "\n".join(l for l in CASE_TEXT.splitlines() if "gen = [" not in l
                        and not l.startswith("    1  0") and not l.startswith("    5  0"))
        with pytest.raises(CaseParseError, match="mpc.gen"):
            parse_case(bad.replace("];", "];", 1))

    def test_unterminated_matrix(self):
        bad = CASE_TEXT[:CASE_TEXT.rindex("];")]
        with pytest.raises(CaseParseError, match="unterminated"):
            parse_case(bad)


class TestValidate:
    def base(self):
        return two_bus_grid()

    def test_duplicate_ids(self):
        g = self.base()
        g.buses[1] = dataclasses.replace(g.buses[1], id=1)
        with pytest.raises(ValidationError, match="duplicate"):
            validate(g)

    def test_slack_count(self):
        g = self.base()
        g.buses[0] = dataclasses.replace(g.buses[0], kind="PQ")
        with pytest.raises(ValidationError, match="slack"):
            validate(g)
        g.buses[0] = dataclasses.replace(g.buses[0], kind="slack")
        g.buses[1] = dataclasses.replace(g.buses[1], kind="slack")
        with pytest.raises(ValidationError, match="slack"):
            validate(g)

    def test_branch_checks(self):
        g = self.base()
        g.branches[0] = dataclasses.replace(g.branches[0], to_bus=9)
        with pytest.raises(ValidationError, match="unknown bus"):
            validate(g)
        g.branches[0] = dataclasses.replace(g.branches[0], to_bus=1)
        with pytest.raises(ValidationError, match="self-loop"):
            validate(g)
        g.branches[0] = Branch(1, 2, -0.1, 100.0)
        with pytest.raises(ValidationError, match="reactance"):
            validate(g)
        g.branches[0] = Branch(1, 2, 0.1, 0.0)
        with pytest.raises(ValidationError, match="flow limit"):
            validate(g)

    def test_generator_checks(self):
        g = self.base()
        g.generators[0] = dataclasses.replace(g.generators[0], p_min=120.0)
        with pytest.raises(ValidationError, match="p_min"):
            validate(g)
        g.generators[0] = Generator(1, 0.0, 100.0, 5.0, kind="wind")
        with pytest.raises(ValidationError, match="wind"):
            validate(g)
        g.generators.clear()
        with pytest.raises(ValidationError, match="no generators"):
            validate(g)

    def test_disconnected(self):
        g = Grid(
            buses=[Bus(1, "slack", 0.0), Bus(2, "PQ", 10.0),
                   Bus(3, "PQ", 10.0), Bus(4, "PQ", 0.0)],
            branches=[Branch(1, 2, 0.1, 100.0), Branch(3, 4, 0.1, 100.0)],
            generators=[Generator(1, 0.0, 50.0, 10.0, kind="slack")],
        )
        with pytest.raises(ValidationError, match="disconnected"):
            validate(g)

    def test_out_of_service_can_disconnect(self):
        g = two_bus_grid()
        g.branches[0] = dataclasses.replace(g.branches[0], in_service=False)
        with pytest.raises(ValidationError, match="disconnected"):
            validate(g)


class TestRoundTrips:
    def test_case_text_round_trip(self):
        g = load_case("case118sx")
        assert parse_case(grid_to_case_text(g)) == g

    def test_json_round_trip(self):
        g = parse_case(CASE_TEXT)
        assert grid_from_json(grid_to_json(g)) == g

    def test_json_round_trip_with_zones(self):
        g = designate_wind(load_case("case9sx"), 0.25, seed=3)
        g = dataclasses.replace(g, zones=partition_zones(g, contiguous_zones(g, 3)))
        assert grid_from_json(grid_to_json(g)) == g

    def test_json_rejects_other_documents(self):
        with pytest.raises(ValidationError):
            grid_from_json('{"format": "something-else", "version": 1}')

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_random_grid_json_identity(self, seed):
        g = random_toy_grid(np.random.default_rng(seed))
        assert grid_from_json(grid_to_json(g)) == g

    def test_hash_tracks_content(self):
        g = load_case("case9sx")
        h = grid_hash(g)
        assert h == grid_hash(parse_case(grid_to_case_text(g)))
        g2 = dataclasses.replace(
            g, buses=[dataclasses.replace(g.buses[0], base_load=1.0)] + g.buses[1:])
        assert grid_hash(g2) != h


class TestDesignateWind:
    def test_count_and_determinism(self):
        g = load_case("case118sx")
        w1 = designate_wind(g, 0.2, seed=7)
        w2 = designate_wind(g, 0.2, seed=7)
        assert w1 == w2
        assert len(w1.wind_generators) == int(0.2 * len(g.generators))
        assert designate_wind(g, 0.2, seed=8) != w1

    def test_wind_is_free_and_never_slack(self):
        g = designate_wind(load_case("case118sx"), 0.3, seed=1)
        for w in g.wind_generators:
            assert w.marginal_cost == 0.0
        kinds = {gen.kind for gen in g.generators}
        assert kinds == {"slack", "dispatchable", "wind"}
        slack_bus = g.slack_bus.id
        assert all(gen.bus != slack_bus for gen in g.wind_generators)

    def test_zero_fraction_is_identity(self):
        g = load_case("case9sx")
        assert designate_wind(g, 0.0, seed=5) == g

    def test_too_large_fraction(self):
        g = two_bus_grid()  # single generator, at the slack bus
        g.generators.append(Generator(2, 0.0, 50.0, 20.0))
        with pytest.raises(ValidationError, match="dispatchable"):
            designate_wind(g, 0.9, seed=0)

    def test_fraction_range(self):
        with pytest.raises(ValidationError):
            designate_wind(two_bus_grid(), 1.0, seed=0)


class TestSusceptance:
    def test_small_matrix(self):
        g = parse_case(CASE_TEXT)  # branch 2-5 out of service
        B = build_susceptance(g)
        y12, y15 = 1 / 0.085, 1 / 0.100
        expect = np.array([[y12 + y15, -y12, -y15],
                           [-y12, y12, 0.0],
                           [-y15, 0.0, y15]])
        assert np.allclose(B.matrix, expect)
        assert B.slack_index == 0
        assert B.reduced.shape == (2, 2)
        assert np.allclose(B.reduced, expect[1:, 1:])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_symmetry_and_zero_row_sums(self, seed):
        g = random_toy_grid(np.random.default_rng(seed))
        M = build_susceptance(g).matrix
        assert np.allclose(M, M.T)
        assert np.allclose(M.sum(axis=1), 0.0, atol=1e-9)

    def test_zero_reactance_rejected(self):
        g = two_bus_grid()
        g.branches[0] = dataclasses.replace(g.branches[0], reactance_x=0.0)
        with pytest.raises(ValidationError, match="reactance"):
            build_susceptance(g)


class TestZones:
    def grid3(self):
        g = Grid(
            buses=[Bus(1, "slack", 100.0), Bus(2, "PQ", 50.0), Bus(3, "PQ", 0.0)],
            branches=[Branch(1, 2, 0.1, 100.0), Branch(2, 3, 0.1, 100.0)],
            generators=[Generator(1, 0.0, 200.0, 10.0, kind="slack"),
                        Generator(3, 0.0, 60.0, 0.0, kind="wind"),
                        Generator(2, 0.0, 20.0, 0.0, kind="wind")],
        )
        return validate(g)

    def test_shares(self):
        g = self.grid3()
        zp = partition_zones(g, {1: 1, 2: 2, 3: 2})
        assert zp.n_zones == 2
        assert zp.zone_load == {1: 100.0, 2: 50.0}
        assert zp.zone_wind_capacity == {1: 0.0, 2: 80.0}
        assert zp.load_share[1] == 1.0
        assert zp.load_share[2] == 1.0 and zp.load_share[3] == 0.0
        assert zp.wind_share[1] == pytest.approx(60 / 80)
        assert zp.wind_share[2] == pytest.approx(20 / 80)
        assert any("zone 1" in w for w in zp.warnings)  # no wind in zone 1

    def test_share_sums(self):
        g = designate_wind(load_case("case118sx"), 0.2, seed=2)
        zp = partition_zones(g, contiguous_zones(g, 3))
        for z in zp.zones():
            loads = sum(zp.load_share[b] for b in zp.buses_in_zone(z))
            assert loads == pytest.approx(1.0)
        winds = {}
        for k, w in zp.wind_share.items():
            z = zp.zone_of_bus[g.generators[k].bus]
            winds[z] = winds.get(z, 0.0) + w
        for z, total in winds.items():
            assert total == pytest.approx(1.0)

    def test_assignment_errors(self):
        g = self.grid3()
        with pytest.raises(ValidationError, match="cover"):
            partition_zones(g, {1: 1, 2: 1})
        with pytest.raises(ValidationError, match="labels"):
            partition_zones(g, {1: 1, 2: 3, 3: 3})

    def test_contiguous_cover(self):
        g = load_case("case118sx")
        asn = contiguous_zones(g, 3)
        assert set(asn) == {b.id for b in g.buses}
        assert sorted(set(asn.values())) == [1, 2, 3]
        zp = partition_zones(g, asn)
        assert sum(zp.zone_load.values()) == pytest.approx(
            sum(b.base_load for b in g.buses))


class TestLoadCase:
    def test_bundled(self):
        for name in ("case9sx", "case118sx", "case300sx"):
            g = load_case(name)
            assert g.name == name

    def test_dimensions(self):
        g = load_case("case118sx")
        assert (g.n_buses, len(g.branches), len(g.generators)) == (118, 186, 54)
        g = load_case("case300sx")
        assert (g.n_buses, len(g.branches), len(g.generators)) == (300, 411, 69)

    def test_missing_name(self):
        with pytest.raises(CaseParseError, match="case9sx"):
            load_case("nope_such_case")

    def test_from_path(self, tmp_path):
        p = tmp_path / "g.m"
        p.write_text(grid_to_case_text(two_bus_grid()))
        assert load_case(str(p)) == two_bus_grid()
        q = tmp_path / "g.json"
        q.write_text(grid_to_json(two_bus_grid()))
        assert load_case(str(q)) == two_bus_grid()
