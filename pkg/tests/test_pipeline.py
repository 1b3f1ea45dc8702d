"""Whole-pipeline tests: environment JSON in, scored report out.

Fixtures live in fixtures/ and are the same files the command line and
service tests use, so every interface sees identical inputs.
"""

import json
from pathlib import Path

import dataclasses
import pytest

from rampgen.params import params_from_overrides, load_rules
from rampgen.pipeline import generate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


def low_headroom():
    return params_from_overrides({"search": {"clearance": 1.2}})


class TestScoreFour:
    def test_flat_forty_centimetre_rise(self):
        res = generate(fixture_text("trial1_flat_040.json"))
        assert res.stage_score == 4
        assert res.status == "ok"
        assert res.error is None
        assert res.path.source == "planar"
        # climbing run long enough for the rise at 1:12
        landing_total = sum(b - a for a, b in res.path.landings)
        assert res.path.length - landing_total >= 4.8 - 1e-9
        assert res.path.intermediate_landings() == ()
        assert res.compliance.passed
        assert res.model.n_vertices > 0 and res.model.n_faces > 0

    def test_switchback_two_metre_rise(self):
        res = generate(fixture_text("trial2_switchback_200.json"))
        assert res.stage_score == 4
        assert res.path.source == "planar"
        # ceil(2.0 / 0.76) = 3 runs -> exactly 2 separators
        assert len(res.path.intermediate_landings()) == 2
        assert res.compliance.passed

    def test_narrow_alley_thirty_centimetre_rise(self):
        res = generate(fixture_text("trial3_alley_030.json"))
        assert res.stage_score == 4
        rails = [s for s in res.model.solids if s.name.startswith("railing")]
        assert len(rails) >= 2  # both sides present
        hr = res.compliance.result("R-HANDRAIL-HEIGHT")
        assert hr.passed and len(hr.measured) == 2  # measured on each side

    def test_underpass_with_reduced_headroom(self):
        # impassable at the default 2.1 m headroom ...
        strict = generate(fixture_text("underpass_low_headroom.json"))
        assert strict.stage_score == 1
        # ... but a single-height corridor exists under the slab at 1.2 m
        res = generate(fixture_text("underpass_low_headroom.json"),
                       params=low_headroom())
        assert res.stage_score == 4
        assert res.path.source == "planar"

    def test_layered_route_when_no_single_height_corridor(self):
        res = generate(fixture_text("underpass_then_climb.json"),
                       params=low_headroom())
        assert res.stage_score == 4
        assert res.path.source == "layered"
        assert any("planar route skipped" in n for n in res.report["notes"])
        # the deck ducks under the slab, then climbs to the end height
        assert res.path.stations[-1].z == pytest.approx(0.5)


class TestScoreOne:
    def test_unparseable_document(self):
        res = generate("this is not json")
        assert res.stage_score == 1
        assert res.status == "invalid"
        assert res.error_kind == "malformed_input"
        assert res.report["error"]

    def test_schema_violation(self):
        res = generate(json.dumps({"boundary": [[0, 0], [1, 0]],
                                   "start": [0, 0, 0], "end": [1, 0, 0]}))
        assert res.stage_score == 1
        assert res.error_kind == "malformed_input"

    def test_sealed_environment(self):
        res = generate(fixture_text("sealed_wall.json"))
        assert res.stage_score == 1
        assert res.error_kind == "environment"
        assert "not connected" in res.error

    def test_report_written_even_when_invalid(self):
        res = generate("not json")
        assert res.report["stage_score"] == 1
        assert res.report["status"] == "invalid"
        assert res.report["model"] is None


class TestScoreTwo:
    def test_footprint_too_small_for_rise(self):
        env = {
            "boundary": [[0, 0], [6, 0], [6, 3], [0, 3]],
            "obstacles": [],
            "start": [0.7, 1.5, 0.0],
            "end": [5.3, 1.5, 1.0],
        }
        res = generate(json.dumps(env))
        assert res.stage_score == 2
        assert res.status == "no_feasible_ramp"
        assert res.model is None
        assert res.slope_rows, "every slope candidate should be recorded"
        assert all(not row["feasible"] for row in res.slope_rows)
        assert all(row["reason"] for row in res.slope_rows)

    def test_both_route_tiers_reported(self):
        # connected, wide enough to plan, but far too short to climb:
        # the failure row should say what each tier tried
        env = {
            "boundary": [[0, 0], [7, 0], [7, 3], [0, 3]],
            "obstacles": [],
            "start": [0.7, 1.5, 0.0],
            "end": [6.3, 1.5, 1.2],
        }
        res = generate(json.dumps(env))
        assert res.stage_score == 2
        reason = res.slope_rows[0]["reason"]
        assert "planar" in reason and "layered" in reason


class TestScoreThree:
    def test_stricter_rules_fail_compliance(self):
        rules = dataclasses.replace(load_rules(), max_slope=1.0 / 20.0)
        res = generate(fixture_text("trial1_flat_040.json"), rules=rules)
        assert res.stage_score == 3
        assert res.status == "noncompliant"
        assert res.model is not None  # the ramp is still built and reported
        failed = [r.rule_id for r in res.compliance.results if not r.passed]
        assert failed == ["R-SLOPE"]


class TestManualLandings:
    def test_manual_positions_are_used(self):
        params = params_from_overrides({
            "search": {"landing_mode": "manual",
                       "manual_landings": [0.0, 8.475]},
        })
        res = generate(fixture_text("trial1_flat_040.json"), params=params)
        assert res.stage_score == 4
        # every requested interval must sit inside a level stretch
        for want in (0.0, 8.475):
            assert any(a <= want + 1e-9 and want + 1.525 <= b + 1e-9
                       for a, b in res.path.landings), res.path.landings

    def test_unworkable_manual_positions(self):
        params = params_from_overrides({
            "search": {"landing_mode": "manual",
                       "manual_landings": [8.0, 2.0]},
        })
        res = generate(fixture_text("trial1_flat_040.json"), params=params)
        assert res.stage_score == 2
        assert "ascending" in res.slope_rows[0]["reason"]


class TestReportShape:
    def test_report_is_deterministic(self):
        text = fixture_text("trial2_switchback_200.json")
        a = generate(text).report
        b = generate(text).report
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_report_carries_all_sections(self):
        res = generate(fixture_text("trial1_flat_040.json"))
        rep = res.report
        assert rep["schema"] == "ramp_report@1"
        assert rep["environment"]["rise"] == pytest.approx(0.4)
        assert rep["grid"]["blocked_cells"] >= 0
        assert rep["search"]["chosen_slope"] == pytest.approx(1.0 / 12.0)
        assert rep["search"]["candidates"]
        assert rep["path"]["length"] == pytest.approx(res.path.length)
        assert rep["model"]["solids"] == len(res.model.solids)
        assert rep["compliance"]["passed"] is True
        assert "elapsed" not in json.dumps(rep)  # byte-stable across runs

    def test_slope_sweep_records_candidates(self):
        params = params_from_overrides({
            "search": {"slope_min": 1.0 / 14.0, "slope_max": 1.0 / 12.0,
                       "slope_step": 1.0 / 120.0},
        })
        res = generate(fixture_text("trial1_flat_040.json"), params=params)
        assert res.stage_score == 4
        assert len(res.slope_rows) >= 2
        slopes = [row["slope"] for row in res.slope_rows]
        assert slopes == sorted(slopes)
        assert res.chosen_slope == pytest.approx(1.0 / 12.0)  # desired wins

    def test_curved_corners_still_compliant(self):
        params = params_from_overrides({"search": {"path_type": "curve"}})
        res = generate(fixture_text("trial2_switchback_200.json"), params=params)
        assert res.stage_score == 4
        assert res.compliance.passed
