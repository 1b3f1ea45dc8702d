"""Rule checking against the built model.

Each rule is re-measured from the finished artefacts — station geometry
and mesh probes — rather than read back from the inputs that produced
them, so a bug upstream shows up here as a failed measurement instead
of a silently agreeing number.  Seven rules:

  R-SLOPE           running slope of every climb
  R-CROSS-SLOPE     lateral tilt of the deck surface
  R-WIDTH           clear deck width between railings
  R-RISE-PER-RUN    vertical gain of each climb between landings
  R-LANDING         level landing length, including both termini
  R-HANDRAIL-HEIGHT rail top height above the deck, both sides
  R-CLEARANCE       headroom between vertically stacked deck sections
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MismatchedProvenance
from .geometry import RampModel, TriMesh, path_fingerprint, z_hits, _frame_at
from .params import GeomParams, RuleSet
from .pathfinder import RampPath
from .validation import split_stretches

_SLOPE_TOL = 1e-9
_LENGTH_TOL = 1e-6
_WIDTH_TOL = 1e-4
_SAMPLE_STEP = 0.6  # arc spacing for mesh probes


@dataclass
class RuleResult:
    rule_id: str
    description: str
    limit: object
    measured: object
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "description": self.description,
            "limit": self.limit,
            "measured": self.measured,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class ComplianceReport:
    results: list[RuleResult]
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def result(self, rule_id: str) -> RuleResult:
        for r in self.results:
            if r.rule_id == rule_id:
                return r
        raise KeyError(rule_id)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "rules": [r.to_dict() for r in self.results],
            "notes": list(self.notes),
        }


def stage_score(*, input_ok: bool, connected: bool, path_found: bool,
                rules_passed: bool) -> int:
    """Outcome grade: 4 = compliant ramp, 3 = ramp found but a rule
    fails, 2 = endpoints reachable in plan but no feasible ramp,
    1 = invalid input or disconnected endpoints."""
    if not input_ok or not connected:
        return 1
    if not path_found:
        return 2
    if not rules_passed:
        return 3
    return 4


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------

def _midpoint_samples(a: float, b: float, step: float = _SAMPLE_STEP) -> list[float]:
    span = b - a
    if span <= 1e-9:
        return [(a + b) / 2.0]
    n = max(1, int(math.ceil(span / step)))
    return [a + (k + 0.5) * span / n for k in range(n)]


def _corner_arcs(path: RampPath) -> list[float]:
    """Arc positions where the plan direction turns noticeably; mesh
    probes next to these are unreliable (mitres, pads, rail breaks)."""
    sts = path.stations
    corners = []
    for i in range(1, len(sts) - 1):
        ux, uy = sts[i].x - sts[i - 1].x, sts[i].y - sts[i - 1].y
        vx, vy = sts[i + 1].x - sts[i].x, sts[i + 1].y - sts[i].y
        lu, lv = math.hypot(ux, uy), math.hypot(vx, vy)
        if lu < 1e-12 or lv < 1e-12:
            continue
        cosang = max(-1.0, min(1.0, (ux * vx + uy * vy) / (lu * lv)))
        if math.degrees(math.acos(cosang)) > 5.0:
            corners.append(sts[i].arc)
    return corners


def _away_from(arcs: list[float], corners: list[float], radius: float) -> list[float]:
    kept = [a for a in arcs if all(abs(a - c) > radius for c in corners)]
    if kept:
        return kept
    # degenerate stretch squeezed between corners: keep the best sample
    best = max(arcs, key=lambda a: min((abs(a - c) for c in corners), default=1.0))
    return [best]


def _near(zs: list[float], z0: float, window: float) -> list[float]:
    return [z for z in zs if z0 - window <= z <= z0 + window]


# ---------------------------------------------------------------------------
# individual measurements
# ---------------------------------------------------------------------------

def _measure_slope(path: RampPath, rules: RuleSet) -> RuleResult:
    worst = 0.0
    for s in split_stretches(path):
        if not s.level and s.length > 1e-9:
            worst = max(worst, s.rise / s.length)
    return RuleResult(
        "R-SLOPE", "running slope of every climb", rules.max_slope,
        worst, worst <= rules.max_slope + _SLOPE_TOL,
    )


def _measure_rise_per_run(path: RampPath, rules: RuleSet) -> RuleResult:
    worst = 0.0
    for s in split_stretches(path):
        if not s.level:
            worst = max(worst, s.rise)
    return RuleResult(
        "R-RISE-PER-RUN", "vertical rise of each climb between landings",
        rules.max_rise_per_run, worst,
        worst <= rules.max_rise_per_run + _LENGTH_TOL,
    )


def _measure_landings(path: RampPath, rules: RuleSet) -> RuleResult:
    stretches = split_stretches(path)
    if not stretches:
        return RuleResult("R-LANDING", "level landings, including both termini",
                          rules.min_landing_length, 0.0, False, "no stations")
    problems = []
    shortest = math.inf
    if not stretches[0].level:
        problems.append("no landing at the bottom")
    if not stretches[-1].level:
        problems.append("no landing at the top")
    for s in stretches:
        if s.level:
            shortest = min(shortest, s.length)
            if s.length < rules.min_landing_length - _LENGTH_TOL:
                problems.append(
                    f"landing at arc {s.arc_start:.2f} is {s.length:.3f} m"
                )
    measured = None if math.isinf(shortest) else shortest
    if measured is None:
        problems.append("no level landings at all")
    return RuleResult(
        "R-LANDING", "level landings, including both termini",
        rules.min_landing_length, measured, not problems, "; ".join(problems),
    )


def _measure_cross_slope(path: RampPath, deck: TriMesh, geom: GeomParams,
                         rules: RuleSet) -> RuleResult:
    points = [(s.x, s.y, s.z) for s in path.stations]
    corners = _corner_arcs(path)
    u = geom.deck_width / 2.0 - 0.02
    worst = 0.0
    probed = 0
    for arc in _away_from(_midpoint_samples(0.0, path.length), corners,
                          0.8 * geom.deck_width):
        p, _d, n = _frame_at(points, arc)
        z0 = path.z_at(arc)
        left = _near(z_hits(deck, p[0] + n[0] * u, p[1] + n[1] * u), z0, 0.3)
        right = _near(z_hits(deck, p[0] - n[0] * u, p[1] - n[1] * u), z0, 0.3)
        if not left or not right:
            continue
        worst = max(worst, abs(max(left) - max(right)) / (2 * u))
        probed += 1
    if probed == 0:
        return RuleResult("R-CROSS-SLOPE", "lateral tilt of the deck surface",
                          rules.max_cross_slope, None, False,
                          "deck surface could not be probed")
    return RuleResult(
        "R-CROSS-SLOPE", "lateral tilt of the deck surface",
        rules.max_cross_slope, worst,
        worst <= rules.max_cross_slope + _SLOPE_TOL,
        f"{probed} cross-sections probed",
    )


def _deck_width_at(deck: TriMesh, p, n, z0: float, hi: float) -> float:
    """Bisect the widest symmetric probe pair that still lands on deck
    surface near z0; returns the supported clear width."""

    def on_deck(u: float) -> bool:
        for sign in (1.0, -1.0):
            zs = z_hits(deck, p[0] + sign * n[0] * u, p[1] + sign * n[1] * u)
            if not _near(zs, z0, 0.3):
                return False
        return True

    if not on_deck(0.0):
        return 0.0
    lo = 0.0
    cap = hi
    if on_deck(cap):
        return 2 * cap
    for _ in range(24):
        mid = (lo + cap) / 2.0
        if on_deck(mid):
            lo = mid
        else:
            cap = mid
    return 2 * lo


def _measure_width(path: RampPath, deck: TriMesh, geom: GeomParams,
                   rules: RuleSet) -> RuleResult:
    points = [(s.x, s.y, s.z) for s in path.stations]
    corners = _corner_arcs(path)
    narrowest = math.inf
    for arc in _away_from(_midpoint_samples(0.0, path.length), corners,
                          0.8 * geom.deck_width):
        p, _d, n = _frame_at(points, arc)
        w = _deck_width_at(deck, p, n, path.z_at(arc), geom.deck_width * 1.5)
        narrowest = min(narrowest, w)
    measured = None if math.isinf(narrowest) else narrowest
    ok = measured is not None and measured >= rules.min_width - _WIDTH_TOL
    return RuleResult(
        "R-WIDTH", "clear deck width between railings",
        rules.min_width, measured, ok,
    )


def _measure_handrails(path: RampPath, rails: TriMesh, geom: GeomParams,
                       rules: RuleSet) -> RuleResult:
    lo_limit, hi_limit = rules.handrail_height
    points = [(s.x, s.y, s.z) for s in path.stations]
    corners = _corner_arcs(path)
    u = geom.deck_width / 2.0 + geom.railing.thickness / 2.0
    lo_seen, hi_seen = math.inf, -math.inf
    missing = 0
    probed = 0
    climbs = [s for s in split_stretches(path) if not s.level]
    if not climbs:
        return RuleResult("R-HANDRAIL-HEIGHT",
                          "rail top height above the deck on both sides",
                          list(rules.handrail_height), None, True,
                          "no climbs; handrails not required")
    if rails.n_faces == 0:
        return RuleResult("R-HANDRAIL-HEIGHT",
                          "rail top height above the deck on both sides",
                          list(rules.handrail_height), None, False,
                          "no railing solids in the model")
    for s in climbs:
        arcs = _away_from(_midpoint_samples(s.arc_start, s.arc_end), corners,
                          0.8 * geom.deck_width)
        for arc in arcs:
            p, _d, n = _frame_at(points, arc)
            z0 = path.z_at(arc)
            probed += 1
            for sign in (1.0, -1.0):
                zs = _near(z_hits(rails, p[0] + sign * n[0] * u,
                                  p[1] + sign * n[1] * u), z0, 1.5)
                if not zs:
                    missing += 1
                    continue
                height = max(zs) - z0
                lo_seen = min(lo_seen, height)
                hi_seen = max(hi_seen, height)
    if missing or math.isinf(lo_seen):
        return RuleResult("R-HANDRAIL-HEIGHT",
                          "rail top height above the deck on both sides",
                          list(rules.handrail_height), None, False,
                          f"railing absent at {missing} of {2 * probed} probes")
    ok = lo_seen >= lo_limit - _LENGTH_TOL and hi_seen <= hi_limit + _LENGTH_TOL
    return RuleResult(
        "R-HANDRAIL-HEIGHT", "rail top height above the deck on both sides",
        list(rules.handrail_height), [lo_seen, hi_seen], ok,
        f"{probed} stations probed",
    )


def _measure_clearance(path: RampPath, geom: GeomParams,
                       rules: RuleSet) -> RuleResult:
    """Headroom between deck sections that pass over each other: the gap
    from a lower deck top to the soffit of the one above it."""
    step = 0.25
    n = max(2, int(math.ceil(path.length / step)) + 1)
    arcs = np.linspace(0.0, path.length, n)
    xy = np.array([path.point_at(float(a)) for a in arcs])
    zz = np.array([path.z_at(float(a)) for a in arcs])

    plan_d = np.hypot(xy[:, None, 0] - xy[None, :, 0], xy[:, None, 1] - xy[None, :, 1])
    dz = zz[None, :] - zz[:, None]
    arc_sep = np.abs(arcs[None, :] - arcs[:, None])
    stacked = (
        (plan_d < geom.deck_width)
        & (dz > 1e-6)
        & (arc_sep > 3.0 * geom.deck_width)
    )
    if not stacked.any():
        return RuleResult("R-CLEARANCE",
                          "headroom between stacked deck sections",
                          rules.min_clearance, None, True,
                          "no deck sections overlap in plan")
    gaps = dz[stacked] - geom.deck_thickness
    measured = float(gaps.min())
    return RuleResult(
        "R-CLEARANCE", "headroom between stacked deck sections",
        rules.min_clearance, measured,
        measured >= rules.min_clearance - _LENGTH_TOL,
        f"{int(stacked.sum())} stacked sample pairs",
    )


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def check_compliance(path: RampPath, model: RampModel, rules: RuleSet,
                     geom: GeomParams) -> ComplianceReport:
    if model.path_key != path_fingerprint(path):
        raise MismatchedProvenance(
            "model was built from a different path than the one being checked"
        )
    deck = TriMesh.merged(s.mesh for s in model.by_name("deck"))
    rails = TriMesh.merged(s.mesh for s in model.by_name("railing"))

    results = [
        _measure_slope(path, rules),
        _measure_cross_slope(path, deck, geom, rules),
        _measure_width(path, deck, geom, rules),
        _measure_rise_per_run(path, rules),
        _measure_landings(path, rules),
        _measure_handrails(path, rails, geom, rules),
        _measure_clearance(path, geom, rules),
    ]
    notes = []
    if path.notes:
        notes.extend(path.notes)
    return ComplianceReport(results=results, notes=notes)
