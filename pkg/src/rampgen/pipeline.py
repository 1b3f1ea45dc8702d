"""End-to-end generation: environment JSON in, ramp artefacts out.

The route planner is two-tiered.  The planar route rasterizes the
environment, inflates obstacles by half a deck width, finds a 2-D path
through the band of heights the ramp will occupy, and drapes a height
profile over it — fast, and sufficient whenever some plan-view corridor
is clear at every height.  When that fails (obstacles that must be
climbed over, stacked legs, mid-height blockers) the layered 3-D search
takes over on the same inflated grid.  Whatever either route returns is
re-validated against the original grid and the station rules before it
is accepted; nothing is trusted just because the search said so.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .compliance import ComplianceReport, check_compliance, stage_score
from .env_model import (
    EnvironmentSpec,
    GridMatrix,
    inflate_plan,
    locate_endpoints,
    parse_environment,
    rasterize,
    serialize_environment,
)
from .errors import (
    EndpointCellBlocked,
    InsufficientRun,
    InvalidManualLandings,
    MalformedInput,
    NoFeasibleRamp,
    NoPath,
    ResolutionTooCoarse,
    SelfIntersectingSweep,
)
from .export_io import path_to_dict
from .geometry import RampModel, assemble_model
from .params import RampParams, RuleSet, load_rules, params_to_dict
from .pathfinder import (
    RampPath,
    assign_heights,
    astar_2d,
    cells_to_polyline,
    check_path_collision,
    check_self_separation,
    optimize_slope,
    search_3d,
    simplify_polyline,
    smooth_path,
)
from .validation import check_stations

STATUS_BY_SCORE = {1: "invalid", 2: "no_feasible_ramp", 3: "noncompliant", 4: "ok"}


@dataclass
class PipelineResult:
    stage_score: int
    status: str
    error: str | None
    # "malformed_input" when the request itself was bad; "environment"
    # when a well-formed environment defeated the search.  None on success.
    error_kind: str | None
    env: EnvironmentSpec | None
    grid: GridMatrix | None
    path: RampPath | None
    model: RampModel | None
    compliance: ComplianceReport | None
    chosen_slope: float | None
    slope_rows: list[dict]
    report: dict
    elapsed_s: float = 0.0  # informational; deliberately kept out of report


def _plan_band_mask(grid: GridMatrix, z_lo: float, z_hi: float) -> np.ndarray:
    """Plan-view blocked mask: a cell is blocked if anything occupies it
    anywhere in the height band the ramp could pass through."""
    k0, k1 = grid._band_range(z_lo, z_hi)
    k0 = min(max(k0, 0), grid.dims[2] - 1)
    k1 = max(k1, k0 + 1)
    return grid.occupancy[:, :, k0:k1].any(axis=2)


def _passable_mask(grid: GridMatrix, z_lo: float, z_hi: float,
                   window_h: float) -> np.ndarray:
    """Plan-view blocked mask for the connectivity gate: a cell is blocked
    only when no deck-plus-headroom window of ``window_h`` fits anywhere in
    the band — a column with a slab overhead but free air beneath is still
    passable, the layered search just has to duck under it."""
    k0, k1 = grid._band_range(z_lo, z_hi)
    k0 = max(k0, 0)
    n_band = max(k1 - k0, 1)
    w = max(1, math.ceil(window_h / grid.z_step - 1e-9))
    occ = grid.occupancy[:, :, k0:min(k1, grid.dims[2])]
    pad = n_band - occ.shape[2]  # bands above the grid top are open air
    if pad > 0:
        occ = np.concatenate(
            [occ, np.zeros(occ.shape[:2] + (pad,), dtype=bool)], axis=2)
    if w >= n_band:
        return occ.any(axis=2)
    cum = np.cumsum(occ, axis=2, dtype=np.int32)
    free_window = np.zeros(occ.shape[:2], dtype=bool)
    for s in range(n_band - w + 1):
        count = cum[:, :, s + w - 1] - (cum[:, :, s - 1] if s else 0)
        free_window |= count == 0
    return ~free_window


def _rebalance_layered(path: RampPath, rise: float, slope: float,
                       params: RampParams, grid: GridMatrix,
                       start_z: float) -> RampPath:
    """Try to re-drape a corner-aware profile over a layered route's
    plan: turns move onto landings and the grade evens out.  Falls back
    to the original when the route is too tight or the new profile
    would touch an obstacle."""
    s = params.search
    plan = [(st.x, st.y) for st in path.stations]
    try:
        draped = assign_heights(
            plan, rise, slope,
            max_rise_per_run=s.max_rise_per_run,
            landing_length=s.landing_length,
            start_z=start_z,
            expansions=path.expansions,
        )
    except (InsufficientRun, MalformedInput):
        return path
    if check_stations(
        draped, max_slope=slope, min_landing=s.landing_length,
        max_rise_per_run=s.max_rise_per_run,
    ):
        return path
    if check_path_collision(
        draped, grid,
        deck_width=params.geom.deck_width,
        deck_thickness=params.geom.deck_thickness,
        clearance=s.clearance,
    ):
        return path
    return dataclasses.replace(
        draped,
        source=path.source,
        cost=path.cost,
        notes=path.notes + ("height profile rebalanced onto level-turn landings",),
    )


def generate(env_text: str, params: RampParams | None = None,
             rules: RuleSet | None = None) -> PipelineResult:
    """Run the full pipeline on an environment JSON document."""
    t0 = time.perf_counter()
    params = params or RampParams()
    params.validate()  # caller errors raise; environment errors report
    rules = rules or load_rules()
    s = params.search
    g = params.grid
    geom = params.geom

    notes: list[str] = []

    def finish(score, *, error=None, error_kind=None, env=None, grid=None,
               path=None, model=None, comp=None, slope=None,
               rows=None) -> PipelineResult:
        if error is not None and error_kind is None:
            error_kind = "environment"
        report = _build_report(
            score, error=error, error_kind=error_kind, env=env, grid=grid,
            path=path, model=model, comp=comp, slope=slope, rows=rows or [],
            params=params, rules=rules, notes=notes,
        )
        return PipelineResult(
            stage_score=score, status=STATUS_BY_SCORE[score], error=error,
            error_kind=error_kind, env=env, grid=grid, path=path, model=model,
            compliance=comp, chosen_slope=slope, slope_rows=rows or [],
            report=report, elapsed_s=time.perf_counter() - t0,
        )

    # ---- parse + rasterize -------------------------------------------------
    try:
        env = parse_environment(env_text)
    except MalformedInput as exc:
        return finish(1, error=str(exc), error_kind="malformed_input")

    z_max = max(env.start[2], env.end[2]) + g.z_margin
    try:
        grid = rasterize(env, g.cell, g.z_step, z_max)
        start_cell, goal_cell = locate_endpoints(env, grid)
    except (ResolutionTooCoarse, EndpointCellBlocked) as exc:
        return finish(1, error=str(exc), env=env,
                      grid=locals().get("grid"))

    start_z, end_z = env.start[2], env.end[2]
    rise = env.rise
    band_lo = start_z - geom.deck_thickness
    band_hi = end_z + s.clearance

    # ---- connectivity ------------------------------------------------------
    raw_mask = _passable_mask(grid, band_lo, band_hi,
                              geom.deck_thickness + s.clearance)
    try:
        astar_2d(raw_mask, start_cell, goal_cell,
                 connectivity=s.connectivity, resolution=grid.resolution)
    except NoPath:
        return finish(
            1, env=env, grid=grid,
            error="endpoints are not connected by any free corridor",
        )

    inflated = inflate_plan(grid, geom.deck_width / 2.0)
    plan_mask = _plan_band_mask(inflated, band_lo, band_hi)
    plan_route = None
    try:
        cells = astar_2d(plan_mask, start_cell, goal_cell,
                         connectivity=s.connectivity, resolution=grid.resolution)
        # Pull the staircase taut so only true corners remain; every corner
        # left over will cost a full landing length in the height profile.
        plan_route = simplify_polyline(
            cells_to_polyline(cells.cells, grid), plan_mask, grid,
        )
    except NoPath:
        notes.append("no single-height corridor wide enough; planar route skipped")

    # ---- per-slope attempts ------------------------------------------------
    def attempt_planar(slope: float) -> RampPath:
        draped = assign_heights(
            plan_route, rise, slope,
            max_rise_per_run=s.max_rise_per_run,
            landing_length=s.landing_length,
            start_z=start_z,
            mode=s.landing_mode,
            manual_landings=s.manual_landings,
        )
        bad = check_stations(
            draped, max_slope=slope, min_landing=s.landing_length,
            max_rise_per_run=s.max_rise_per_run,
        )
        if bad:
            raise NoFeasibleRamp("planar profile failed validation: " + bad[0])
        hits = check_path_collision(
            draped, grid,
            deck_width=geom.deck_width,
            deck_thickness=geom.deck_thickness,
            clearance=s.clearance,
        )
        if hits:
            raise NoFeasibleRamp("planar route collides: " + hits[0])
        near = check_self_separation(
            draped,
            deck_width=geom.deck_width,
            deck_thickness=geom.deck_thickness,
            clearance=s.clearance,
        )
        if near:
            raise NoFeasibleRamp("planar route overlaps itself: " + near[0])
        return draped

    def attempt_layered(slope: float) -> RampPath:
        path = search_3d(
            inflated, env.start, env.end,
            slope=slope,
            search_cell=g.search_cell,
            deck_width=geom.deck_width,
            deck_thickness=geom.deck_thickness,
            clearance=s.clearance,
            max_rise_per_run=s.max_rise_per_run,
            landing_length=s.landing_length,
            inter_path_distance=s.inter_path_distance,
            connectivity=s.connectivity,
            max_expansions=s.max_expansions_3d,
        )
        hits = check_path_collision(
            path, grid,
            deck_width=geom.deck_width,
            deck_thickness=geom.deck_thickness,
            clearance=s.clearance,
        )
        if hits:
            raise NoFeasibleRamp("layered route collides: " + hits[0])
        final = _rebalance_layered(path, rise, slope, params, grid, start_z)
        # the re-drape moves heights, so stacking gaps need a fresh look
        near = check_self_separation(
            final,
            deck_width=geom.deck_width,
            deck_thickness=geom.deck_thickness,
            clearance=s.clearance,
        )
        if near:
            raise NoFeasibleRamp("layered route overlaps itself: " + near[0])
        return final

    def attempt(slope: float) -> RampPath:
        planar_err: str | None = None
        if plan_route is not None:
            try:
                return attempt_planar(slope)
            except (InsufficientRun, NoFeasibleRamp, InvalidManualLandings) as exc:
                if s.landing_mode == "manual":
                    raise  # manual landings are tied to the planar route
                planar_err = f"{type(exc).__name__}: {exc}"
        try:
            return attempt_layered(slope)
        except (NoFeasibleRamp, InsufficientRun) as exc:
            if planar_err is not None:
                raise NoFeasibleRamp(f"planar [{planar_err}]; layered [{exc}]") from exc
            raise

    lo, hi = s.slope_range()
    plan_dist = math.hypot(env.end[0] - env.start[0], env.end[1] - env.start[1])
    best, chosen, rows = optimize_slope(
        attempt,
        desired_slope=s.desired_slope,
        slope_min=lo,
        slope_max=hi,
        slope_step=s.slope_step,
        weight_slope=s.weight_slope,
        weight_length=s.weight_length,
        length_lb=max(1.0, plan_dist),
    )
    if best is None:
        return finish(2, env=env, grid=grid, rows=rows,
                      error="no feasible ramp in the allowed slope range")

    # ---- smoothing (optional) ---------------------------------------------
    path = best
    if s.path_type == "curve":
        smoothed = smooth_path(path, style="curve")
        ok = not check_stations(
            smoothed, max_slope=path.slope + 1e-9,
            min_landing=s.landing_length,
            max_rise_per_run=s.max_rise_per_run,
        ) and not check_path_collision(
            smoothed, grid,
            deck_width=geom.deck_width,
            deck_thickness=geom.deck_thickness,
            clearance=s.clearance,
        ) and not check_self_separation(
            smoothed,
            deck_width=geom.deck_width,
            deck_thickness=geom.deck_thickness,
            clearance=s.clearance,
        )
        if ok:
            path = smoothed
        else:
            notes.append("corner smoothing rejected by re-validation; "
                         "kept the polyline route")

    # ---- model + compliance ------------------------------------------------
    try:
        model = assemble_model(path, geom, ground_z=env.ground_z)
    except SelfIntersectingSweep as exc:
        notes.append(f"model construction failed: {exc}")
        return finish(3, env=env, grid=grid, path=path, slope=chosen, rows=rows,
                      error=str(exc))

    comp = check_compliance(path, model, rules, geom)
    score = stage_score(
        input_ok=True, connected=True, path_found=True,
        rules_passed=comp.passed,
    )
    return finish(score, env=env, grid=grid, path=path, model=model,
                  comp=comp, slope=chosen, rows=rows)


def _build_report(score, *, error, error_kind, env, grid, path, model, comp,
                  slope, rows, params, rules, notes) -> dict:
    report = {
        "schema": "ramp_report@1",
        "stage_score": score,
        "status": STATUS_BY_SCORE[score],
        "error": error,
        "error_kind": error_kind,
        "params": params_to_dict(params),
        "rules": dataclasses.asdict(rules),
        "notes": list(notes),
        "environment": None,
        "grid": None,
        "search": {
            "chosen_slope": slope,
            "candidates": rows,
        },
        "path": None,
        "model": None,
        "compliance": None,
    }
    if env is not None:
        report["environment"] = json.loads(serialize_environment(env))
        report["environment"]["rise"] = env.rise
    if grid is not None:
        report["grid"] = {
            "origin": list(grid.origin),
            "resolution": grid.resolution,
            "z_step": grid.z_step,
            "base_z": grid.base_z,
            "dims": list(grid.dims),
            "blocked_cells": int(grid.occupancy.sum()),
        }
    if path is not None:
        report["path"] = path_to_dict(path)
        report["search"]["source"] = path.source
        report["search"]["expansions"] = path.expansions
    if model is not None:
        report["model"] = {
            "solids": len(model.solids),
            "vertices": model.n_vertices,
            "triangles": model.n_faces,
            "deck_plan_area": model.deck_plan_area,
            "volume": sum(s.mesh.signed_volume() for s in model.solids),
        }
    if comp is not None:
        report["compliance"] = comp.to_dict()
    return report
