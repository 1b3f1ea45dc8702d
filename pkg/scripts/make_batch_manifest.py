#!/usr/bin/env python3
"""Build the 60-case verification manifest (manifests/batch60.json).

The manifest covers every user-facing parameter axis at least twice
(path slope/thickness/headroom/landing-mode/type/inter-path distance,
railing height/thickness/post-density/type, support thickness/density,
all three material slots), a block of deliberately infeasible
environments whose scores must land at 1-2, and one stress case: a dense
pillar field with a tall end height, which only has to complete
gracefully.  Output is canonical JSON, so re-running the script is
byte-stable.
"""

from pathlib import Path

from rampgen.export_io import canonical_json, round_floats


def rect(w, h):
    return [[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]]


def box(x0, y0, x1, y1, z0=0.0, z1=3.0):
    return {"polygon": [[x0, y0], [x1, y0], [x1, y1], [x0, y1]],
            "base_z": z0, "top_z": z1}


def flat(w, h, rise, ground=0.0, diag=False):
    """Open rectangle, straight or corner-to-corner route."""
    if diag:
        start, end = [1.0, 1.0, ground], [w - 1.0, h - 1.0, ground + rise]
    else:
        start, end = [1.0, h / 2, ground], [w - 1.0, h / 2, ground + rise]
    return {"boundary": rect(w, h), "obstacles": [],
            "start": start, "end": end, "ground_z": ground}


def corridor(length, rise, ground=0.0):
    env = flat(length, 4.0, rise, ground=ground)
    return env


def switchback(rise):
    """Two staggered walls force an S-route through a 16 x 9 yard."""
    return {
        "boundary": rect(16.0, 9.0),
        "obstacles": [box(0.0, 2.8, 13.0, 3.2), box(3.0, 5.8, 16.0, 6.2)],
        "start": [1.0, 1.4, 0.0],
        "end": [15.0, 7.6, rise],
        "ground_z": 0.0,
    }


def lshape(rise):
    """One wall; the route must round its tip (a single forced corner)."""
    return {
        "boundary": rect(12.0, 12.0),
        "obstacles": [box(5.8, 0.0, 6.2, 8.0)],
        "start": [1.0, 2.0, 0.0],
        "end": [11.0, 2.0, rise],
        "ground_z": 0.0,
    }


def alley(rise):
    """Trial-3 shape: a 1.4 m lane pinched between two solid banks."""
    return {
        "boundary": rect(9.0, 5.0),
        "obstacles": [box(0.0, 0.0, 9.0, 1.6, 0.0, 2.5),
                      box(0.0, 3.0, 9.0, 5.0, 0.0, 2.5)],
        "start": [0.8, 2.3, 0.0],
        "end": [8.2, 2.3, rise],
        "ground_z": 0.0,
    }


def underpass(rise, length=18.0):
    """Slab bridge at z=1.5; passable only with reduced headroom."""
    return {
        "boundary": rect(length, 4.0),
        "obstacles": [box(8.0, 0.0, 10.0, 4.0, 1.5, 3.0)],
        "start": [1.0, 2.0, 0.0],
        "end": [length - 1.0, 2.0, rise],
        "ground_z": 0.0,
    }


def pillar_field(nx, ny, rise, pitch=3.0, side=0.6, w=None, h=None):
    """Evenly pitched pillar grid with corridors between the rows."""
    w = w or (nx + 1) * pitch
    h = h or (ny + 1) * pitch
    obstacles = []
    for i in range(nx):
        for j in range(ny):
            cx, cy = (i + 1) * pitch, (j + 1) * pitch
            obstacles.append(box(cx - side / 2, cy - side / 2,
                                 cx + side / 2, cy + side / 2, 0.0, 3.5))
    return {"boundary": rect(w, h), "obstacles": obstacles,
            "start": [1.0, h / 2, 0.0], "end": [w - 1.0, h / 2, rise],
            "ground_z": 0.0}


def hexagon(rise):
    return {
        "boundary": [[3.0, 0.0], [11.0, 0.0], [14.0, 6.0], [11.0, 12.0],
                     [3.0, 12.0], [0.0, 6.0]],
        "obstacles": [],
        "start": [2.5, 6.0, 0.0],
        "end": [11.5, 6.0, rise],
        "ground_z": 0.0,
    }


LOW_HEADROOM = {"search": {"clearance": 1.2}}

CASES: list[dict] = []


def add(cid, env, params=None, expect=4, note=""):
    case = {"id": cid, "env": env, "expect_score": expect}
    if params:
        case["params"] = params
    if note:
        case["note"] = note
    CASES.append(case)


# --- path: slope -----------------------------------------------------------
add("slope-ada-default", flat(12, 6, 0.4), note="path slope 1:12 default")
add("slope-1-14", flat(12, 6, 0.4),
    {"search": {"desired_slope": 1 / 14}}, note="path slope 1:14")
add("slope-1-16", flat(12, 6, 0.4),
    {"search": {"desired_slope": 1 / 16}}, note="path slope 1:16")
add("slope-1-20", flat(16, 6, 0.4),
    {"search": {"desired_slope": 1 / 20}}, note="path slope 1:20")
add("slope-sweep-flat", flat(12, 6, 0.4),
    {"search": {"slope_min": 1 / 16, "slope_max": 1 / 12, "slope_step": 1 / 120}},
    note="path slope band sweep")
add("slope-sweep-corridor", corridor(20, 0.9),
    {"search": {"slope_min": 1 / 14, "slope_max": 1 / 12, "slope_step": 1 / 240}},
    note="path slope band sweep, two runs")

# --- path: deck thickness --------------------------------------------------
add("deck-thick", flat(12, 6, 0.4),
    {"geom": {"deck_thickness": 0.2}}, note="path thickness 0.20 m")
add("deck-thin", flat(12, 6, 0.4),
    {"geom": {"deck_thickness": 0.1}}, note="path thickness 0.10 m")

# --- path: headroom (clearance above the deck) -----------------------------
add("headroom-tall-flat", flat(12, 6, 0.4),
    {"search": {"clearance": 2.5}}, note="path height 2.5 m")
add("headroom-tall-corridor", corridor(20, 0.9),
    {"search": {"clearance": 2.5}}, note="path height 2.5 m")
add("headroom-low-underpass", underpass(0.3), LOW_HEADROOM,
    note="path height 1.2 m under a slab")
add("headroom-low-layered", underpass(0.5, length=20.0), LOW_HEADROOM,
    note="path height 1.2 m, layered duck-then-climb")

# --- path: landing mode ----------------------------------------------------
add("landings-manual-flat", flat(12, 6, 0.4),
    {"search": {"landing_mode": "manual", "manual_landings": [0.0, 8.475]}},
    note="manual level landings")
add("landings-manual-corridor", corridor(20, 0.9),
    {"search": {"landing_mode": "manual", "manual_landings": [0.0, 7.0, 16.475]}},
    note="manual level landings, three stations")

# --- path: type ------------------------------------------------------------
add("type-straight-switchback", switchback(2.0), note="path type straight")
add("type-curve-switchback", switchback(2.0),
    {"search": {"path_type": "curve"}}, note="path type curve")
add("type-curve-lshape", lshape(0.6),
    {"search": {"path_type": "curve"}}, note="path type curve, one corner")
add("lshape-straight", lshape(0.6), note="forced corner, straight type")

# --- path: inter-path distance (layered separation) ------------------------
add("interpath-tight", underpass(0.5, length=20.0),
    {"search": {"clearance": 1.2, "inter_path_distance": 1.2}},
    note="inter-path distance 1.2 m")
add("interpath-wide", underpass(0.5, length=20.0),
    {"search": {"clearance": 1.2, "inter_path_distance": 2.0}},
    note="inter-path distance 2.0 m")

# --- railing: height / thickness / density / type --------------------------
add("rail-low", flat(12, 6, 0.4),
    {"geom": {"railing": {"height": 0.87}}}, note="railing height 0.87 m")
add("rail-high", flat(12, 6, 0.4),
    {"geom": {"railing": {"height": 0.93}}}, note="railing height 0.93 m")
add("rail-thin", flat(12, 6, 0.4),
    {"geom": {"railing": {"thickness": 0.04}}}, note="railing thickness 40 mm")
add("rail-thick", flat(12, 6, 0.4),
    {"geom": {"railing": {"thickness": 0.06}}}, note="railing thickness 60 mm")
add("posts-dense", flat(12, 6, 0.4),
    {"geom": {"railing": {"post_spacing": 1.0}}}, note="railing post density high")
add("posts-sparse", flat(12, 6, 0.4),
    {"geom": {"railing": {"post_spacing": 2.5}}}, note="railing post density low")
add("rail-type-square", alley(0.3),
    {"geom": {"railing": {"type": "single-square"}}}, note="railing type square")
add("rail-type-rounded", alley(0.3),
    {"geom": {"railing": {"type": "single-rounded"}}}, note="railing type rounded")
add("rail-type-double", flat(12, 6, 0.4),
    {"geom": {"railing": {"type": "double-rounded"}}}, note="railing type double")

# --- supports: thickness / density ----------------------------------------
add("supports-thick", flat(12, 6, 0.4),
    {"geom": {"supports": {"thickness": 0.3}}}, note="support thickness 0.3 m")
add("supports-thin", flat(12, 6, 0.4),
    {"geom": {"supports": {"thickness": 0.1}}}, note="support thickness 0.1 m")
add("supports-dense", corridor(20, 0.9),
    {"geom": {"supports": {"spacing": 1.5}}}, note="support density high")
add("supports-sparse", corridor(20, 0.9),
    {"geom": {"supports": {"spacing": 3.5}}}, note="support density low")
add("supports-off", flat(12, 6, 0.4),
    {"geom": {"supports": {"enabled": False}}}, note="supports disabled")

# --- materials -------------------------------------------------------------
add("material-wood-deck", flat(12, 6, 0.4),
    {"geom": {"deck_material": "wood"}}, note="path material wood")
add("material-glass-rail", flat(12, 6, 0.4),
    {"geom": {"railing_material": "glass"}}, note="railing material glass")
add("material-concrete-supports", corridor(20, 0.9),
    {"geom": {"support_material": "concrete"}}, note="support material concrete")
add("material-custom-tag", flat(12, 6, 0.4),
    {"geom": {"deck_material": "terrazzo",
              "extra_materials": [["terrazzo", [0.80, 0.75, 0.70]]]}},
    note="custom material table entry")

# --- environment variety (all defaults) ------------------------------------
add("obstacle-field", pillar_field(4, 2, 0.5, w=16, h=9),
    note="pillar grid, default params")
add("obstacle-field-slope-14", pillar_field(4, 2, 0.5, w=16, h=9),
    {"search": {"desired_slope": 1 / 14}}, note="pillar grid, gentler slope")
add("alley-default", alley(0.3), note="pinched 1.4 m lane")
add("hexagon-yard", hexagon(0.4), note="non-rectangular boundary")
add("diagonal-route", flat(12, 8, 0.4, diag=True), note="corner-to-corner route")
add("descending-endpoints", {
    "boundary": rect(12, 6), "obstacles": [],
    "start": [1.0, 3.0, 0.4], "end": [11.0, 3.0, 0.0], "ground_z": 0.0,
}, note="start above end; direction normalized")
add("raised-ground", flat(12, 6, 0.4, ground=0.5),
    note="site datum at z=0.5")
add("long-climb", corridor(26, 1.5), note="1.5 m rise, two runs")
add("flat-small", flat(10, 5, 0.2), note="small yard, small rise")
add("single-max-run", flat(15, 6, 0.76), note="rise exactly one full run")
add("two-runs", flat(17, 6, 0.8), note="rise just over one run")
add("switchback-tall", switchback(1.8), note="1.8 m rise switchback")
add("wide-plaza", flat(20, 14, 0.4, diag=True), note="large open plaza")
add("corridor-raised", corridor(20, 0.9, ground=1.0), note="corridor at z=1.0")

# --- injected-infeasible ---------------------------------------------------
add("sealed-wall", {
    "boundary": rect(10, 6),
    "obstacles": [box(4.8, 0.0, 5.2, 6.0, 0.0, 4.0)],
    "start": [1.0, 3.0, 0.0], "end": [9.0, 3.0, 0.4], "ground_z": 0.0,
}, expect=[1, 2], note="infeasible: full-height wall seals the yard")
add("sealed-pocket", {
    "boundary": rect(10, 10),
    "obstacles": [box(6.0, 3.0, 6.5, 7.0, 0.0, 4.0),
                  box(6.0, 7.0, 10.0, 7.5, 0.0, 4.0),
                  box(6.0, 2.5, 10.0, 3.0, 0.0, 4.0)],
    "start": [1.0, 5.0, 0.0], "end": [8.5, 5.0, 0.3], "ground_z": 0.0,
}, expect=[1, 2], note="infeasible: end point walled into a pocket")
add("footprint-too-small", flat(6, 3, 1.0),
    expect=[1, 2], note="infeasible: 1 m rise cannot fit a 6 m yard")
add("footprint-way-too-small", flat(7, 3, 2.0),
    expect=[1, 2], note="infeasible: 2 m rise in a 7 m yard")
add("blocked-start", {
    "boundary": rect(10, 6),
    "obstacles": [box(0.5, 2.5, 1.5, 3.5, 0.0, 2.0)],
    "start": [1.0, 3.0, 0.0], "end": [9.0, 3.0, 0.4], "ground_z": 0.0,
}, expect=[1, 2], note="infeasible: start point sits inside an obstacle")
add("bowtie-boundary", {
    "boundary": [[0.0, 0.0], [10.0, 6.0], [10.0, 0.0], [0.0, 6.0]],
    "obstacles": [],
    "start": [2.0, 2.0, 0.0], "end": [8.0, 2.0, 0.4], "ground_z": 0.0,
}, expect=[1, 2], note="infeasible: self-intersecting boundary polygon")
add("ceiling-too-low", {
    "boundary": rect(14, 4),
    "obstacles": [box(3.0, 0.0, 11.0, 4.0, 1.0, 3.0)],
    "start": [1.0, 2.0, 0.0], "end": [13.0, 2.0, 0.3], "ground_z": 0.0,
}, expect=[1, 2], note="infeasible: 1.0 m ceiling blocks all headroom")

# --- stress ----------------------------------------------------------------
add("stress-pillar-maze-high-rise", pillar_field(6, 3, 2.4, pitch=2.6, side=0.8),
    expect=[1, 4],
    note="stress: dense pillar grid with a high end height; must complete")


def main() -> None:
    assert len(CASES) == 60, f"manifest must hold 60 cases, found {len(CASES)}"
    ids = [c["id"] for c in CASES]
    assert len(set(ids)) == 60, "case ids must be unique"
    out = Path(__file__).resolve().parent.parent / "manifests" / "batch60.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    doc = {"schema": "ramp_batch@1", "cases": CASES}
    out.write_text(canonical_json(round_floats(doc)))
    print(f"wrote {out} ({len(CASES)} cases)")


if __name__ == "__main__":
    main()
