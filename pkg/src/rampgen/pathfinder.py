"""Grid path search and height assignment.

Two search modes cooperate.  The planar mode runs A* over the fine
occupancy grid and assigns heights afterwards along the arc; it is fast
and covers sites where the route never has to pass over or under itself.
The layered mode runs A* over a coarsened lattice whose states carry
elevation, rise-budget, and landing-progress counters; it is slower but
can stack switchback legs and thread height-limited openings.

Both searches report their cost as exact step counts (orthogonal,
diagonal) besides the float cost, so tests can compare against reference
searches without accumulating float error: two lattice paths have equal
length iff their step counts match.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .env_model import GridMatrix
from .errors import (
    InsufficientRun,
    InvalidManualLandings,
    MalformedInput,
    NoFeasibleRamp,
    NoPath,
)

SQRT2 = math.sqrt(2.0)

# |dz| below this counts as level when classifying segments
_LEVEL_EPS = 1e-9
_ARC_EPS = 1e-9

_ORTH = ((1, 0), (-1, 0), (0, 1), (0, -1))
_DIAG = ((1, 1), (1, -1), (-1, 1), (-1, -1))


# ---------------------------------------------------------------------------
# Result containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CellPath:
    """A planar grid path: cell sequence plus exact cost bookkeeping."""

    cells: tuple[tuple[int, int], ...]
    cost: float
    steps: tuple[int, int]  # (orthogonal, diagonal) step counts
    expansions: int


@dataclass(frozen=True)
class Station:
    """A breakpoint of the ramp centreline.  ``kind`` describes the segment
    that starts here ("ramp" | "landing"); the last station uses "end"."""

    x: float
    y: float
    z: float
    arc: float
    kind: str


@dataclass(frozen=True)
class RampPath:
    stations: tuple[Station, ...]
    slope: float  # steepest ramping grade actually used
    landings: tuple[tuple[float, float], ...]  # arc intervals of level stretches
    source: str  # "planar" | "layered"
    cost: float
    expansions: int = 0
    notes: tuple[str, ...] = field(default_factory=tuple)

    @property
    def length(self) -> float:
        return self.stations[-1].arc

    @property
    def rise(self) -> float:
        return self.stations[-1].z - self.stations[0].z

    def intermediate_landings(self) -> tuple[tuple[float, float], ...]:
        out = []
        for a0, a1 in self.landings:
            if a0 > _ARC_EPS and a1 < self.length - _ARC_EPS:
                out.append((a0, a1))
        return tuple(out)

    def z_at(self, arc: float) -> float:
        return self._interp(arc, lambda st: st.z)

    def point_at(self, arc: float) -> tuple[float, float]:
        return self._interp(arc, lambda st: st.x), self._interp(arc, lambda st: st.y)

    def _interp(self, arc: float, get: Callable[[Station], float]) -> float:
        sts = self.stations
        if arc <= sts[0].arc:
            return get(sts[0])
        for a, b in zip(sts, sts[1:]):
            if arc <= b.arc:
                span = b.arc - a.arc
                if span <= _ARC_EPS:
                    return get(b)
                t = (arc - a.arc) / span
                return get(a) + t * (get(b) - get(a))
        return get(sts[-1])


def step_cost(n_orth: int, n_diag: int, resolution: float) -> float:
    """Canonical lattice path cost; the single expression both searches use."""
    return resolution * n_orth + resolution * n_diag * SQRT2


# ---------------------------------------------------------------------------
# Planar A*
# ---------------------------------------------------------------------------

def astar_2d(
    blocked: np.ndarray,
    start: tuple[int, int],
    goal: tuple[int, int],
    *,
    connectivity: int = 8,
    resolution: float = 1.0,
) -> CellPath:
    """Shortest path on a boolean blocked mask.

    Diagonal moves cost sqrt(2) per cell and may not cut corners: both
    orthogonal neighbours of a diagonal step must be free.  Ties in f are
    broken toward the smaller (i, j), which pins the expansion order.
    """
    if blocked.ndim != 2:
        raise MalformedInput("blocked mask must be 2-D")
    nx, ny = blocked.shape
    if connectivity not in (4, 8):
        raise MalformedInput(f"connectivity must be 4 or 8, got {connectivity}")

    def inside(i: int, j: int) -> bool:
        return 0 <= i < nx and 0 <= j < ny

    if not (inside(*start) and inside(*goal)):
        raise NoPath(f"endpoint outside grid: start={start} goal={goal}")
    if blocked[start] or blocked[goal]:
        raise NoPath(f"endpoint cell blocked: start={start} goal={goal}")
    if start == goal:
        return CellPath((start,), 0.0, (0, 0), 0)

    gi, gj = goal

    def heuristic(i: int, j: int) -> float:
        dx = abs(i - gi)
        dy = abs(j - gj)
        if connectivity == 4:
            return resolution * (dx + dy)
        lo, hi = (dx, dy) if dx < dy else (dy, dx)
        return resolution * (hi - lo) + resolution * lo * SQRT2

    g = np.full((nx, ny), np.inf)
    g[start] = 0.0
    parent: dict[tuple[int, int], tuple[int, int]] = {}
    closed = np.zeros((nx, ny), dtype=bool)
    heap: list[tuple[float, int, int]] = [(heuristic(*start), start[0], start[1])]
    expansions = 0

    while heap:
        _f, i, j = heapq.heappop(heap)
        if closed[i, j]:
            continue
        closed[i, j] = True
        expansions += 1
        if (i, j) == goal:
            break
        base = g[i, j]
        for di, dj in _ORTH:
            ni, nj = i + di, j + dj
            if not inside(ni, nj) or blocked[ni, nj]:
                continue
            ng = base + resolution
            if ng < g[ni, nj]:
                g[ni, nj] = ng
                parent[(ni, nj)] = (i, j)
                heapq.heappush(heap, (ng + heuristic(ni, nj), ni, nj))
        if connectivity == 8:
            for di, dj in _DIAG:
                ni, nj = i + di, j + dj
                if not inside(ni, nj) or blocked[ni, nj]:
                    continue
                if blocked[i + di, j] or blocked[i, j + dj]:
                    continue  # corner cut
                ng = base + resolution * SQRT2
                if ng < g[ni, nj]:
                    g[ni, nj] = ng
                    parent[(ni, nj)] = (i, j)
                    heapq.heappush(heap, (ng + heuristic(ni, nj), ni, nj))
    else:
        raise NoPath(f"no route from {start} to {goal}")

    cells = [goal]
    while cells[-1] != start:
        cells.append(parent[cells[-1]])
    cells.reverse()
    n_orth = n_diag = 0
    for (ai, aj), (bi, bj) in zip(cells, cells[1:]):
        if abs(bi - ai) + abs(bj - aj) == 2:
            n_diag += 1
        else:
            n_orth += 1
    return CellPath(
        tuple(cells), step_cost(n_orth, n_diag, resolution), (n_orth, n_diag), expansions
    )


# ---------------------------------------------------------------------------
# Polyline helpers
# ---------------------------------------------------------------------------

def cells_to_polyline(cells: Sequence[tuple[int, int]], grid: GridMatrix) -> list[tuple[float, float]]:
    return [grid.center(i, j) for i, j in cells]


def merge_collinear_points(points: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    """Drop interior vertices that do not change direction."""
    if len(points) <= 2:
        return list(points)
    out = [points[0]]
    for p in points[1:]:
        if math.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) > _ARC_EPS:
            out.append(p)
    if len(out) <= 2:
        return out
    kept = [out[0]]
    for prev, cur, nxt in zip(out, out[1:], out[2:]):
        ux, uy = cur[0] - prev[0], cur[1] - prev[1]
        vx, vy = nxt[0] - cur[0], nxt[1] - cur[1]
        cross = ux * vy - uy * vx
        dot = ux * vx + uy * vy
        if abs(cross) > 1e-9 or dot < 0:
            kept.append(cur)
    kept.append(out[-1])
    return kept


def _los_clear(
    a: tuple[float, float],
    b: tuple[float, float],
    blocked: np.ndarray,
    grid: GridMatrix,
    spacing: float,
) -> bool:
    """True when every sample of segment a-b lands on a free in-bounds cell."""
    dist = math.hypot(b[0] - a[0], b[1] - a[1])
    n = max(1, math.ceil(dist / spacing))
    ts = np.linspace(0.0, 1.0, n + 1)
    xs = a[0] + ts * (b[0] - a[0])
    ys = a[1] + ts * (b[1] - a[1])
    ii = np.floor((xs - grid.origin[0]) / grid.resolution).astype(np.intp)
    jj = np.floor((ys - grid.origin[1]) / grid.resolution).astype(np.intp)
    if (ii < 0).any() or (jj < 0).any():
        return False
    if (ii >= blocked.shape[0]).any() or (jj >= blocked.shape[1]).any():
        return False
    return not blocked[ii, jj].any()


def simplify_polyline(
    points: Sequence[tuple[float, float]],
    blocked: np.ndarray,
    grid: GridMatrix,
) -> list[tuple[float, float]]:
    """Pull a lattice route taut: keep only corners the obstacles force.

    Grid search returns axis/diagonal staircases whose micro-corners are
    artefacts of cell geometry, not of the environment, and every spurious
    corner later demands its own level landing.  Greedily extending each
    segment from an anchor for as long as the line of sight stays on free
    cells (sampled at ~1/3 cell so thin walls cannot slip between samples)
    collapses those staircases into straight legs.  Endpoints are kept
    exactly; the result is re-checked against the real occupancy grid by
    the caller, never trusted on its own.
    """
    pts = merge_collinear_points(points)
    if len(pts) <= 2:
        return pts
    spacing = grid.resolution * 0.35
    out = [pts[0]]
    i = 0
    while i < len(pts) - 1:
        j = i + 1
        while j + 1 < len(pts) and _los_clear(pts[i], pts[j + 1], blocked, grid, spacing):
            j += 1
        out.append(pts[j])
        i = j
    return merge_collinear_points(out)


def _finish_path(
    points: Sequence[tuple[float, float, float]],
    source: str,
    cost: float | None = None,
    expansions: int = 0,
    notes: tuple[str, ...] = (),
) -> RampPath:
    """Assemble a RampPath from (x, y, z) breakpoints: dedupe, classify
    segments, measure the steepest grade, and collect level intervals."""
    pts: list[tuple[float, float, float]] = []
    for p in points:
        if pts and math.hypot(p[0] - pts[-1][0], p[1] - pts[-1][1]) <= _ARC_EPS:
            pts[-1] = (pts[-1][0], pts[-1][1], p[2])
            continue
        pts.append(p)
    if len(pts) < 2:
        raise MalformedInput("a ramp path needs at least two distinct stations")

    arcs = [0.0]
    for a, b in zip(pts, pts[1:]):
        arcs.append(arcs[-1] + math.hypot(b[0] - a[0], b[1] - a[1]))

    kinds = []
    slope = 0.0
    for (a, b), (a0, a1) in zip(zip(pts, pts[1:]), zip(arcs, arcs[1:])):
        dz = b[2] - a[2]
        if abs(dz) <= _LEVEL_EPS:
            kinds.append("landing")
        else:
            kinds.append("ramp")
            slope = max(slope, abs(dz) / (a1 - a0))

    stations = tuple(
        Station(x, y, z, arc, kind)
        for (x, y, z), arc, kind in zip(pts, arcs, kinds + ["end"])
    )

    landings: list[tuple[float, float]] = []
    run_start: float | None = None
    for idx, kind in enumerate(kinds):
        if kind == "landing":
            if run_start is None:
                run_start = arcs[idx]
        elif run_start is not None:
            landings.append((run_start, arcs[idx]))
            run_start = None
    if run_start is not None:
        landings.append((run_start, arcs[-1]))

    return RampPath(
        stations=stations,
        slope=slope,
        landings=tuple(landings),
        source=source,
        cost=arcs[-1] if cost is None else cost,
        expansions=expansions,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# Height assignment along a planar route
# ---------------------------------------------------------------------------

def _sharp_corner_arcs(
    plan: Sequence[tuple[float, float]], arcs: Sequence[float], min_turn_deg: float = 5.0
) -> list[float]:
    corners = []
    for i in range(1, len(plan) - 1):
        ux, uy = plan[i][0] - plan[i - 1][0], plan[i][1] - plan[i - 1][1]
        vx, vy = plan[i + 1][0] - plan[i][0], plan[i + 1][1] - plan[i][1]
        lu, lv = math.hypot(ux, uy), math.hypot(vx, vy)
        if lu < 1e-12 or lv < 1e-12:
            continue
        cosang = max(-1.0, min(1.0, (ux * vx + uy * vy) / (lu * lv)))
        if math.degrees(math.acos(cosang)) > min_turn_deg:
            corners.append(arcs[i])
    return corners


def _landing_windows(
    total: float, corners: Sequence[float], landing_length: float
) -> list[list[float]]:
    """Terminal landings plus one centred on every plan corner, merged
    where they overlap; direction changes must happen on the level."""
    half = landing_length / 2.0
    wins = [[0.0, landing_length]]
    wins += [[c - half, c + half] for c in sorted(corners)]
    wins.append([total - landing_length, total])
    wins.sort()
    merged = [list(wins[0])]
    for w in wins[1:]:
        if w[0] <= merged[-1][1] + 1e-9:
            merged[-1][1] = max(merged[-1][1], w[1])
        else:
            merged.append(list(w))
    merged[0][0] = max(0.0, merged[0][0])
    merged[-1][1] = min(total, merged[-1][1])
    return merged


def _slot_capacity(
    length: float, slope: float, max_rise_per_run: float, landing_length: float
) -> float:
    """Max rise climbable in a gap of this length, inserting as many
    intermediate landings as pay for themselves."""
    best = 0.0
    j = 0
    while True:
        len_cap = (length - j * landing_length) * slope
        if len_cap <= 0:
            break
        best = max(best, min(len_cap, (j + 1) * max_rise_per_run))
        if len_cap <= (j + 1) * max_rise_per_run:
            break  # length-bound; more landings only lose climbing room
        j += 1
    return best


def _profile_automatic(
    total: float,
    rise: float,
    slope: float,
    max_rise_per_run: float,
    landing_length: float,
    corners: Sequence[float] = (),
) -> list[tuple[float, float]]:
    runs_flat = max(1, math.ceil(rise / max_rise_per_run - 1e-9))
    base_required = (rise / slope if rise > 0 else 0.0) + (runs_flat + 1) * landing_length
    if total + 1e-9 < 2 * landing_length:
        raise InsufficientRun(
            f"route is {total:.3f} m but {base_required:.3f} m is needed at grade "
            f"{slope:.4f} (short by {base_required - total:.3f} m)",
            shortfall=base_required - total,
        )

    windows = _landing_windows(total, corners, landing_length)
    slots = [
        (windows[i][1], windows[i + 1][0])
        for i in range(len(windows) - 1)
        if windows[i + 1][0] - windows[i][1] > 1e-9
    ]
    caps = [
        _slot_capacity(b - a, slope, max_rise_per_run, landing_length)
        for a, b in slots
    ]
    total_cap = sum(caps)

    if rise > total_cap + 1e-9:
        if not corners:
            # exact: climb length plus landings between and around the runs
            required = base_required
            shortfall = required - total
        else:
            deficit = rise - total_cap
            runs_d = max(1, math.ceil(deficit / max_rise_per_run - 1e-9))
            shortfall = deficit / slope + runs_d * landing_length
            required = total + shortfall
        raise InsufficientRun(
            f"route is {total:.3f} m but about {required:.3f} m is needed at grade "
            f"{slope:.4f} with level turns (short by {shortfall:.3f} m)",
            shortfall=shortfall,
        )

    # assign rise to slots front to back; trailing slots stay level
    assigned = []
    rem = rise
    for cap in caps:
        r = min(rem, cap)
        assigned.append(r)
        rem -= r

    pts = [(0.0, 0.0)]
    z = 0.0
    for (a, b), r in zip(slots, assigned):
        if pts[-1][0] < a - 1e-12:
            pts.append((a, z))
        if r <= 1e-12:
            pts.append((b, z))
            continue
        target = z + r
        j = 0
        while not (
            (j + 1) * max_rise_per_run >= r - 1e-9
            and ((b - a) - j * landing_length) * slope >= r - 1e-9
        ):
            j += 1
        run_rise = r / (j + 1)
        run_len = run_rise / slope
        slack = (b - a) - r / slope - j * landing_length
        cursor = a + slack / 2.0
        if cursor > a + 1e-12:
            pts.append((cursor, z))
        for k in range(j + 1):
            cursor += run_len
            zk = target if k == j else z + run_rise * (k + 1)
            pts.append((cursor, zk))
            if k < j:
                cursor += landing_length
                pts.append((cursor, zk))
        z = target
        if b > cursor + 1e-12:
            pts.append((b, z))
    if pts[-1][0] < total - 1e-12:
        pts.append((total, z))
    else:
        pts[-1] = (total, z)
    return pts


def _profile_manual(
    total: float,
    rise: float,
    slope: float,
    max_rise_per_run: float,
    landing_length: float,
    landings: Sequence[float],
) -> list[tuple[float, float]]:
    starts = list(landings)
    if any(b < a for a, b in zip(starts, starts[1:])):
        raise InvalidManualLandings("landing stations must be ascending")
    cursor = 0.0
    intervals = []
    for a in starts:
        if a < cursor - 1e-9 or a + landing_length > total + 1e-9:
            raise InvalidManualLandings(
                f"landing at {a:.3f} m overlaps its neighbour or runs off the path"
            )
        intervals.append((a, min(a + landing_length, total)))
        cursor = a + landing_length

    pts = [(0.0, 0.0)]
    z = 0.0
    a_prev = 0.0
    for a0, a1 in intervals + [(total, total)]:
        stretch = a0 - a_prev
        gain = min(rise - z, stretch * slope)
        if gain > max_rise_per_run + 1e-9:
            raise InvalidManualLandings(
                f"stretch before landing at {a0:.3f} m rises {gain:.3f} m, "
                f"over the {max_rise_per_run} m limit"
            )
        if gain > 0:
            pts.append((a_prev + gain / slope, z + gain))
            z += gain
        if a0 > a_prev:
            pts.append((a0, z))
        if a1 > a0:
            pts.append((a1, z))
        a_prev = a1
    if z < rise - 1e-9:
        raise InsufficientRun(
            f"manual landings leave only {z:.3f} m of the {rise:.3f} m rise achievable",
            shortfall=(rise - z) / slope,
        )
    return pts


def assign_heights(
    polyline: Sequence[tuple[float, float]],
    rise: float,
    slope: float,
    *,
    max_rise_per_run: float,
    landing_length: float,
    start_z: float = 0.0,
    mode: str = "automatic",
    manual_landings: Sequence[float] = (),
    expansions: int = 0,
) -> RampPath:
    """Drape a height profile over a planar polyline.

    Automatic mode splits the rise into runs of at most
    ``max_rise_per_run`` separated by landings, forces a landing over
    every plan corner (direction changes happen on the level), and
    shares leftover length between extended start and end landings.
    Manual mode places landings at caller-given arc stations and climbs
    at ``slope`` in between, corners included.
    """
    if rise < 0:
        raise MalformedInput("rise must be non-negative (swap endpoints first)")
    if slope <= 0:
        raise MalformedInput("slope must be positive")
    plan = merge_collinear_points(polyline)
    if len(plan) < 2:
        raise MalformedInput("polyline must contain at least two distinct points")

    arcs = [0.0]
    for a, b in zip(plan, plan[1:]):
        arcs.append(arcs[-1] + math.hypot(b[0] - a[0], b[1] - a[1]))
    total = arcs[-1]

    if mode == "automatic":
        profile = _profile_automatic(
            total, rise, slope, max_rise_per_run, landing_length,
            corners=_sharp_corner_arcs(plan, arcs),
        )
    elif mode == "manual":
        profile = _profile_manual(
            total, rise, slope, max_rise_per_run, landing_length, manual_landings
        )
    else:
        raise MalformedInput(f"unknown landing mode {mode!r}")

    def z_of(arc: float) -> float:
        for (a0, z0), (a1, z1) in zip(profile, profile[1:]):
            if arc <= a1 + 1e-12:
                if a1 - a0 <= 1e-12:
                    return z1
                if arc <= a0:
                    return z0
                return z0 + (arc - a0) * (z1 - z0) / (a1 - a0)
        return profile[-1][1]

    def plan_at(arc: float) -> tuple[float, float]:
        for (p, q), (a0, a1) in zip(zip(plan, plan[1:]), zip(arcs, arcs[1:])):
            if arc <= a1 + 1e-12:
                t = 0.0 if a1 - a0 <= 1e-12 else max(0.0, (arc - a0) / (a1 - a0))
                return p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])
        return plan[-1]

    breakpoints = sorted(set(arcs) | {a for a, _z in profile})
    merged = [breakpoints[0]]
    for a in breakpoints[1:]:
        if a - merged[-1] > _ARC_EPS:
            merged.append(a)
    merged[-1] = total

    points = []
    for a in merged:
        x, y = plan_at(a)
        points.append((x, y, start_z + z_of(a)))
    return _finish_path(points, "planar", expansions=expansions)


# ---------------------------------------------------------------------------
# Collision checking of a draped route against the fine grid
# ---------------------------------------------------------------------------

def disk_offsets(radius_m: float, cell: float) -> list[tuple[int, int]]:
    """Fine-cell offsets whose centres fall within ``radius_m``."""
    rad = int(math.floor(radius_m / cell + 1e-9))
    out = []
    limit = (radius_m / cell) ** 2 + 1e-9
    for di in range(-rad, rad + 1):
        for dj in range(-rad, rad + 1):
            if di * di + dj * dj <= limit:
                out.append((di, dj))
    return out


def check_path_collision(
    path: RampPath,
    grid: GridMatrix,
    *,
    deck_width: float,
    deck_thickness: float,
    clearance: float,
    max_reports: int = 5,
) -> list[str]:
    """Walk the route and test the swept deck plus headroom against the
    occupancy grid.  Returns human-readable violations (empty = clear)."""
    offsets = disk_offsets(deck_width / 2.0, grid.resolution)
    di = np.array([o[0] for o in offsets])
    dj = np.array([o[1] for o in offsets])
    length = path.length
    n = max(2, int(math.ceil(length / grid.resolution)) + 1)
    out: list[str] = []
    for idx in range(n):
        arc = min(length, idx * grid.resolution)
        x, y = path.point_at(arc)
        z = path.z_at(arc)
        ci, cj = grid.cell_of(x, y)
        ii = di + ci
        jj = dj + cj
        if grid.blocked_any(ii, jj, z - deck_thickness, z + clearance):
            out.append(
                f"obstruction within the deck/headroom envelope at arc {arc:.2f} m "
                f"(plan {x:.2f}, {y:.2f}, deck z {z:.3f})"
            )
            if len(out) >= max_reports:
                break
    return out


def check_self_separation(
    path: RampPath,
    *,
    deck_width: float,
    deck_thickness: float,
    clearance: float,
    sample_step: float = 0.25,
    max_reports: int = 5,
) -> list[str]:
    """Find places where the route doubles back over itself too closely.

    Samples the centreline and compares far-apart-on-arc pairs: where
    they come closer in plan than the deck width, the decks must either
    sit at the same level (they merge, as around a turning pad) or be
    stacked with full headroom between the lower top and the upper
    underside.  Returns human-readable violations (empty = clear).

    The default step matches the headroom rule's measurement grid, so a
    clean result here cannot flip to a violation when re-measured.
    """
    length = path.length
    n = max(2, int(math.ceil(length / sample_step)) + 1)
    arcs = np.linspace(0.0, length, n)
    xy = np.array([path.point_at(a) for a in arcs])
    zs = np.array([path.z_at(a) for a in arcs])
    window = 3.0 * deck_width
    min_dz = clearance + deck_thickness
    out: list[str] = []
    for a in range(n):
        sep = arcs - arcs[a]
        plan = np.hypot(xy[:, 0] - xy[a, 0], xy[:, 1] - xy[a, 1])
        dz = np.abs(zs - zs[a])
        bad = (sep > window) & (plan < deck_width) & (dz > 1e-6) & (dz < min_dz - 1e-6)
        for b in np.nonzero(bad)[0]:
            out.append(
                f"deck at arc {arcs[b]:.2f} m passes {dz[b]:.3f} m above the leg "
                f"at arc {arcs[a]:.2f} m; legs this close in plan need "
                f"{min_dz:.2f} m of rise between them or a level merge"
            )
            if len(out) >= max_reports:
                return out
    return out


# ---------------------------------------------------------------------------
# Layered (elevation-aware) A*
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Lattice:
    origin: tuple[float, float]
    cell: float
    nx: int
    ny: int
    base_z: float
    z_step: float
    nz: int
    cum: np.ndarray  # (nx, ny, nz) cumulative blocked counts along z

    def cell_index(self, x: float, y: float) -> tuple[int, int]:
        return (
            math.floor((x - self.origin[0]) / self.cell),
            math.floor((y - self.origin[1]) / self.cell),
        )

    def center(self, i: int, j: int) -> tuple[float, float]:
        return (
            self.origin[0] + (i + 0.5) * self.cell,
            self.origin[1] + (j + 0.5) * self.cell,
        )

    def usable(self, i: int, j: int, z_lo: float, z_hi: float) -> bool:
        if not (0 <= i < self.nx and 0 <= j < self.ny):
            return False
        k0 = max(0, math.floor((z_lo - self.base_z) / self.z_step + 1e-9))
        k1 = min(self.nz, math.ceil((z_hi - self.base_z) / self.z_step - 1e-9))
        if k1 <= k0:
            return True
        blocked = self.cum[i, j, k1 - 1] - (self.cum[i, j, k0 - 1] if k0 else 0)
        return blocked == 0


def build_lattice(grid: GridMatrix, search_cell: float) -> _Lattice:
    """Aggregate the fine grid into coarse plan cells (logical OR of the
    footprint) with cumulative counts along z for O(1) interval queries."""
    m = max(1, round(search_cell / grid.resolution))
    c_eff = m * grid.resolution
    nx = grid.dims[0] // m
    ny = grid.dims[1] // m
    if nx < 1 or ny < 1:
        raise NoFeasibleRamp(
            f"site is smaller than one {c_eff} m search cell; refine search_cell"
        )
    nz = grid.dims[2]
    occ = grid.occupancy[: nx * m, : ny * m, :]
    coarse = occ.reshape(nx, m, ny, m, nz).any(axis=(1, 3))
    cum = np.cumsum(coarse, axis=2, dtype=np.int32)
    return _Lattice(
        origin=grid.origin,
        cell=c_eff,
        nx=nx,
        ny=ny,
        base_z=grid.base_z,
        z_step=grid.z_step,
        nz=nz,
        cum=cum,
    )


def _layered_astar(
    lat: _Lattice,
    start_cell: tuple[int, int],
    goal_cell: tuple[int, int],
    *,
    start_z: float,
    k_goal: int,
    dz_actual: float,
    budget: int,
    landing_steps: int,
    deck_thickness: float,
    clearance: float,
    connectivity: int,
    max_expansions: int,
    banned: set[tuple[int, int, int]],
) -> tuple[list[tuple[int, int, int, int, int]], tuple[int, int], int]:
    """A* over states (i, j, ramp-steps k, budget-used b, landing-progress p).

    Every ramping step raises the deck by ``dz_actual``; level steps leave
    it unchanged.  b counts ramp steps since the last completed landing
    (capped at ``budget``); p counts consecutive level steps, saturating
    at ``landing_steps`` which marks a completed landing and resets b.
    The start begins with b == budget so a full landing must precede the
    first climb, and the goal requires p == landing_steps so the route
    ends on one.

    The vertical heuristic is admissible but not consistent (finishing a
    landing can unlock a large drop), so states are never closed for
    good: stale heap entries are skipped and better g-values re-open.
    """
    c = lat.cell
    P = landing_steps
    B = budget
    K = k_goal
    gi, gj = goal_cell

    def heuristic(i: int, j: int, k: int, b: int, p: int) -> float:
        dx = abs(i - gi)
        dy = abs(j - gj)
        if connectivity == 4:
            h_plan = c * (dx + dy)
        else:
            lo, hi = (dx, dy) if dx < dy else (dy, dx)
            h_plan = c * (hi - lo) + c * lo * SQRT2
        dk = K - k
        if dk == 0:
            lb_level = P - p
        else:
            # mid-landing states must finish the landing (P - p steps)
            # which then refreshes the ramp budget to B
            finish = P - p if 0 < p < P else 0
            avail = B if 0 < p < P else B - b
            extra_landings = max(0, -((avail - dk) // B))
            lb_level = finish + extra_landings * P + P
        return max(h_plan, c * (dk + lb_level))

    def usable(i: int, j: int, z: float) -> bool:
        return lat.usable(i, j, z - deck_thickness, z + clearance)

    def z_of(k: int) -> float:
        return start_z + k * dz_actual

    start_state = (start_cell[0], start_cell[1], 0, B, 0)
    if not usable(start_cell[0], start_cell[1], z_of(0)):
        raise NoFeasibleRamp("start cell lacks deck clearance at its own elevation")
    if not usable(gi, gj, z_of(K)):
        raise NoFeasibleRamp("end cell lacks deck clearance at the target elevation")

    dirs = _ORTH + (_DIAG if connectivity == 8 else ())
    g_best: dict[tuple, float] = {start_state: 0.0}
    parent: dict[tuple, tuple] = {}
    h0 = heuristic(*start_state)
    heap: list[tuple[float, float, int, int, int, int, int]] = [(h0, 0.0, *start_state)]
    expansions = 0

    while heap:
        f, gneg, i, j, k, b, p = heapq.heappop(heap)
        state = (i, j, k, b, p)
        gcur = -gneg
        if gcur > g_best.get(state, math.inf) + 1e-12:
            continue
        expansions += 1
        if expansions > max_expansions:
            raise NoFeasibleRamp(
                f"layered search exceeded its budget of {max_expansions} expansions"
            )
        if (i, j) == goal_cell and k == K and p == P:
            states = [state]
            while states[-1] in parent:
                states.append(parent[states[-1]])
            states.reverse()
            n_orth = n_diag = 0
            for (ai, aj, *_a), (bi, bj, *_b) in zip(states, states[1:]):
                if abs(bi - ai) + abs(bj - aj) == 2:
                    n_diag += 1
                else:
                    n_orth += 1
            return states, (n_orth, n_diag), expansions

        z_here = z_of(k)
        for di, dj in dirs:
            ni, nj = i + di, j + dj
            diagonal = di != 0 and dj != 0
            step = c * SQRT2 if diagonal else c

            # level move
            np_ = p + 1 if p < P else P
            nb = 0 if np_ == P else b
            if (ni, nj, k) not in banned and usable(ni, nj, z_here):
                ok = True
                if diagonal:
                    ok = usable(i + di, j, z_here) and usable(i, j + dj, z_here)
                if ok:
                    nstate = (ni, nj, k, nb, np_)
                    ng = gcur + step
                    if ng < g_best.get(nstate, math.inf) - 1e-12:
                        g_best[nstate] = ng
                        parent[nstate] = state
                        heapq.heappush(
                            heap, (ng + heuristic(*nstate), -ng, *nstate)
                        )

            # ramping move
            if k < K and (p == 0 or p == P) and b < B:
                z_next = z_of(k + 1)
                if (ni, nj, k + 1) in banned or not usable(ni, nj, z_next):
                    continue
                if diagonal:
                    lo = min(z_here, z_next) - deck_thickness
                    hi = max(z_here, z_next) + clearance
                    if not (
                        lat.usable(i + di, j, lo, hi) and lat.usable(i, j + dj, lo, hi)
                    ):
                        continue
                nstate = (ni, nj, k + 1, b + 1, 0)
                ng = gcur + step
                if ng < g_best.get(nstate, math.inf) - 1e-12:
                    g_best[nstate] = ng
                    parent[nstate] = state
                    heapq.heappush(heap, (ng + heuristic(*nstate), -ng, *nstate))

    raise NoFeasibleRamp("layered search exhausted the reachable states")


def _find_conflicts(
    states: Sequence[tuple[int, int, int, int, int]],
    lat: _Lattice,
    dz_actual: float,
    *,
    deck_width: float,
    min_separation: float,
    min_plan_gap: float,
    window: float,
) -> set[tuple[int, int, int]]:
    """Pairs of far-apart-on-path samples that come too close in space.

    Two bands.  Physical: samples closer in plan than the deck width
    must be level (the decks merge, as at a turnaround) or stacked at
    least ``min_separation`` apart — otherwise the decks interpenetrate
    or choke the headroom.  Design: beyond ``window`` arc metres, plan
    distance under ``min_plan_gap`` conflicts even at the same level,
    keeping parallel legs visibly apart; only a revisit of the same cell
    at the same elevation is benign (one level pad).

    The final route is re-validated on a continuous 0.25 m grid whose
    sample pairs fall between lattice states, so the physical band bans
    with a one-diagonal margin on both the arc window and the plan
    distance; without it the search can converge on a route the final
    check then rejects.  Returns the later state of each conflicting
    pair for banning.
    """
    diag = lat.cell * SQRT2
    phys_window = max(3.0 * deck_width - diag, 2.0 * diag)
    phys_plan = deck_width + diag / 2.0
    arcs = [0.0]
    for (ai, aj, *_), (bi, bj, *_) in zip(states, states[1:]):
        step = lat.cell * (SQRT2 if abs(bi - ai) + abs(bj - aj) == 2 else 1)
        arcs.append(arcs[-1] + step)
    bans: set[tuple[int, int, int]] = set()
    n = len(states)
    for a in range(n):
        ia, ja, ka, *_ = states[a]
        for b in range(a + 1, n):
            sep = arcs[b] - arcs[a]
            if sep <= phys_window:
                continue
            ib, jb, kb, *_ = states[b]
            plan = math.hypot(ib - ia, jb - ja) * lat.cell
            dz = abs(kb - ka) * dz_actual
            if dz >= min_separation - 1e-9:
                continue
            if plan < phys_plan - 1e-9 and kb != ka:
                bans.add((ib, jb, kb))
                continue
            if sep <= window or plan >= min_plan_gap - 1e-9:
                continue
            if ka == kb and ia == ib and ja == jb:
                continue  # coincident level pad
            bans.add((ib, jb, kb))
    return bans


def search_3d(
    grid: GridMatrix,
    start: tuple[float, float, float],
    end: tuple[float, float, float],
    *,
    slope: float,
    search_cell: float,
    deck_width: float,
    deck_thickness: float,
    clearance: float,
    max_rise_per_run: float,
    landing_length: float,
    inter_path_distance: float,
    connectivity: int = 8,
    max_expansions: int = 500_000,
    ban_iterations: int = 50,
) -> RampPath:
    """Route a ramp through the occupancy lattice, elevation included.

    The returned path climbs at a uniform grade (at most ``slope``;
    slightly shallower when the rise is not an exact multiple of the
    per-step gain), inserts full-length landings whenever the rise budget
    runs out, and starts and ends on landings.  Self-overlap constraints
    (headroom between stacked legs, plan gap between parallel legs) are
    enforced lazily: conflicting lattice states from a candidate path are
    banned and the search repeats.
    """
    rise = end[2] - start[2]
    if rise < -1e-9:
        raise MalformedInput("end must not be below start (swap endpoints first)")
    lat = build_lattice(grid, search_cell)
    s_cell = lat.cell_index(start[0], start[1])
    g_cell = lat.cell_index(end[0], end[1])
    if not (0 <= s_cell[0] < lat.nx and 0 <= s_cell[1] < lat.ny):
        raise NoFeasibleRamp("start point falls outside the search lattice")
    if not (0 <= g_cell[0] < lat.nx and 0 <= g_cell[1] < lat.ny):
        raise NoFeasibleRamp("end point falls outside the search lattice")
    if s_cell == g_cell:
        raise NoFeasibleRamp(
            "start and end fall in the same search cell; use a finer search_cell"
        )

    dz_step = lat.cell * slope
    k_goal = 0 if rise <= 1e-12 else math.ceil(rise / dz_step - 1e-9)
    lam = 1.0 if k_goal == 0 else rise / (k_goal * dz_step)
    dz_actual = dz_step * lam
    budget = math.floor(max_rise_per_run / dz_step + 1e-9)
    if k_goal > 0 and budget == 0:
        raise NoFeasibleRamp(
            f"one {lat.cell} m step at grade {slope} rises more than "
            f"max_rise_per_run={max_rise_per_run}"
        )
    landing_steps = max(1, math.ceil(landing_length / lat.cell - 1e-9))

    banned: set[tuple[int, int, int]] = set()
    for _round in range(ban_iterations):
        states, counts, expansions = _layered_astar(
            lat,
            s_cell,
            g_cell,
            start_z=start[2],
            k_goal=k_goal,
            dz_actual=dz_actual,
            budget=budget,
            landing_steps=landing_steps,
            deck_thickness=deck_thickness,
            clearance=clearance,
            connectivity=connectivity,
            max_expansions=max_expansions,
            banned=banned,
        )
        conflicts = _find_conflicts(
            states,
            lat,
            dz_actual,
            deck_width=deck_width,
            min_separation=clearance + deck_thickness,
            min_plan_gap=inter_path_distance,
            window=3.0 * inter_path_distance,
        )
        conflicts -= banned
        if not conflicts:
            points = []
            for i, j, k, _b, _p in states:
                x, y = lat.center(i, j)
                z = start[2] + rise if k == k_goal else start[2] + k * dz_actual
                points.append((x, y, z))
            cost = step_cost(counts[0], counts[1], lat.cell)
            return _finish_path(
                _merge_collinear_3d(points), "layered", cost=cost, expansions=expansions
            )
        banned |= conflicts

    raise NoFeasibleRamp(
        f"could not separate overlapping legs after {ban_iterations} replans"
    )


def _merge_collinear_3d(
    points: Sequence[tuple[float, float, float]]
) -> list[tuple[float, float, float]]:
    """Drop interior points where neither plan direction nor grade changes."""
    if len(points) <= 2:
        return list(points)
    kept = [points[0]]
    for prev, cur, nxt in zip(points, points[1:], points[2:]):
        ux, uy, uz = (cur[0] - prev[0], cur[1] - prev[1], cur[2] - prev[2])
        vx, vy, vz = (nxt[0] - cur[0], nxt[1] - cur[1], nxt[2] - cur[2])
        cross = ux * vy - uy * vx
        lu = math.hypot(ux, uy)
        lv = math.hypot(vx, vy)
        same_dir = abs(cross) <= 1e-9 and ux * vx + uy * vy > 0
        same_grade = lu > 0 and lv > 0 and abs(uz / lu - vz / lv) <= 1e-9
        if not (same_dir and same_grade):
            kept.append(cur)
    kept.append(points[-1])
    return kept


# ---------------------------------------------------------------------------
# Slope selection
# ---------------------------------------------------------------------------

def optimize_slope(
    attempt: Callable[[float], RampPath],
    *,
    desired_slope: float,
    slope_min: float,
    slope_max: float,
    slope_step: float,
    weight_slope: float = 1.0,
    weight_length: float = 1.0,
    length_lb: float = 1.0,
) -> tuple[RampPath | None, float | None, list[dict]]:
    """Try every candidate grade and keep the best-scoring feasible ramp.

    Score = weight_slope * |s - desired| / desired
          + weight_length * (length / length_lb - 1)

    Lower is better; exact ties go to the steeper (shorter) candidate.
    Returns (best path or None, its grade, per-candidate table).
    """
    candidates: list[float] = []
    v = slope_min
    while v < slope_max - 1e-12:
        candidates.append(v)
        v += slope_step
    candidates.append(slope_max)
    if slope_min - 1e-12 <= desired_slope <= slope_max + 1e-12:
        candidates.append(desired_slope)
    candidates.sort()
    unique = [candidates[0]]
    for s in candidates[1:]:
        if s - unique[-1] > 1e-12:
            unique.append(s)

    lb = max(length_lb, 1e-9)
    best: RampPath | None = None
    best_slope: float | None = None
    best_key: tuple[float, float] | None = None
    rows: list[dict] = []
    for s in unique:
        try:
            path = attempt(s)
        except (InsufficientRun, InvalidManualLandings, NoFeasibleRamp, NoPath) as exc:
            rows.append(
                {
                    "slope": s,
                    "feasible": False,
                    "reason": f"{type(exc).__name__}: {exc}",
                }
            )
            continue
        score = (
            weight_slope * abs(s - desired_slope) / desired_slope
            + weight_length * (path.length / lb - 1.0)
        )
        rows.append(
            {
                "slope": s,
                "feasible": True,
                "length": path.length,
                "landings": len(path.intermediate_landings()),
                "source": path.source,
                "score": score,
            }
        )
        key = (score, -s)
        if best_key is None or key < best_key:
            best, best_slope, best_key = path, s, key
    return best, best_slope, rows


# ---------------------------------------------------------------------------
# Cosmetic smoothing
# ---------------------------------------------------------------------------

def smooth_path(path: RampPath, *, style: str = "straight", fillet_radius: float = 0.6,
                max_seg_angle_deg: float = 15.0) -> RampPath:
    """Optionally round level corners with circular fillets.

    Only corners whose flanking segments are both level are touched:
    shortening a ramping segment would steepen its grade.  The fillet
    radius shrinks to fit short flanks.  ``style="straight"`` returns the
    path unchanged.
    """
    if style != "curve" or len(path.stations) < 3:
        return path
    pts = [(st.x, st.y, st.z) for st in path.stations]
    kinds = [st.kind for st in path.stations]
    out: list[tuple[float, float, float]] = [pts[0]]
    for idx in range(1, len(pts) - 1):
        prev, cur, nxt = pts[idx - 1], pts[idx], pts[idx + 1]
        if not (kinds[idx - 1] == "landing" and kinds[idx] == "landing"):
            out.append(cur)
            continue
        ux, uy = cur[0] - prev[0], cur[1] - prev[1]
        vx, vy = nxt[0] - cur[0], nxt[1] - cur[1]
        lu = math.hypot(ux, uy)
        lv = math.hypot(vx, vy)
        if lu < 1e-9 or lv < 1e-9:
            out.append(cur)
            continue
        ang = math.atan2(ux * vy - uy * vx, ux * vx + uy * vy)
        if abs(ang) < math.radians(8.0) or abs(ang) > math.radians(150.0):
            out.append(cur)
            continue
        half = abs(ang) / 2.0
        setback = min(0.45 * lu, 0.45 * lv, fillet_radius * math.tan(half))
        radius = setback / math.tan(half)
        p_in = (cur[0] - ux / lu * setback, cur[1] - uy / lu * setback)
        p_out = (cur[0] + vx / lv * setback, cur[1] + vy / lv * setback)
        n_seg = max(2, int(math.ceil(abs(ang) / math.radians(max_seg_angle_deg))))
        side = 1.0 if ang > 0 else -1.0
        cxn = (-uy / lu * side, ux / lu * side)
        center = (p_in[0] + cxn[0] * radius, p_in[1] + cxn[1] * radius)
        a0 = math.atan2(p_in[1] - center[1], p_in[0] - center[0])
        for t in range(n_seg + 1):
            a = a0 + side * abs(ang) * t / n_seg
            out.append(
                (center[0] + radius * math.cos(a), center[1] + radius * math.sin(a), cur[2])
            )
    out.append(pts[-1])
    smoothed = _finish_path(out, path.source, expansions=path.expansions,
                            notes=path.notes + ("level corners rounded",))
    return smoothed
