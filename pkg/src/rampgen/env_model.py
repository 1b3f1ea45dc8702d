"""Environment parsing and rasterization into the 3D occupancy lattice.

The environment file is a small JSON document (boundary polygon, prism
obstacles, start/end points); see ``data/environment.schema.json``.  The
lattice blocks a cell iff its centre lies outside the boundary or inside
an obstacle footprint whose height interval overlaps the cell's band.
Cells are half-open ``[x, x + r)`` so points on cell boundaries resolve
deterministically.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Iterable

import numpy as np

try:
    import jsonschema
except ImportError:  # pragma: no cover
    jsonschema = None

from .errors import (
    EndpointCellBlocked,
    EndpointInsideObstacle,
    EndpointOutsideBoundary,
    InvalidBoundary,
    MalformedInput,
    ResolutionTooCoarse,
)

_AREA_EPS = 1e-12


@dataclass(frozen=True)
class Obstacle:
    polygon: tuple[tuple[float, float], ...]
    base_z: float
    top_z: float


@dataclass(frozen=True)
class EnvironmentSpec:
    boundary: tuple[tuple[float, float], ...]
    obstacles: tuple[Obstacle, ...]
    start: tuple[float, float, float]
    end: tuple[float, float, float]
    ground_z: float = 0.0
    # True when parse swapped start/end to normalize end.z >= start.z.
    swapped: bool = field(default=False, compare=False)

    @property
    def rise(self) -> float:
        return self.end[2] - self.start[2]


@dataclass(frozen=True)
class GridMatrix:
    """Rasterized occupancy lattice; ``occupancy[i, j, k]`` True = blocked."""

    origin: tuple[float, float]
    resolution: float
    dims: tuple[int, int, int]
    z_step: float
    base_z: float
    occupancy: np.ndarray

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        i = math.floor((x - self.origin[0]) / self.resolution)
        j = math.floor((y - self.origin[1]) / self.resolution)
        return i, j

    def center(self, i: int, j: int) -> tuple[float, float]:
        return (
            self.origin[0] + (i + 0.5) * self.resolution,
            self.origin[1] + (j + 0.5) * self.resolution,
        )

    def band_of(self, z: float) -> int:
        return math.floor((z - self.base_z) / self.z_step)

    def in_bounds(self, i: int, j: int) -> bool:
        return 0 <= i < self.dims[0] and 0 <= j < self.dims[1]

    @cached_property
    def _cum_blocked(self) -> np.ndarray:
        return np.cumsum(self.occupancy, axis=2, dtype=np.int32)

    def _band_range(self, z_lo: float, z_hi: float) -> tuple[int, int]:
        k0 = max(0, math.floor((z_lo - self.base_z) / self.z_step + 1e-9))
        k1 = min(self.dims[2], math.ceil((z_hi - self.base_z) / self.z_step - 1e-9))
        return k0, k1

    def blocked_between(self, i: int, j: int, z_lo: float, z_hi: float) -> bool:
        """True when any band overlapping the (open) z interval is occupied."""
        if not self.in_bounds(i, j):
            return True
        k0, k1 = self._band_range(z_lo, z_hi)
        if k1 <= k0:
            return False
        cum = self._cum_blocked
        count = cum[i, j, k1 - 1] - (cum[i, j, k0 - 1] if k0 else 0)
        return bool(count)

    def blocked_any(self, ii: np.ndarray, jj: np.ndarray, z_lo: float, z_hi: float) -> bool:
        """Vectorized ``blocked_between`` over parallel index arrays;
        out-of-grid cells count as blocked."""
        inb = (ii >= 0) & (ii < self.dims[0]) & (jj >= 0) & (jj < self.dims[1])
        if not inb.all():
            return True
        k0, k1 = self._band_range(z_lo, z_hi)
        if k1 <= k0:
            return False
        cum = self._cum_blocked
        counts = cum[ii, jj, k1 - 1] - (cum[ii, jj, k0 - 1] if k0 else 0)
        return bool(counts.any())


# ---------------------------------------------------------------------------
# Polygon predicates
# ---------------------------------------------------------------------------

def polygon_area(poly: Iterable[tuple[float, float]]) -> float:
    """Signed shoelace area."""
    pts = list(poly)
    area = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:] + pts[:1]):
        area += x0 * y1 - x1 * y0
    return 0.5 * area


def _orient(p, q, r) -> float:
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _on_segment(p, q, r) -> bool:
    return (
        min(p[0], q[0]) - _AREA_EPS <= r[0] <= max(p[0], q[0]) + _AREA_EPS
        and min(p[1], q[1]) - _AREA_EPS <= r[1] <= max(p[1], q[1]) + _AREA_EPS
    )


def _segments_intersect(a, b, c, d) -> bool:
    o1 = _orient(a, b, c)
    o2 = _orient(a, b, d)
    o3 = _orient(c, d, a)
    o4 = _orient(c, d, b)
    if ((o1 > 0) != (o2 > 0)) and ((o3 > 0) != (o4 > 0)) and o1 != 0 and o2 != 0 and o3 != 0 and o4 != 0:
        return True
    if o1 == 0 and _on_segment(a, b, c):
        return True
    if o2 == 0 and _on_segment(a, b, d):
        return True
    if o3 == 0 and _on_segment(c, d, a):
        return True
    if o4 == 0 and _on_segment(c, d, b):
        return True
    return False


def is_simple_polygon(poly: Iterable[tuple[float, float]]) -> bool:
    """True when the polygon has >= 3 vertices, nonzero area, and no
    intersections between non-adjacent edges."""
    pts = list(poly)
    n = len(pts)
    if n < 3:
        return False
    if abs(polygon_area(pts)) < _AREA_EPS:
        return False
    edges = [(pts[i], pts[(i + 1) % n]) for i in range(n)]
    for i in range(n):
        a, b = edges[i]
        if a == b:
            return False
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue  # shared-vertex neighbours
            c, d = edges[j]
            if _segments_intersect(a, b, c, d):
                return False
    return True


def points_in_polygon(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Even-odd ray-casting test, vectorized over ``points`` (N, 2)."""
    x = points[:, 0]
    y = points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    n = len(poly)
    j = n - 1
    for i in range(n):
        xi, yi = poly[i]
        xj, yj = poly[j]
        crosses = (yi > y) != (yj > y)
        if crosses.any():
            x_at = (xj - xi) * (y - yi) / (yj - yi) + xi
            inside ^= crosses & (x < x_at)
        j = i
    return inside


def point_in_polygon(x: float, y: float, poly: Iterable[tuple[float, float]]) -> bool:
    pts = np.asarray(list(poly), dtype=float)
    return bool(points_in_polygon(np.array([[x, y]], dtype=float), pts)[0])


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def _load_schema() -> dict | None:
    if jsonschema is None:
        return None
    text = resources.files("rampgen").joinpath("data/environment.schema.json").read_text("utf-8")
    return json.loads(text)


_SCHEMA_CACHE: list[dict | None] = []


def parse_environment(text: str) -> EnvironmentSpec:
    """Parse and validate an environment JSON document.

    Normalizes orientation so that ``end.z >= start.z``; the ``swapped``
    flag records when that swap happened so reports can mention it.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"environment is not valid JSON: {exc}") from exc
    if not _SCHEMA_CACHE:
        _SCHEMA_CACHE.append(_load_schema())
    schema = _SCHEMA_CACHE[0]
    if schema is not None:
        try:
            jsonschema.validate(raw, schema)
        except jsonschema.ValidationError as exc:
            raise MalformedInput(f"environment schema violation: {exc.message}") from exc

    boundary = tuple((float(x), float(y)) for x, y in raw["boundary"])
    if not is_simple_polygon(boundary):
        raise InvalidBoundary("boundary must be a simple polygon with nonzero area")

    obstacles = []
    for idx, entry in enumerate(raw.get("obstacles", [])):
        poly = tuple((float(x), float(y)) for x, y in entry["polygon"])
        if not is_simple_polygon(poly):
            raise MalformedInput(f"obstacle {idx} polygon is degenerate or self-intersecting")
        base_z = float(entry["base_z"])
        top_z = float(entry["top_z"])
        if top_z <= base_z:
            raise MalformedInput(f"obstacle {idx}: top_z must exceed base_z")
        obstacles.append(Obstacle(poly, base_z, top_z))

    start = tuple(float(v) for v in raw["start"])
    end = tuple(float(v) for v in raw["end"])
    ground_z = float(raw.get("ground_z", 0.0))

    swapped = False
    if end[2] < start[2]:
        start, end = end, start
        swapped = True

    for label, (px, py, _pz) in (("start", start), ("end", end)):
        if not point_in_polygon(px, py, boundary):
            raise EndpointOutsideBoundary(f"{label} point ({px}, {py}) is outside the boundary")
        for idx, obs in enumerate(obstacles):
            if point_in_polygon(px, py, obs.polygon):
                raise EndpointInsideObstacle(
                    f"{label} point ({px}, {py}) lies inside obstacle {idx}"
                )

    return EnvironmentSpec(
        boundary=boundary,
        obstacles=tuple(obstacles),
        start=start,  # type: ignore[arg-type]
        end=end,  # type: ignore[arg-type]
        ground_z=ground_z,
        swapped=swapped,
    )


def serialize_environment(spec: EnvironmentSpec) -> str:
    """Canonical JSON for an EnvironmentSpec; parse(serialize(s)) == s."""
    doc = {
        "boundary": [[x, y] for x, y in spec.boundary],
        "obstacles": [
            {"polygon": [[x, y] for x, y in o.polygon], "base_z": o.base_z, "top_z": o.top_z}
            for o in spec.obstacles
        ],
        "start": list(spec.start),
        "end": list(spec.end),
        "ground_z": spec.ground_z,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Rasterization
# ---------------------------------------------------------------------------

def rasterize(env: EnvironmentSpec, cell: float, z_step: float, z_max: float) -> GridMatrix:
    """Rasterize the environment into a GridMatrix.

    Cell blocking is decided by a point test at the cell centre (adequate
    at the default 0.1 m resolution, and exactly reproducible by the
    brute-force sweep the tests use).
    """
    if cell <= 0 or z_step <= 0:
        raise MalformedInput("cell and z_step must be positive")
    xs = [p[0] for p in env.boundary]
    ys = [p[1] for p in env.boundary]
    ox, oy = min(xs), min(ys)
    nx = max(1, math.ceil((max(xs) - ox) / cell - 1e-9))
    ny = max(1, math.ceil((max(ys) - oy) / cell - 1e-9))
    nz = max(1, math.ceil((z_max - env.ground_z) / z_step - 1e-9))

    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    cx = ox + (ii.ravel() + 0.5) * cell
    cy = oy + (jj.ravel() + 0.5) * cell
    centers = np.column_stack([cx, cy])

    boundary_arr = np.asarray(env.boundary, dtype=float)
    inside = points_in_polygon(centers, boundary_arr).reshape(nx, ny)

    occupancy = np.zeros((nx, ny, nz), dtype=bool)
    occupancy[~inside, :] = True

    for obs in env.obstacles:
        foot = points_in_polygon(centers, np.asarray(obs.polygon, dtype=float)).reshape(nx, ny)
        k_lo = max(0, math.floor((obs.base_z - env.ground_z) / z_step + 1e-9))
        k_hi = min(nz, math.ceil((obs.top_z - env.ground_z) / z_step - 1e-9))
        if k_hi > k_lo:
            occupancy[foot, k_lo:k_hi] = True

    free_i = np.unique(np.nonzero(inside)[0])
    free_j = np.unique(np.nonzero(inside)[1])
    if len(free_i) < 3 or len(free_j) < 3:
        raise ResolutionTooCoarse(
            f"free footprint spans only {len(free_i)}x{len(free_j)} cells at {cell} m; "
            "refine the resolution or enlarge the boundary"
        )

    occupancy.flags.writeable = False
    return GridMatrix(
        origin=(ox, oy),
        resolution=cell,
        dims=(nx, ny, nz),
        z_step=z_step,
        base_z=env.ground_z,
        occupancy=occupancy,
    )


def inflate_plan(grid: GridMatrix, radius_m: float) -> GridMatrix:
    """Dilate blocked cells by a plan-view disk of ``radius_m``.

    The pipeline uses this so the path centreline keeps half a deck width
    away from walls and obstacles.  Beyond-grid space counts as blocked.
    """
    if radius_m <= 0:
        return grid
    rad = int(math.floor(radius_m / grid.resolution + 1e-9))
    if rad == 0:
        return grid
    nx, ny, nz = grid.dims
    padded = np.pad(
        grid.occupancy,
        ((rad, rad), (rad, rad), (0, 0)),
        mode="constant",
        constant_values=True,
    )
    out = np.zeros_like(grid.occupancy)
    # Same center-distance criterion as the collision probe's disk, so a
    # centreline through free inflated cells is guaranteed to pass the
    # fine-grid footprint recheck.
    limit = (radius_m / grid.resolution) ** 2 + 1e-9
    for di in range(-rad, rad + 1):
        for dj in range(-rad, rad + 1):
            if di * di + dj * dj > limit:
                continue
            out |= padded[rad + di : rad + di + nx, rad + dj : rad + dj + ny, :]
    out.flags.writeable = False
    return GridMatrix(
        origin=grid.origin,
        resolution=grid.resolution,
        dims=grid.dims,
        z_step=grid.z_step,
        base_z=grid.base_z,
        occupancy=out,
    )


def locate_endpoints(
    env: EnvironmentSpec, grid: GridMatrix
) -> tuple[tuple[int, int], tuple[int, int]]:
    """Map start/end world points onto their (free) grid cells."""
    out = []
    for label, (px, py, pz) in (("start", env.start), ("end", env.end)):
        i, j = grid.cell_of(px, py)
        if not grid.in_bounds(i, j):
            raise EndpointCellBlocked(f"{label} point falls outside the grid")
        k = min(max(grid.band_of(pz), 0), grid.dims[2] - 1)
        if grid.occupancy[i, j, k]:
            raise EndpointCellBlocked(
                f"{label} point falls in a blocked cell ({i}, {j}) at band {k}"
            )
        out.append((i, j))
    return out[0], out[1]
