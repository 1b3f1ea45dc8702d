"""Swept-solid construction of the ramp model.

The deck is built by sweeping a rectangular cross-section along the
station polyline with mitred joints: lateral offsets are computed in
plan (so cross-sections stay vertical and volumes shear-invariant) and
corners sharper than the deck width allows are cut out of the sweep and
covered with flat turning pads instead.  Railings and support columns
are separate closed solids.

Every solid is individually watertight and consistently oriented;
``validate_mesh`` re-checks that from the triangle soup alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import MalformedInput, SelfIntersectingSweep
from .params import GeomParams
from .pathfinder import RampPath

_RING_SPACING = 0.6  # max distance between sweep rings along a run
# A mitred corner shears the adjacent ring by half_extent * tan(turn/2); the
# sweep folds over once that shear eats the whole stub to the next ring, so
# corners are padded out when it would consume more than this fraction of it.
_PAD_SPLIT_FACTOR = 0.9


# ---------------------------------------------------------------------------
# Mesh container
# ---------------------------------------------------------------------------

@dataclass
class TriMesh:
    vertices: np.ndarray  # (n, 3) float64
    faces: np.ndarray     # (m, 3) int32, outward-oriented

    def __post_init__(self) -> None:
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.asarray(self.faces, dtype=np.int32).reshape(-1, 3)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def signed_volume(self) -> float:
        """Divergence-theorem volume; positive for outward orientation."""
        tri = self.vertices[self.faces]
        return float(
            np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])).sum() / 6.0
        )

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def translated(self, offset: Sequence[float]) -> "TriMesh":
        return TriMesh(self.vertices + np.asarray(offset, dtype=float), self.faces.copy())

    @staticmethod
    def merged(meshes: Iterable["TriMesh"]) -> "TriMesh":
        vs, fs, base = [], [], 0
        for m in meshes:
            vs.append(m.vertices)
            fs.append(m.faces + base)
            base += m.n_vertices
        if not vs:
            return TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int32))
        return TriMesh(np.vstack(vs), np.vstack(fs))


def validate_mesh(mesh: TriMesh) -> list[str]:
    """Structural checks on the triangle soup: finite vertices, valid
    indices, no degenerate triangles, every directed edge used exactly
    once (closed + consistently oriented), and V - E + F = 2 per
    connected component (all our solids are genus zero)."""
    bad: list[str] = []
    if not np.isfinite(mesh.vertices).all():
        bad.append("non-finite vertex coordinates")
    if mesh.n_faces == 0:
        bad.append("empty mesh")
        return bad
    if mesh.faces.min() < 0 or mesh.faces.max() >= mesh.n_vertices:
        bad.append("face index out of range")
        return bad

    tri = mesh.vertices[mesh.faces]
    areas = 0.5 * np.linalg.norm(
        np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1
    )
    if (areas < 1e-14).any():
        bad.append(f"{int((areas < 1e-14).sum())} degenerate triangle(s)")

    directed: dict[tuple[int, int], int] = {}
    for a, b, c in mesh.faces:
        for e in ((int(a), int(b)), (int(b), int(c)), (int(c), int(a))):
            directed[e] = directed.get(e, 0) + 1
    for (a, b), count in directed.items():
        if count != 1:
            bad.append(f"directed edge {(a, b)} used {count} times")
            break
    else:
        for (a, b) in directed:
            if (b, a) not in directed:
                bad.append(f"boundary edge {(a, b)} has no partner")
                break

    # Euler characteristic per connected component
    parent = list(range(mesh.n_vertices))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, c in mesh.faces:
        ra, rb, rc = find(int(a)), find(int(b)), find(int(c))
        parent[rb] = ra
        parent[rc] = ra
    comp_v: dict[int, set[int]] = {}
    comp_e: dict[int, set[tuple[int, int]]] = {}
    comp_f: dict[int, int] = {}
    for face in mesh.faces:
        root = find(int(face[0]))
        comp_f[root] = comp_f.get(root, 0) + 1
        vs = comp_v.setdefault(root, set())
        es = comp_e.setdefault(root, set())
        for idx in range(3):
            a, b = int(face[idx]), int(face[(idx + 1) % 3])
            vs.add(a)
            es.add((min(a, b), max(a, b)))
    for root, f in comp_f.items():
        euler = len(comp_v[root]) - len(comp_e[root]) + f
        if euler != 2:
            bad.append(f"component has Euler characteristic {euler}, expected 2")
    return bad


def z_hits(mesh: TriMesh, x: float, y: float) -> list[float]:
    """z coordinates where the vertical line through (x, y) crosses the
    mesh surface, ascending.  Used to measure built heights and gaps."""
    tri = mesh.vertices[mesh.faces]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    v0 = (b - a)[:, :2]
    v1 = (c - a)[:, :2]
    p = np.array([x, y]) - a[:, :2]
    den = v0[:, 0] * v1[:, 1] - v0[:, 1] * v1[:, 0]
    ok = np.abs(den) > 1e-14
    den_safe = np.where(ok, den, 1.0)
    s = (p[:, 0] * v1[:, 1] - p[:, 1] * v1[:, 0]) / den_safe
    t = (v0[:, 0] * p[:, 1] - v0[:, 1] * p[:, 0]) / den_safe
    mask = ok & (s >= -1e-9) & (t >= -1e-9) & (s + t <= 1 + 1e-9)
    if not mask.any():
        return []
    zs = a[mask, 2] + s[mask] * (b - a)[mask, 2] + t[mask] * (c - a)[mask, 2]
    return sorted(float(z) for z in zs)


# ---------------------------------------------------------------------------
# Cross-sections (2-D profiles in lateral u / vertical v coordinates)
# ---------------------------------------------------------------------------

def deck_section(width: float, thickness: float) -> list[tuple[float, float]]:
    w = width / 2.0
    return [(-w, -thickness), (w, -thickness), (w, 0.0), (-w, 0.0)]


def square_section(cu: float, cv: float, side: float) -> list[tuple[float, float]]:
    h = side / 2.0
    return [(cu - h, cv - h), (cu + h, cv - h), (cu + h, cv + h), (cu - h, cv + h)]


def ngon_section(cu: float, cv: float, radius: float, n: int = 16) -> list[tuple[float, float]]:
    pts = []
    for k in range(n):
        ang = 2.0 * math.pi * k / n + math.pi / n
        pts.append((cu + radius * math.cos(ang), cv + radius * math.sin(ang)))
    return pts


# ---------------------------------------------------------------------------
# Sweeping
# ---------------------------------------------------------------------------

def sweep(
    points: Sequence[tuple[float, float, float]],
    section: Sequence[tuple[float, float]],
    *,
    label: str = "sweep",
) -> TriMesh:
    """Sweep a convex CCW cross-section along a 3-D polyline.

    Lateral offsets follow mitred joint normals computed in plan view;
    the v axis of the section stays globally vertical, so a sloped sweep
    is a sheared copy of the level one (volume = plan length * section
    area exactly for straight or level runs).  Raises
    SelfIntersectingSweep when a mitre would fold a ring past its
    neighbour.
    """
    pts = [np.asarray(p, dtype=float) for p in points]
    if len(pts) < 2:
        raise MalformedInput(f"{label}: need at least two sweep stations")
    n_st = len(pts)

    dirs = []
    for a, b in zip(pts, pts[1:]):
        d = b[:2] - a[:2]
        norm = float(np.hypot(d[0], d[1]))
        if norm <= 1e-12:
            raise SelfIntersectingSweep(
                f"{label}: zero-length plan segment", station_index=len(dirs)
            )
        dirs.append(d / norm)
    normals = [np.array([-d[1], d[0]]) for d in dirs]

    offset_dirs = []
    for i in range(n_st):
        if i == 0:
            nb, scale = normals[0], 1.0
        elif i == n_st - 1:
            nb, scale = normals[-1], 1.0
        else:
            s = normals[i - 1] + normals[i]
            norm = float(np.hypot(s[0], s[1]))
            if norm <= 1e-9:
                raise SelfIntersectingSweep(
                    f"{label}: reversal at station {i}", station_index=i
                )
            nb = s / norm
            scale = 1.0 / float(nb @ normals[i])
        offset_dirs.append(nb * scale)

    k = len(section)
    verts = np.empty((n_st * k, 3), dtype=float)
    for i, (p, od) in enumerate(zip(pts, offset_dirs)):
        for j, (u, v) in enumerate(section):
            verts[i * k + j, 0] = p[0] + u * od[0]
            verts[i * k + j, 1] = p[1] + u * od[1]
            verts[i * k + j, 2] = p[2] + v

    # fold-over: every ring vertex must advance along its segment
    for i in range(n_st - 1):
        d = dirs[i]
        for j in range(k):
            a = verts[i * k + j]
            b = verts[(i + 1) * k + j]
            if (b[0] - a[0]) * d[0] + (b[1] - a[1]) * d[1] <= 1e-9:
                raise SelfIntersectingSweep(
                    f"{label}: mitre folds over at station {i + 1}; "
                    "the turn is too sharp for this section width",
                    station_index=i + 1,
                )

    faces = []
    for i in range(n_st - 1):
        r0, r1 = i * k, (i + 1) * k
        for j in range(k):
            jn = (j + 1) % k
            faces.append((r0 + j, r0 + jn, r1 + jn))
            faces.append((r0 + j, r1 + jn, r1 + j))
    for j in range(1, k - 1):  # start cap, facing backwards
        faces.append((0, j + 1, j))
    last = (n_st - 1) * k
    for j in range(1, k - 1):  # end cap, facing forwards
        faces.append((last, last + j, last + j + 1))
    return TriMesh(verts, np.array(faces, dtype=np.int32))


def polygon_prism(
    plan: Sequence[tuple[float, float]], z_lo: float, z_hi: float
) -> TriMesh:
    """Vertical prism over a CCW plan polygon (used for pads, posts, columns)."""
    if z_hi <= z_lo:
        raise MalformedInput("prism needs z_hi > z_lo")
    n = len(plan)
    verts = np.array(
        [[x, y, z_lo] for x, y in plan] + [[x, y, z_hi] for x, y in plan], dtype=float
    )
    faces = []
    for j in range(n):
        jn = (j + 1) % n
        faces.append((j, jn, n + jn))
        faces.append((j, n + jn, n + j))
    for j in range(1, n - 1):  # bottom cap faces down
        faces.append((0, j + 1, j))
    for j in range(1, n - 1):  # top cap faces up
        faces.append((n, n + j, n + j + 1))
    return TriMesh(verts, np.array(faces, dtype=np.int32))


def box_mesh(center: Sequence[float], dims: Sequence[float]) -> TriMesh:
    cx, cy, cz = center
    dx, dy, dz = (d / 2.0 for d in dims)
    plan = [(cx - dx, cy - dy), (cx + dx, cy - dy), (cx + dx, cy + dy), (cx - dx, cy + dy)]
    return polygon_prism(plan, cz - dz, cz + dz)


# ---------------------------------------------------------------------------
# Model assembly
# ---------------------------------------------------------------------------

@dataclass
class Solid:
    name: str  # "deck" | "railing" | "support"
    material: str
    mesh: TriMesh


@dataclass
class RampModel:
    solids: list[Solid]
    path_key: tuple
    deck_plan_area: float

    def combined(self) -> TriMesh:
        return TriMesh.merged(s.mesh for s in self.solids)

    def by_name(self, name: str) -> list[Solid]:
        return [s for s in self.solids if s.name == name]

    @property
    def n_vertices(self) -> int:
        return sum(s.mesh.n_vertices for s in self.solids)

    @property
    def n_faces(self) -> int:
        return sum(s.mesh.n_faces for s in self.solids)


def path_fingerprint(path: RampPath) -> tuple:
    return tuple(
        (round(s.x, 9), round(s.y, 9), round(s.z, 9)) for s in path.stations
    )


def _split_runs(
    points: list[tuple[float, float, float]], half_extent: float
) -> tuple[list[list[tuple[float, float, float]]], list[int]]:
    """Split the polyline at corners too sharp to mitre at this half-extent.

    half_extent is the largest lateral offset of any section swept along
    the path -- the railing's outer face, which sits beyond the deck edge.
    A corner is split out when its mitre elongation (half_extent *
    tan(turn/2)) would overrun the ring stub _densify leaves next to the
    joint, or when the turn reverses; those corners get flat turning pads
    instead of swept joints.
    """
    if len(points) < 3:
        return [list(points)], []
    sharp: list[int] = []
    for i in range(1, len(points) - 1):
        ax, ay, _ = points[i - 1]
        bx, by, _ = points[i]
        cx, cy, _ = points[i + 1]
        ux, uy = bx - ax, by - ay
        vx, vy = cx - bx, cy - by
        lu = math.hypot(ux, uy)
        lv = math.hypot(vx, vy)
        cosang = max(-1.0, min(1.0, (ux * vx + uy * vy) / (lu * lv)))
        turn = math.acos(cosang)
        if turn < 1e-9:
            continue
        if turn > math.radians(150.0):
            sharp.append(i)
            continue
        elongation = half_extent * math.tan(turn / 2.0)
        stub = min(_RING_SPACING, min(lu, lv) / 2.0)
        if elongation > _PAD_SPLIT_FACTOR * stub:
            sharp.append(i)
    runs: list[list[tuple[float, float, float]]] = []
    cur: list[tuple[float, float, float]] = [points[0]]
    for i in range(1, len(points)):
        cur.append(points[i])
        if i in sharp:
            runs.append(cur)
            cur = [points[i]]
    runs.append(cur)
    return [r for r in runs if len(r) >= 2], sharp


def _arc_samples(total: float, spacing: float) -> list[float]:
    if total <= 1e-9:
        return [0.0]
    n = max(1, int(math.ceil(total / spacing - 1e-9)))
    return [total * i / n for i in range(n + 1)]


def _frame_at(
    run: list[tuple[float, float, float]], arc: float
) -> tuple[tuple[float, float, float], tuple[float, float], tuple[float, float]]:
    """Point, unit direction and unit left-normal at an arc position."""
    acc = 0.0
    for a, b in zip(run, run[1:]):
        seg = math.hypot(b[0] - a[0], b[1] - a[1])
        if arc <= acc + seg + 1e-9:
            t = 0.0 if seg <= 1e-12 else max(0.0, min(1.0, (arc - acc) / seg))
            p = (
                a[0] + t * (b[0] - a[0]),
                a[1] + t * (b[1] - a[1]),
                a[2] + t * (b[2] - a[2]),
            )
            d = ((b[0] - a[0]) / seg, (b[1] - a[1]) / seg)
            return p, d, (-d[1], d[0])
        acc += seg
    a, b = run[-2], run[-1]
    seg = math.hypot(b[0] - a[0], b[1] - a[1])
    d = ((b[0] - a[0]) / seg, (b[1] - a[1]) / seg)
    return run[-1], d, (-d[1], d[0])


def _run_length(run: list[tuple[float, float, float]]) -> float:
    return sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(run, run[1:]))


def _densify(
    run: list[tuple[float, float, float]], max_spacing: float = _RING_SPACING
) -> list[tuple[float, float, float]]:
    """Insert intermediate sweep rings so mitre shear at corners stays
    confined to the rings adjacent to the joint.

    The ring next to each joint sits exactly min(max_spacing, seg/2) away;
    _split_runs pads out any corner whose mitre shear would overrun that
    stub, so the two bounds have to move together.
    """
    out = [run[0]]
    for a, b in zip(run, run[1:]):
        seg = math.hypot(b[0] - a[0], b[1] - a[1])
        ts: list[float] = []
        if seg <= max_spacing:
            pass
        elif seg <= 2.0 * max_spacing + 1e-9:
            ts.append(0.5)
        else:
            stub = max_spacing / seg
            mid = max(1, int(math.ceil((seg - 2.0 * max_spacing) / max_spacing - 1e-9)))
            ts.append(stub)
            for k in range(1, mid):
                ts.append(stub + (1.0 - 2.0 * stub) * k / mid)
            ts.append(1.0 - stub)
        for t in ts + [1.0]:
            out.append(
                (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]),
                 a[2] + t * (b[2] - a[2]))
            )
    return out


def _rail_sections(geom: GeomParams) -> list[list[tuple[float, float]]]:
    r = geom.railing
    if r.type == "single-square":
        return [square_section(0.0, r.height, r.thickness)]
    if r.type == "single-rounded":
        return [ngon_section(0.0, r.height, r.thickness / 2.0)]
    # double-rounded: main rail plus a lower one
    return [
        ngon_section(0.0, r.height, r.thickness / 2.0),
        ngon_section(0.0, max(r.thickness, r.height - 0.3), r.thickness / 2.0),
    ]


def assemble_model(path: RampPath, geom: GeomParams, *, ground_z: float = 0.0) -> RampModel:
    """Build all solids for a routed ramp: deck sweeps with turning pads
    at sharp corners, railings (rails + posts) along both sides of each
    run, and support columns down to the ground."""
    w = geom.deck_width
    t = geom.deck_thickness
    points = [(s.x, s.y, s.z) for s in path.stations]
    # rails sweep wider than the deck, so corner splitting keys off them
    runs, pad_indices = _split_runs(points, w / 2.0 + geom.railing.thickness)

    runs = [_densify(r) for r in runs]
    solids: list[Solid] = []
    for run in runs:
        solids.append(Solid("deck", geom.deck_material, sweep(run, deck_section(w, t), label="deck")))

    pad_radius = (w / math.sqrt(2.0)) / math.cos(math.pi / 16.0)
    for idx in pad_indices:
        x, y, z = points[idx]
        pad = polygon_prism(
            [(x + pad_radius * math.cos(2 * math.pi * k / 16 + math.pi / 16),
              y + pad_radius * math.sin(2 * math.pi * k / 16 + math.pi / 16))
             for k in range(16)],
            z - t,
            z,
        )
        solids.append(Solid("deck", geom.deck_material, pad))

    # side-mounted so the full deck width stays clear between rails
    rail = geom.railing
    u_rail = w / 2.0 + rail.thickness / 2.0
    for run in runs:
        for side in (1.0, -1.0):
            for sec in _rail_sections(geom):
                shifted = [(side * u_rail + u, v) for u, v in sec]
                solids.append(
                    Solid(
                        "railing",
                        geom.railing_material,
                        sweep(run, shifted, label="railing"),
                    )
                )
    for run in runs:
        run_len = _run_length(run)
        for arc in _arc_samples(run_len, rail.post_spacing):
            p, d, n = _frame_at(run, arc)
            h = rail.thickness / 2.0
            for side in (1.0, -1.0):
                cx = p[0] + n[0] * u_rail * side
                cy = p[1] + n[1] * u_rail * side
                plan = [
                    (cx - d[0] * h - n[0] * h, cy - d[1] * h - n[1] * h),
                    (cx + d[0] * h - n[0] * h, cy + d[1] * h - n[1] * h),
                    (cx + d[0] * h + n[0] * h, cy + d[1] * h + n[1] * h),
                    (cx - d[0] * h + n[0] * h, cy - d[1] * h + n[1] * h),
                ]
                solids.append(
                    Solid(
                        "railing",
                        geom.railing_material,
                        polygon_prism(plan, p[2] - t, p[2] + rail.height),
                    )
                )

    if geom.supports.enabled:
        sup = geom.supports
        h = sup.thickness / 2.0
        for arc in _arc_samples(path.length, sup.spacing):
            x, y = path.point_at(arc)
            z = path.z_at(arc)
            top = z - t
            if top - ground_z < 0.05:
                continue  # deck sits on the ground here
            _p, d, n = _frame_at(points, arc)
            plan = [
                (x - d[0] * h - n[0] * h, y - d[1] * h - n[1] * h),
                (x + d[0] * h - n[0] * h, y + d[1] * h - n[1] * h),
                (x + d[0] * h + n[0] * h, y + d[1] * h + n[1] * h),
                (x - d[0] * h + n[0] * h, y - d[1] * h + n[1] * h),
            ]
            solids.append(
                Solid("support", geom.support_material, polygon_prism(plan, ground_z, top))
            )

    return RampModel(
        solids=solids,
        path_key=path_fingerprint(path),
        deck_plan_area=w * path.length,
    )
