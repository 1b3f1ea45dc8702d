"""Mesh construction tests.

Volume oracle: the tests integrate z * n_z over the surface (divergence
of the field (0, 0, z)), which is an independent derivation from the
det-based formula inside TriMesh.signed_volume, and both are compared
against closed forms: box volume is a product, and a mitred sweep of a
level or straight path has volume = section_area * plan_length exactly
(the mitre gains and losses at a corner are congruent triangles).

Self-intersection oracle: brute-force proper-crossing test between all
non-adjacent triangle pairs.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rampgen.errors import MalformedInput, SelfIntersectingSweep
from rampgen.geometry import (
    RampModel,
    TriMesh,
    assemble_model,
    box_mesh,
    deck_section,
    ngon_section,
    path_fingerprint,
    polygon_prism,
    square_section,
    sweep,
    validate_mesh,
    z_hits,
    _split_runs,
)
from rampgen.params import GeomParams, RailingParams
from rampgen.pathfinder import assign_heights

W, T = 0.915, 0.15


def oracle_volume(mesh: TriMesh) -> float:
    """Surface integral of z over outward-facing projected area."""
    total = 0.0
    for tri in mesh.faces:
        a, b, c = (mesh.vertices[int(i)] for i in tri)
        az = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        total += az * (a[2] + b[2] + c[2]) / 3.0
    return total


def _seg_crosses_tri(p, q, tri, eps=1e-9):
    a, b, c = tri
    e1, e2 = b - a, c - a
    d = q - p
    n = np.cross(e1, e2)
    den = float(n @ d)
    if abs(den) < 1e-14:
        return False
    s = float(n @ (a - p)) / den
    if not (eps < s < 1 - eps):
        return False
    hit = p + s * d
    # barycentric, strictly interior
    m = np.array([[e1 @ e1, e1 @ e2], [e1 @ e2, e2 @ e2]])
    rhs = np.array([e1 @ (hit - a), e2 @ (hit - a)])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) < 1e-18:
        return False
    u = (rhs[0] * m[1, 1] - rhs[1] * m[0, 1]) / det
    v = (m[0, 0] * rhs[1] - m[0, 1] * rhs[0]) / det
    return u > eps and v > eps and u + v < 1 - eps


def proper_self_intersections(mesh: TriMesh) -> int:
    """Count non-adjacent triangle pairs where an edge of one pierces
    the interior of the other.  Touching or coplanar contact does not
    count; a folded sweep does."""
    tris = mesh.vertices[mesh.faces]
    count = 0
    for i in range(len(tris)):
        vi = set(int(x) for x in mesh.faces[i])
        for j in range(i + 1, len(tris)):
            if vi & set(int(x) for x in mesh.faces[j]):
                continue
            a, b = tris[i], tris[j]
            crossed = False
            for p, q in ((a[0], a[1]), (a[1], a[2]), (a[2], a[0])):
                if _seg_crosses_tri(p, q, b):
                    crossed = True
                    break
            if not crossed:
                for p, q in ((b[0], b[1]), (b[1], b[2]), (b[2], b[0])):
                    if _seg_crosses_tri(p, q, a):
                        crossed = True
                        break
            if crossed:
                count += 1
    return count


class TestPrimitives:
    def test_box_counts_and_volume(self):
        b = box_mesh((1.0, -2.0, 3.0), (2.0, 3.0, 4.0))
        assert b.n_vertices == 8
        assert b.n_faces == 12
        assert b.signed_volume() == pytest.approx(24.0, abs=1e-12)
        assert oracle_volume(b) == pytest.approx(24.0, abs=1e-12)
        assert validate_mesh(b) == []

    def test_prism_16gon(self):
        pts = [(math.cos(a), math.sin(a)) for a in np.linspace(0, 2 * math.pi, 16, endpoint=False)]
        pr = polygon_prism(pts, -1.0, 2.5)
        assert pr.n_vertices == 32
        assert pr.n_faces == 2 * 16 + 2 * 14
        # shoelace area of the plan polygon times height
        area = 0.5 * sum(
            pts[i][0] * pts[(i + 1) % 16][1] - pts[(i + 1) % 16][0] * pts[i][1]
            for i in range(16)
        )
        assert pr.signed_volume() == pytest.approx(area * 3.5, abs=1e-12)
        assert validate_mesh(pr) == []

    def test_prism_rejects_inverted_heights(self):
        with pytest.raises(MalformedInput):
            polygon_prism([(0, 0), (1, 0), (0, 1)], 1.0, 1.0)

    def test_sections_are_ccw(self):
        for sec in (deck_section(W, T), square_section(0.2, 0.9, 0.05),
                    ngon_section(0.0, 0.9, 0.025)):
            area = 0.5 * sum(
                sec[i][0] * sec[(i + 1) % len(sec)][1]
                - sec[(i + 1) % len(sec)][0] * sec[i][1]
                for i in range(len(sec))
            )
            assert area > 0

    def test_merged_offsets_indices(self):
        a = box_mesh((0, 0, 0), (1, 1, 1))
        b = box_mesh((5, 0, 0), (1, 1, 1))
        m = TriMesh.merged([a, b])
        assert m.n_vertices == 16
        assert m.n_faces == 24
        assert m.signed_volume() == pytest.approx(2.0, abs=1e-12)

    def test_translated(self):
        b = box_mesh((0, 0, 0), (1, 1, 1)).translated((10, 0, -2))
        lo, hi = b.bounds()
        assert np.allclose(lo, [9.5, -0.5, -2.5])
        assert np.allclose(hi, [10.5, 0.5, -1.5])


class TestSweep:
    def test_straight_counts(self):
        m = sweep([(0, 0, 0), (5, 0, 0)], deck_section(W, T))
        assert m.n_vertices == 8
        assert m.n_faces == 12

    def test_station_count_formula(self):
        pts = [(float(i), 0.02 * i * i, 0.0) for i in range(6)]
        m = sweep(pts, deck_section(W, T))
        assert m.n_vertices == 4 * 6
        assert m.n_faces == 8 * 5 + 4

    def test_level_miter_volume_exact(self):
        # gained and lost mitre triangles at a level corner cancel
        m = sweep([(0, 0, 0), (4, 0, 0), (4, 3, 0)], deck_section(W, T))
        assert validate_mesh(m) == []
        assert m.signed_volume() == pytest.approx(W * T * 7.0, abs=1e-12)
        assert oracle_volume(m) == pytest.approx(W * T * 7.0, abs=1e-12)

    def test_sloped_straight_volume_exact(self):
        # a shear along the run preserves volume
        m = sweep([(0, 0, 0), (6, 0, 0.5)], deck_section(W, T))
        assert m.signed_volume() == pytest.approx(W * T * 6.0, abs=1e-12)
        assert oracle_volume(m) == pytest.approx(W * T * 6.0, abs=1e-12)

    def test_multi_corner_level_volume(self):
        pts = [(0, 0, 0), (3, 0, 0), (3, 2, 0), (6, 2, 0), (6, 0, 0)]
        plan_len = 3 + 2 + 3 + 2
        m = sweep(pts, deck_section(W, T))
        assert m.signed_volume() == pytest.approx(W * T * plan_len, abs=1e-12)
        assert proper_self_intersections(m) == 0

    def test_no_self_intersections_on_gentle_path(self):
        pts = [(0, 0, 0), (2, 0.3, 0.1), (4, 0.1, 0.2), (6, 0.6, 0.3)]
        m = sweep(pts, deck_section(W, T))
        assert validate_mesh(m) == []
        assert proper_self_intersections(m) == 0

    def test_fold_over_raises_with_station(self):
        with pytest.raises(SelfIntersectingSweep) as exc:
            sweep([(0, 0, 0), (0.2, 0, 0), (0.4, 0.05, 0), (0.2, 0.1, 0)],
                  deck_section(W, T))
        assert exc.value.station_index is not None

    def test_reversal_raises(self):
        with pytest.raises(SelfIntersectingSweep):
            sweep([(0, 0, 0), (3, 0, 0), (0, 1e-13, 0)], deck_section(W, T))

    def test_too_few_stations(self):
        with pytest.raises(MalformedInput):
            sweep([(0, 0, 0)], deck_section(W, T))

    def test_zero_length_plan_segment(self):
        with pytest.raises(SelfIntersectingSweep):
            sweep([(0, 0, 0), (0, 0, 1.0)], deck_section(W, T))

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_gentle_random_sweeps_are_closed(self, data):
        n = data.draw(st.integers(min_value=2, max_value=6))
        xs = np.cumsum([1.0 + data.draw(st.floats(0, 1)) for _ in range(n)])
        ys = [data.draw(st.floats(-0.25, 0.25)) for _ in range(n)]
        zs = np.cumsum([data.draw(st.floats(0, 0.1)) for _ in range(n)])
        pts = list(zip(xs.tolist(), ys, zs.tolist()))
        m = sweep(pts, deck_section(W, T))
        assert validate_mesh(m) == []
        vol = m.signed_volume()
        plan = sum(
            math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(pts, pts[1:])
        )
        assert vol == pytest.approx(oracle_volume(m), abs=1e-9)
        assert abs(vol - W * T * plan) / (W * T * plan) < 0.05


class TestValidateMesh:
    def test_flags_open_mesh(self):
        b = box_mesh((0, 0, 0), (1, 1, 1))
        open_mesh = TriMesh(b.vertices, b.faces[:-1])
        assert any("partner" in msg for msg in validate_mesh(open_mesh))

    def test_flags_flipped_face(self):
        b = box_mesh((0, 0, 0), (1, 1, 1))
        faces = b.faces.copy()
        faces[0] = faces[0][::-1]
        assert validate_mesh(TriMesh(b.vertices, faces)) != []

    def test_flags_degenerate_triangle(self):
        verts = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
        m = TriMesh(verts, np.array([[0, 1, 2]]))
        assert any("degenerate" in msg for msg in validate_mesh(m))

    def test_flags_empty(self):
        m = TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int32))
        assert validate_mesh(m) == ["empty mesh"]

    def test_oracle_detects_overlapping_boxes(self):
        # sanity check the intersection oracle itself on a known-bad soup
        a = box_mesh((0, 0, 0), (2, 2, 2))
        b = box_mesh((0.7, 0.6, 0.5), (2, 2, 2))
        assert proper_self_intersections(TriMesh.merged([a, b])) > 0


class TestZHits:
    def test_probe_through_deck(self):
        m = sweep([(0, 0, 0.5), (5, 0, 0.5)], deck_section(W, T))
        assert z_hits(m, 2.5, 0.1) == pytest.approx([0.35, 0.5], abs=1e-12)

    def test_probe_misses(self):
        m = sweep([(0, 0, 0.5), (5, 0, 0.5)], deck_section(W, T))
        assert z_hits(m, 2.5, 5.0) == []
        assert z_hits(m, -1.0, 0.0) == []


class TestRunSplitting:
    # widest swept offset: rail outer face at deck edge + rail thickness
    EXTENT = W / 2 + 0.05

    def test_long_flanks_sweep_through(self):
        pts = [(0, 0, 0), (4, 0, 0), (4, 4, 0)]
        runs, pads = _split_runs(pts, self.EXTENT)
        assert pads == []
        assert len(runs) == 1

    def test_short_flanks_get_pad(self):
        pts = [(0, 0, 0), (1, 0, 0), (1, 1, 0)]
        runs, pads = _split_runs(pts, self.EXTENT)
        assert pads == [1]
        assert len(runs) == 2
        assert runs[0][-1] == pts[1] and runs[1][0] == pts[1]

    def test_reversal_always_padded(self):
        pts = [(0, 0, 0), (6, 0, 0), (0, 0.9, 0)]
        runs, pads = _split_runs(pts, self.EXTENT)
        assert pads == [1]

    def test_collinear_not_split(self):
        pts = [(0, 0, 0), (2, 0, 0.1), (4, 0, 0.2), (9, 0, 0.2)]
        runs, pads = _split_runs(pts, self.EXTENT)
        assert pads == [] and len(runs) == 1


def straight_path(length=14.0, rise=0.4):
    return assign_heights(
        [(0.0, 0.0), (length, 0.0)], rise, 1 / 12,
        max_rise_per_run=0.76, landing_length=1.525,
    )


class TestAssembleModel:
    def test_solid_census_straight(self):
        # 14 m straight run: one deck sweep, 2 rails, posts every
        # <=1.5 m on both sides (ceil(14/1.5)+1 = 11 stations), support
        # columns every 2 m where the deck is high enough off the ground
        # (z - 0.15 >= 0.05 only holds from arc 8 onward: 4 columns).
        model = assemble_model(straight_path(), GeomParams())
        assert len(model.by_name("deck")) == 1
        assert len(model.by_name("railing")) == 2 + 2 * 11
        assert len(model.by_name("support")) == 4

    def test_all_solids_closed(self):
        model = assemble_model(straight_path(), GeomParams())
        for s in model.solids:
            assert validate_mesh(s.mesh) == [], s.name
            assert s.mesh.signed_volume() > 0

    def test_sharp_corner_pads_protect_rail_sweep(self):
        # ~110 deg turn with long flanks: the deck alone could mitre it,
        # but the rails sweep wider and would fold over -> pad instead.
        a = math.radians(110.0)
        pts = [(0.0, 0.0), (6.0, 0.0), (6.0 + 5 * math.cos(a), 5 * math.sin(a))]
        path = assign_heights(pts, 0.0, 1 / 12,
                              max_rise_per_run=0.76, landing_length=1.525)
        model = assemble_model(path, GeomParams())
        assert len(model.by_name("deck")) == 3  # two run sweeps + one pad
        for s in model.solids:
            assert validate_mesh(s.mesh) == [], s.name

    def test_materials_tagged(self):
        model = assemble_model(straight_path(), GeomParams())
        mats = {s.name: s.material for s in model.solids}
        assert mats["deck"] == "concrete"
        assert mats["railing"] == "steel"
        assert mats["support"] == "steel"

    def test_deck_volume_exact_on_straight_run(self):
        model = assemble_model(straight_path(), GeomParams())
        vol = sum(s.mesh.signed_volume() for s in model.by_name("deck"))
        assert vol == pytest.approx(W * T * 14.0, abs=1e-9)

    def test_rail_height_probe(self):
        model = assemble_model(straight_path(), GeomParams())
        path = straight_path()
        x = 6.9  # mid-climb, away from post stations
        z = path.z_at(x)
        u = W / 2 + 0.05 / 2  # rails sit outside the deck edge
        hits = z_hits(model.combined(), x, u)
        # square rail centred at deck + 0.9, side 0.05
        assert hits[0] == pytest.approx(z + 0.9 - 0.025, abs=1e-9)
        assert hits[-1] == pytest.approx(z + 0.9 + 0.025, abs=1e-9)

    def test_deck_edge_unobstructed(self):
        # nothing may stand on the deck inside its full width
        model = assemble_model(straight_path(), GeomParams())
        path = straight_path()
        z = path.z_at(6.9)
        for u in (W / 2 - 1e-3, -W / 2 + 1e-3):
            hits = z_hits(model.combined(), 6.9, u)
            assert hits == pytest.approx([z - T, z], abs=1e-9)

    def test_supports_reach_ground(self):
        model = assemble_model(straight_path(), GeomParams(), ground_z=0.0)
        for s in model.by_name("support"):
            lo, hi = s.mesh.bounds()
            assert lo[2] == pytest.approx(0.0, abs=1e-12)
            assert hi[2] > 0.04

    def test_supports_disabled(self):
        from rampgen.params import SupportParams
        geom = GeomParams(supports=SupportParams(enabled=False))
        model = assemble_model(straight_path(), geom)
        assert model.by_name("support") == []

    def test_double_rounded_railing(self):
        geom = GeomParams(railing=RailingParams(type="double-rounded"))
        model = assemble_model(straight_path(), geom)
        # two rails per side on the single run; posts are 8-vertex boxes
        rails = [s for s in model.by_name("railing") if s.mesh.n_vertices > 8]
        assert len(rails) == 4
        assert all(s.mesh.n_vertices % 16 == 0 for s in rails)

    def test_pad_covers_sharp_corner(self):
        path = assign_heights(
            [(0.0, 0.0), (9.0, 0.0), (9.0, 1.2), (0.0, 1.2)], 0.0, 1 / 12,
            max_rise_per_run=0.76, landing_length=1.525,
        )
        model = assemble_model(path, GeomParams())
        decks = model.by_name("deck")
        assert len(decks) == 5  # three sweeps + two corner pads
        deck_mesh = TriMesh.merged(s.mesh for s in decks)
        for arc in np.linspace(0.0, path.length, 60):
            x, y = path.point_at(float(arc))
            hits = z_hits(deck_mesh, x, y)
            assert hits, f"no deck under arc {arc}"
            assert max(hits) == pytest.approx(path.z_at(float(arc)), abs=1e-9)

    def test_fingerprint_matches_and_discriminates(self):
        p1, p2 = straight_path(), straight_path()
        assert path_fingerprint(p1) == path_fingerprint(p2)
        p3 = straight_path(rise=0.41)
        assert path_fingerprint(p1) != path_fingerprint(p3)
        model = assemble_model(p1, GeomParams())
        assert model.path_key == path_fingerprint(p2)

    def test_deck_plan_area_reported(self):
        model = assemble_model(straight_path(), GeomParams())
        assert model.deck_plan_area == pytest.approx(W * 14.0, abs=1e-9)
