"""Height assignment along a planar route.

The arithmetic here is simple enough to check by hand, so expected
values are computed in the tests from first principles (run length =
rise / grade, landing bookkeeping) rather than copied from the
implementation.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rampgen.errors import InsufficientRun, InvalidManualLandings, MalformedInput
from rampgen.pathfinder import assign_heights
from rampgen.validation import check_stations, split_stretches

RMAX = 0.76
LLAND = 1.525
SLOPE = 1 / 12


def straight(length):
    return [(0.0, 0.0), (length, 0.0)]


class TestAutomatic:
    def test_single_run_with_extended_terminals(self):
        # rise 0.4 at 1:12 needs 4.8 m of ramp + two landings = 7.85 m;
        # on a 10 m route the 2.15 m of slack splits between the ends
        path = assign_heights(
            straight(10.0), 0.4, SLOPE, max_rise_per_run=RMAX, landing_length=LLAND
        )
        assert path.length == pytest.approx(10.0)
        assert path.rise == pytest.approx(0.4, abs=1e-12)
        assert path.intermediate_landings() == ()
        assert len(path.landings) == 2
        (a0, a1), (b0, b1) = path.landings
        assert a0 == pytest.approx(0.0)
        assert a1 == pytest.approx(LLAND + 2.15 / 2)
        assert b1 - b0 == pytest.approx(LLAND + 2.15 / 2)
        assert b1 == pytest.approx(10.0)
        assert path.slope == pytest.approx(SLOPE, abs=1e-12)
        assert not check_stations(
            path, max_slope=SLOPE, min_landing=LLAND, max_rise_per_run=RMAX
        )

    def test_two_metre_rise_needs_two_intermediate_landings(self):
        # ceil(2.0 / 0.76) = 3 runs -> 2 intermediate landings
        path = assign_heights(
            straight(32.0), 2.0, SLOPE, max_rise_per_run=RMAX, landing_length=LLAND
        )
        mids = path.intermediate_landings()
        assert len(mids) == 2
        for a0, a1 in mids:
            assert a1 - a0 == pytest.approx(LLAND)
        stretches = [s for s in split_stretches(path) if not s.level]
        assert len(stretches) == 3
        for s in stretches:
            assert s.rise == pytest.approx(2.0 / 3)
            assert s.rise <= RMAX
        assert not check_stations(
            path, max_slope=SLOPE, min_landing=LLAND, max_rise_per_run=RMAX
        )

    def test_exact_fit_no_slack(self):
        required = 0.76 / SLOPE + 2 * LLAND
        path = assign_heights(
            straight(required), 0.76, SLOPE, max_rise_per_run=RMAX, landing_length=LLAND
        )
        for a0, a1 in path.landings:
            assert a1 - a0 == pytest.approx(LLAND)

    def test_insufficient_run_reports_exact_shortfall(self):
        # 2.0 m rise needs 24 m of ramp + 4 landings = 30.1 m
        with pytest.raises(InsufficientRun) as exc:
            assign_heights(
                straight(10.0), 2.0, SLOPE, max_rise_per_run=RMAX, landing_length=LLAND
            )
        assert exc.value.shortfall == pytest.approx(30.1 - 10.0, abs=1e-9)

    def test_zero_rise_is_all_landing(self):
        path = assign_heights(
            straight(5.0), 0.0, SLOPE, max_rise_per_run=RMAX, landing_length=LLAND
        )
        assert path.landings == ((0.0, 5.0),)
        assert path.rise == 0.0

    def test_zero_rise_still_needs_terminal_length(self):
        with pytest.raises(InsufficientRun):
            assign_heights(
                straight(2.0), 0.0, SLOPE, max_rise_per_run=RMAX, landing_length=LLAND
            )

    def test_bent_polyline_keeps_plan_shape(self):
        poly = [(0.0, 0.0), (6.0, 0.0), (6.0, 6.0)]
        path = assign_heights(
            poly, 0.3, SLOPE, max_rise_per_run=RMAX, landing_length=LLAND
        )
        assert path.length == pytest.approx(12.0)
        xs = {round(st.x, 6) for st in path.stations}
        assert 6.0 in xs  # the corner survives
        assert not check_stations(
            path, max_slope=SLOPE, min_landing=LLAND, max_rise_per_run=RMAX
        )

    def test_rejects_negative_rise(self):
        with pytest.raises(MalformedInput):
            assign_heights(straight(10.0), -0.5, SLOPE,
                           max_rise_per_run=RMAX, landing_length=LLAND)

    def test_start_z_offsets_profile(self):
        path = assign_heights(
            straight(10.0), 0.4, SLOPE,
            max_rise_per_run=RMAX, landing_length=LLAND, start_z=2.5,
        )
        assert path.stations[0].z == pytest.approx(2.5)
        assert path.stations[-1].z == pytest.approx(2.9)


class TestManual:
    def test_landings_at_given_stations(self):
        # rise large enough that climbing resumes after the mid landing,
        # so the landing shows up as its own level stretch
        path = assign_heights(
            straight(12.0), 0.5, SLOPE,
            max_rise_per_run=RMAX, landing_length=LLAND,
            mode="manual", manual_landings=(0.0, 6.0),
        )
        starts = [round(a, 3) for a, _ in path.landings]
        assert 0.0 in starts and 6.0 in starts
        assert path.rise == pytest.approx(0.5)
        # climbing happens at exactly the commanded grade
        for s in split_stretches(path):
            if not s.level:
                assert s.rise / s.length == pytest.approx(SLOPE)

    def test_level_tail_after_rise_achieved(self):
        path = assign_heights(
            straight(20.0), 0.2, SLOPE,
            max_rise_per_run=RMAX, landing_length=LLAND,
            mode="manual", manual_landings=(0.0,),
        )
        assert path.stations[-1].z == pytest.approx(0.2)
        tail = split_stretches(path)[-1]
        assert tail.level

    def test_out_of_order_rejected(self):
        with pytest.raises(InvalidManualLandings):
            assign_heights(
                straight(20.0), 0.3, SLOPE,
                max_rise_per_run=RMAX, landing_length=LLAND,
                mode="manual", manual_landings=(8.0, 2.0),
            )

    def test_overlapping_rejected(self):
        with pytest.raises(InvalidManualLandings):
            assign_heights(
                straight(20.0), 0.3, SLOPE,
                max_rise_per_run=RMAX, landing_length=LLAND,
                mode="manual", manual_landings=(2.0, 3.0),
            )

    def test_off_path_rejected(self):
        with pytest.raises(InvalidManualLandings):
            assign_heights(
                straight(10.0), 0.3, SLOPE,
                max_rise_per_run=RMAX, landing_length=LLAND,
                mode="manual", manual_landings=(9.5,),
            )

    def test_stretch_over_rise_limit_rejected(self):
        # 12 m between landings at 1:12 would climb 1.0 m > 0.76 m
        with pytest.raises(InvalidManualLandings):
            assign_heights(
                straight(30.0), 1.5, SLOPE,
                max_rise_per_run=RMAX, landing_length=LLAND,
                mode="manual", manual_landings=(0.0, 14.0),
            )

    def test_unreachable_rise_rejected(self):
        with pytest.raises(InsufficientRun):
            assign_heights(
                straight(5.0), 0.5, SLOPE,
                max_rise_per_run=RMAX, landing_length=LLAND,
                mode="manual", manual_landings=(0.0, 1.6, 3.2),
            )


class TestProperties:
    @settings(deadline=None, max_examples=80)
    @given(
        st.floats(8.0, 60.0),
        st.floats(0.0, 2.5),
        st.floats(0.03, 1 / 12),
    )
    def test_feasible_profiles_pass_the_validator(self, length, rise, slope):
        try:
            path = assign_heights(
                straight(length), rise, slope,
                max_rise_per_run=RMAX, landing_length=LLAND,
            )
        except InsufficientRun as exc:
            # shortfall must agree with the closed-form requirement
            runs = max(1, math.ceil(rise / RMAX - 1e-9))
            required = (rise / slope if rise > 0 else 0.0) + (runs + 1) * LLAND
            assert exc.shortfall == pytest.approx(required - length, abs=1e-6)
            return
        assert not check_stations(
            path, max_slope=slope, min_landing=LLAND, max_rise_per_run=RMAX
        )
        assert path.rise == pytest.approx(rise, abs=1e-9)
        assert path.length == pytest.approx(length, abs=1e-9)

    @settings(deadline=None, max_examples=40)
    @given(st.floats(0.05, 2.49), st.integers(0, 10))
    def test_landing_count_formula(self, rise, extra):
        # generous length so the profile always fits
        length = rise * 12 + 4 * LLAND + extra + rise * 40
        path = assign_heights(
            straight(length), rise, SLOPE,
            max_rise_per_run=RMAX, landing_length=LLAND,
        )
        expected = max(0, math.ceil(rise / RMAX - 1e-9) - 1)
        assert len(path.intermediate_landings()) == expected


def _stretch_containing(path, arc):
    for s in split_stretches(path):
        if s.arc_start - 1e-9 <= arc <= s.arc_end + 1e-9:
            return s
    raise AssertionError(f"no stretch contains arc {arc}")


class TestCornersAreLevel:
    """Direction changes must happen on landings: the profile reserves a
    level window centred on every plan corner."""

    def test_corner_sits_inside_a_landing(self):
        path = assign_heights(
            [(0.0, 0.0), (8.0, 0.0), (8.0, 8.0)], 0.5, SLOPE,
            max_rise_per_run=RMAX, landing_length=LLAND,
        )
        s = _stretch_containing(path, 8.0)
        assert s.level
        assert s.length >= LLAND - 1e-9
        assert 8.0 - s.arc_start >= LLAND / 2 - 1e-9
        assert s.arc_end - 8.0 >= LLAND / 2 - 1e-9
        assert not check_stations(
            path, max_slope=SLOPE, min_landing=LLAND, max_rise_per_run=RMAX
        )

    def test_switchback_turns_on_landings(self):
        path = assign_heights(
            [(0.0, 0.0), (10.0, 0.0), (10.0, 2.0), (0.0, 2.0)], 0.5, SLOPE,
            max_rise_per_run=RMAX, landing_length=LLAND,
        )
        assert path.rise == pytest.approx(0.5, abs=1e-12)
        for corner_arc in (10.0, 12.0):
            assert _stretch_containing(path, corner_arc).level
        assert not check_stations(
            path, max_slope=SLOPE, min_landing=LLAND, max_rise_per_run=RMAX
        )

    def test_close_corners_share_one_landing(self):
        # an s-jog whose two corners are nearer than a landing length
        poly = [(0.0, 0.0), (6.0, 0.0), (6.6, 0.6), (12.6, 0.6)]
        path = assign_heights(
            poly, 0.3, SLOPE, max_rise_per_run=RMAX, landing_length=LLAND
        )
        arc_a = 6.0
        arc_b = 6.0 + math.hypot(0.6, 0.6)
        sa = _stretch_containing(path, arc_a)
        sb = _stretch_containing(path, arc_b)
        assert sa.level and (sa.arc_start, sa.arc_end) == (sb.arc_start, sb.arc_end)

    def test_greedy_fill_front_first(self):
        path = assign_heights(
            [(0.0, 0.0), (20.0, 0.0), (20.0, 20.0)], 0.5, SLOPE,
            max_rise_per_run=RMAX, landing_length=LLAND,
        )
        # the whole rise fits before the corner; the far leg stays level
        assert path.z_at(20.0) == pytest.approx(0.5, abs=1e-12)
        assert path.z_at(40.0) == pytest.approx(0.5, abs=1e-12)

    def test_corner_windows_can_exhaust_the_route(self):
        with pytest.raises(InsufficientRun) as exc:
            assign_heights(
                [(0.0, 0.0), (3.0, 0.0), (3.0, 3.0)], 0.3, SLOPE,
                max_rise_per_run=RMAX, landing_length=LLAND,
            )
        assert exc.value.shortfall > 0

    @settings(deadline=None, max_examples=50)
    @given(st.data())
    def test_zigzag_profiles_stay_valid(self, data):
        n = data.draw(st.integers(2, 5))
        pts = [(0.0, 0.0)]
        x, y = 0.0, 0.0
        for i in range(n):
            step = data.draw(st.floats(2.0, 8.0))
            if i % 2 == 0:
                x += step
            else:
                y += step
            pts.append((x, y))
        rise = data.draw(st.floats(0.0, 0.6))
        try:
            path = assign_heights(
                pts, rise, SLOPE, max_rise_per_run=RMAX, landing_length=LLAND
            )
        except InsufficientRun:
            return
        assert not check_stations(
            path, max_slope=SLOPE, min_landing=LLAND, max_rise_per_run=RMAX
        )
        assert path.rise == pytest.approx(rise, abs=1e-9)
        for i in range(1, len(pts) - 1):
            arc = sum(
                math.hypot(pts[k + 1][0] - pts[k][0], pts[k + 1][1] - pts[k][1])
                for k in range(i)
            )
            assert _stretch_containing(path, arc).level
