"""Independent re-measurement of a ramp path.

Deliberately ignores the labels the search attached to the path
(segment kinds, landing list, reported slope) and re-derives everything
from station coordinates alone, so construction bugs cannot hide behind
their own bookkeeping.  Used by the compliance checker, the test suite,
and the batch harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pathfinder import RampPath

_TOL = 1e-9


@dataclass(frozen=True)
class Stretch:
    """A maximal run of same-behaviour segments: level or climbing."""

    arc_start: float
    arc_end: float
    z_start: float
    z_end: float
    level: bool

    @property
    def length(self) -> float:
        return self.arc_end - self.arc_start

    @property
    def rise(self) -> float:
        return self.z_end - self.z_start


def split_stretches(path: RampPath, tol: float = _TOL) -> list[Stretch]:
    """Partition the path into alternating level/climbing stretches,
    classifying each segment purely by its measured dz."""
    sts = path.stations
    out: list[Stretch] = []
    for a, b in zip(sts, sts[1:]):
        seg_level = abs(b.z - a.z) <= tol
        if out and out[-1].level == seg_level:
            prev = out[-1]
            out[-1] = Stretch(prev.arc_start, b.arc, prev.z_start, b.z, seg_level)
        else:
            out.append(Stretch(a.arc, b.arc, a.z, b.z, seg_level))
    return out


def check_stations(
    path: RampPath,
    *,
    max_slope: float,
    min_landing: float,
    max_rise_per_run: float,
    tol: float = _TOL,
) -> list[str]:
    """Walk the stations and return every invariant violation found.

    Checks: arcs strictly increase and match the plan coordinates; z
    never decreases; no climbing segment exceeds ``max_slope``; every
    level stretch is at least ``min_landing`` long; no climbing stretch
    rises more than ``max_rise_per_run``; the path starts and ends level.
    """
    sts = path.stations
    bad: list[str] = []
    if len(sts) < 2:
        return ["path has fewer than two stations"]

    arc = 0.0
    for idx, (a, b) in enumerate(zip(sts, sts[1:])):
        plan = math.hypot(b.x - a.x, b.y - a.y)
        arc += plan
        if b.arc - a.arc <= tol:
            bad.append(f"station {idx + 1} does not advance the arc")
        if abs((b.arc - a.arc) - plan) > 1e-6:
            bad.append(
                f"arc bookkeeping off at station {idx + 1}: "
                f"recorded {b.arc - a.arc:.6f}, measured {plan:.6f}"
            )
        dz = b.z - a.z
        if dz < -tol:
            bad.append(f"z decreases by {-dz:.6f} m at station {idx + 1}")
        if dz > tol and plan > 0:
            grade = dz / plan
            if grade > max_slope + tol:
                bad.append(
                    f"grade {grade:.5f} exceeds {max_slope:.5f} "
                    f"between arc {a.arc:.2f} and {b.arc:.2f}"
                )

    stretches = split_stretches(path, tol)
    for st in stretches:
        if st.level:
            if st.length < min_landing - 1e-6:
                bad.append(
                    f"level stretch at arc {st.arc_start:.2f} is {st.length:.3f} m, "
                    f"under the {min_landing} m landing minimum"
                )
        else:
            if st.rise > max_rise_per_run + tol:
                bad.append(
                    f"climb starting at arc {st.arc_start:.2f} rises {st.rise:.3f} m, "
                    f"over the {max_rise_per_run} m limit"
                )
    if stretches and not stretches[0].level:
        bad.append("path does not begin with a level landing")
    if stretches and not stretches[-1].level:
        bad.append("path does not end with a level landing")
    return bad


def landing_intervals(path: RampPath, min_landing: float, tol: float = _TOL) -> list[Stretch]:
    """Level stretches long enough to count as landings."""
    return [
        st
        for st in split_stretches(path, tol)
        if st.level and st.length >= min_landing - 1e-6
    ]
