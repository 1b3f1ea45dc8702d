#!/usr/bin/env python3
"""Run the three benchmark environments end to end and print a summary.

  flat-040        open 12x6 m area, 0.40 m rise: one straight run, no
                  intermediate landings
  switchback-200  16x9 m area with two staggered walls, 2.0 m rise:
                  forces a switchback with two intermediate landings
  alley-030       1.4 m lane between banks, 0.30 m rise: tightest fit,
                  railings on both sides

Writes artifacts per trial under --out (default /tmp/ramp_trials) and
exits 0 only if every trial produces a fully compliant ramp.
"""

import argparse
import sys
import time
from pathlib import Path

from rampgen.export_io import export_model, write_report
from rampgen.params import RampParams
from rampgen.pipeline import generate

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

TRIALS = [
    ("flat-040", "trial1_flat_040.json"),
    ("switchback-200", "trial2_switchback_200.json"),
    ("alley-030", "trial3_alley_030.json"),
]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="/tmp/ramp_trials", help="artifact directory")
    args = ap.parse_args(argv)
    outdir = Path(args.out)

    print(f"{'trial':<16}{'score':<7}{'slope':<8}{'length':<9}"
          f"{'landings':<10}{'solids':<8}{'seconds':<8}")
    worst = 4
    for name, fname in TRIALS:
        t0 = time.perf_counter()
        res = generate((FIXTURES / fname).read_text(), RampParams())
        dt = time.perf_counter() - t0
        worst = min(worst, res.stage_score)

        trial_dir = outdir / name
        trial_dir.mkdir(parents=True, exist_ok=True)
        write_report(res.report, trial_dir / "report.json")
        if res.model is not None:
            export_model(trial_dir, res.model, res.path, geom=RampParams().geom)

        if res.path is not None:
            slope = f"1:{round(1 / res.path.slope)}"
            length = f"{res.path.length:.2f} m"
            landings = str(len(res.path.intermediate_landings()))
        else:
            slope = length = landings = "-"
        solids = str(len(res.model.solids)) if res.model else "-"
        print(f"{name:<16}{res.stage_score:<7}{slope:<8}{length:<9}"
              f"{landings:<10}{solids:<8}{dt:<8.2f}")
        if res.error:
            print(f"  ! {res.error}")

    print(f"artifacts under {outdir}")
    return 0 if worst == 4 else 1


if __name__ == "__main__":
    sys.exit(main())
