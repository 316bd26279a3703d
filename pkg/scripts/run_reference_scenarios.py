#!/usr/bin/env python3
"""Run both shipped scenarios end to end and render their plots.

Produces out/sim_vhc and out/sim_orbit with impulses.csv, trajectory.csv,
summary.json, and SVG figures, then prints the linearization report for the
stabilized scenario.
"""

from __future__ import annotations

import sys
from pathlib import Path

from devilstick.cli import main

ROOT = Path(__file__).resolve().parents[1]


def run() -> int:
    out = ROOT / "out"
    code = main([
        "simulate",
        "--scenario", str(ROOT / "scenarios" / "sim_vhc.cfg"),
        "--scenario", str(ROOT / "scenarios" / "sim_orbit.cfg"),
        "--out", str(out),
    ])
    if code != 0:
        return code
    for name in ("sim_vhc", "sim_orbit"):
        code = max(code, main([
            "plot",
            "--impulses", str(out / name / "impulses.csv"),
            "--trajectory", str(out / name / "trajectory.csv"),
            "--out", str(out / name),
        ]))
    code = max(code, main([
        "linearize",
        "--scenario", str(ROOT / "scenarios" / "sim_orbit.cfg"),
        "--out", str(out / "sim_orbit"),
    ]))
    return code


if __name__ == "__main__":
    sys.exit(run())
