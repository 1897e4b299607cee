#!/usr/bin/env python3
"""Smoke test for the fuzzyqm_py extension module.

Build the module first:

    cargo build -p fuzzyqm-py --release   # or without --release

then run this script from anywhere inside the repository:

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path


def load_module():
    repo = Path(__file__).resolve().parent.parent
    candidates = [
        repo / "target" / "release" / "libfuzzyqm_py.so",
        repo / "target" / "debug" / "libfuzzyqm_py.so",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("build the extension first: cargo build -p fuzzyqm-py")
    # Import the shared library under its module name.
    stage = Path(tempfile.mkdtemp(prefix="fuzzyqm-py-"))
    shutil.copy(built[0], stage / "fuzzyqm_py.so")
    sys.path.insert(0, str(stage))
    import fuzzyqm_py

    return fuzzyqm_py


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    m = load_module()

    # Grid construction and node layout.
    grid = m.Grid(0.0, 2.0 * math.pi, 4097)
    approx(grid.dx, 2.0 * math.pi / 4096, 1e-15)
    assert len(grid.nodes()) == 4097
    try:
        m.Grid(0.0, 1.0, 2)
        raise AssertionError("expected Grid(0, 1, 2) to fail")
    except ValueError:
        pass

    # Dispersion relation plug-in.
    approx(m.dispersion_omega(2.0, 1.0, 1.0), 2.0, 1e-15)

    # Plane wave has unit modulus everywhere.
    wave = m.WaveFunction.plane_wave(grid, 2.0, 1.0, 1.0, 0.0)
    re, im = wave.values()[17]
    approx(math.hypot(re, im), 1.0, 1e-12)

    # The unwrapped phase action recovers p = hbar k.
    action = wave.real_action(1.0)
    slope = (action[100] - action[0]) / (100 * grid.dx)
    approx(slope, 2.0, 1e-9)

    # Norm conservation under Crank-Nicolson evolution.
    box = m.Grid(-20.0, 20.0, 1201)
    packet = m.WaveFunction.gaussian(box, -2.0, 1.0, 1.5)
    evolved = packet.evolve(m.Potential.zero(), 1.0, 1.0, 1e-3, 400)
    approx(evolved.norm(), 1.0, 1e-9)
    approx(evolved.t, 0.4, 1e-12)

    # Density: normalization, symmetric halves, defuzzified center.
    mu = packet.density(True)
    approx(mu.degree(box.x_min, box.x_max), 1.0, 1e-9)
    approx(mu.degree(box.x_min, -2.0), 0.5, 1e-6)
    center = mu.defuzzify(box.nodes())
    approx(center, -2.0, 1e-9)
    approx(mu.relative(-2.0, -3.0), math.exp(0.5), 1e-3)

    # Harmonic evolution stays normalized too.
    well = m.Potential.harmonic(0.05, 0.0)
    assert abs(well.at(2.0, 0.0) - 0.1) < 1e-15
    evolved_well = packet.evolve(well, 1.0, 1.0, 1e-3, 200)
    approx(evolved_well.norm(), 1.0, 1e-9)

    # Slit density drifts at v0 = center / t_flight and stays normalized.
    sgrid = m.Grid(-8.0, 10.0, 3001)
    mu_slit = m.slit_density(sgrid, 1.0, 0.5, 1.0, 1.0, 1.0, 0.3)
    approx(mu_slit.degree(sgrid.x_min, sgrid.x_max), 1.0, 1e-8)
    approx(mu_slit.defuzzify(sgrid.nodes()), 1.3, 1e-6)

    # Seeded sampling is deterministic and tracks the bin weights.
    counts_a = mu_slit.sample(10, 20000, 9)
    counts_b = mu_slit.sample(10, 20000, 9)
    assert counts_a == counts_b
    assert sum(counts_a) == 20000
    top_bin = max(range(10), key=lambda i: counts_a[i])
    expected_top = max(
        range(10), key=lambda i: mu_slit.degree(sgrid.x_min + 1.8 * i, sgrid.x_min + 1.8 * (i + 1))
    )
    assert top_bin == expected_top

    # Subsethood of detection counts.
    approx(m.subsethood(10, 5), 0.5, 1e-15)

    # Simplex coordinates of a packet in the box eigenbasis.
    bgrid = m.Grid(0.0, 10.0, 1201)
    bpacket = m.WaveFunction.gaussian(bgrid, 5.0, 0.5, 2.0)
    point = bpacket.simplex_point(40)
    approx(sum(point), 1.0, 1e-10)
    assert all(p >= 0.0 for p in point)

    # Least action over a seeded ensemble, refined toward the straight line.
    min_action, refined_action, deviation = m.least_action_demo(
        0.0, 1.0, 1.0, 48, 300, 0.3, 42
    )
    assert min_action >= 0.5
    assert refined_action <= min_action
    assert deviation < 1e-3

    print("smoke test: OK")


if __name__ == "__main__":
    main()
