"""Smoke test for the msforge Python module.

Build and install first:
    pip install --no-build-isolation -e crates/msforge-py
"""

import math
import os
import sys
import tempfile

import msforge


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    return cond


def main():
    results = []

    s, residual = msforge.solve_genus(1)
    results.append(check(s.c > 0 and residual < 1e-8, f"genus family solved, c = {s.c:.12f}"))
    ends = s.end_orders()
    results.append(check(sorted(e["d"] for e in ends["ends"]) == [1, 3], "genus family ends (1, 3)"))
    tc = s.total_curvature()
    results.append(check(abs(tc["extrapolated"] / (12 * math.pi) - 1) < 0.01, "total curvature 12 pi"))
    report = s.verify_periods()
    results.append(check(report["pass"], "period report passes"))
    sym = s.symmetries(samples=50)
    results.append(check(len(sym) == 8 and max(r["max_deviation"] for r in sym) < 1e-6, "symmetry group of order 8"))

    even, defect = msforge.solve_even(2)
    results.append(check(even.a[0] > 1 and abs(defect) < 1e-10, f"even family solved, a = {even.a[0]:.12f}"))
    results.append(check(even.jorge_meeks()["identity_holds"], "Jorge-Meeks identity"))

    mesh = msforge.Surface.catenoid().mesh(radial=16, angular=16, range=(0.1, 10.0))
    results.append(check(len(mesh.vertices) == 256 and len(mesh) > 0, "catenoid mesh"))
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "cat.obj")
        mesh.write_obj(path)
        with open(path) as fh:
            faces = sum(1 for line in fh if line.startswith("f "))
        results.append(check(faces == len(mesh.faces), "OBJ export"))

    results.append(check("(2, 3, 3)" in msforge.render_tables(gamma=11), "table row (2, 3, 3) at gamma 11"))
    results.append(check(all(msforge.nonexistence(c)["obstructed"] for c in msforge.nonexistence_cases()),
                         "nonexistence cases obstructed"))

    try:
        msforge.solve_even(3)
        results.append(check(False, "odd k rejected"))
    except msforge.MsforgeError:
        results.append(check(True, "odd k rejected"))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
