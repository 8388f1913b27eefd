"""Convergence rate at larger coupling.

For the radial problem (f(r_max) = 1) the ratio of successive energy
differences is recorded against 9/g; for the half-line prototype the gap
ratios e_{n+1}/e_n are recorded the same way.  Nothing here is asserted.
"""
import argparse

import numpy as np

from sombrero import SolverConfig, solve
from sombrero.io import csv_text
from sombrero.model import DerivedConstants, a_window
from sombrero.oracle import fd_ground_energy, prototype1d_solve


def radial_rows(gs, k):
    rows = []
    for g in gs:
        lo, hi = a_window(g, k)
        a = 0.5 * (lo + hi)
        dc = DerivedConstants.from_k(g, k, a)
        res = solve(dc, "A", SolverConfig(tol=1e-13, max_iter=60), raise_on_fail=False)
        d = np.abs(np.diff(res.energies))
        d = d[d > 1e-12 * res.E_final]
        ratio = float(np.median(d[1:] / d[:-1])) if d.size > 2 else float("nan")
        rows.append((g, k, a, res.E_final, fd_ground_energy(dc), ratio, ratio * g, res.E_final / g))
    return rows


def prototype_rows(gs, n):
    rows = []
    for g in gs:
        gaps = prototype1d_solve(g, n).gaps
        r = gaps[1:] / gaps[:-1]
        rows.append((g, float(r.max()), float(r.max()) * g, 9.0 / g))
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=1.0)
    ap.add_argument("--g", type=float, nargs="+", default=[4.0, 6.0, 8.0, 10.0, 15.0, 20.0])
    args = ap.parse_args()
    print(csv_text(["g", "k", "a", "E_iter", "E_fd", "median_ratio", "ratio_times_g", "E_over_g"], radial_rows(args.g, args.k)))
    print(csv_text(["g", "max_gap_ratio", "ratio_times_g", "nine_over_g"], prototype_rows(args.g, 6)))
