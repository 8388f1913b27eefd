"""How the f(0) = 1 admissibility edge at g = 3 moves with the truncation radius.

Under f(0) = 1 the first iterate decreases without bound on the half line
(f' ~ -const/r^2 beyond the well), so whether f_m(r_max) stays positive
depends on where the line is cut.  The default cut (2 g S0 = 20) places the
edge between k = 2.5 and k = 3.
"""
from sombrero import BoundaryBreakdown, SolverConfig, solve
from sombrero.grid import GridConfig, tail_radius
from sombrero.io import csv_text
from sombrero.model import DerivedConstants
from sombrero.reference import TABLE1_ROWS


def status(k, a, threshold):
    cfg = SolverConfig(grid=GridConfig(tail_threshold=threshold))
    try:
        res = solve(DerivedConstants.from_k(3.0, k, a), "B", cfg)
        return f"ok({res.iterations_used})"
    except BoundaryBreakdown as exc:
        return f"break(m={exc.m})"


if __name__ == "__main__":
    thresholds = [8.0, 12.0, 20.0, 30.0, 60.0]
    rows = []
    for k, a, *_ in TABLE1_ROWS:
        rows.append([k, a] + [status(k, a, t) for t in thresholds])
    header = ["k", "a"] + [f"S={t:g} (r_max={tail_radius(3.0, t):.3f})" for t in thresholds]
    print(csv_text(header, rows))
