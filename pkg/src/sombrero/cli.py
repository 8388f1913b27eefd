"""Command-line front end.

Exit codes: 0 success, 1 usage or structural error, 2 validation or bound
failure, 3 numerical failure (for instance a boundary breakdown).
"""
from __future__ import annotations

import argparse
import itertools
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import angular
from .errors import (
    BoundaryBreakdown,
    ConfigError,
    DomainError,
    InvalidWindow,
    NoBracket,
    NonpositiveIterate,
    NotConverged,
    SombreroError,
    StructuralError,
)
from .grid import GridConfig
from .io import csv_text, json_text, write_text
from .iterate import BC_ORIGIN, SolveResult, SolverConfig, solve
from .model import ModelParams, TrialFunction, validate_params
from .oracle import FDConfig, check_rate_bound, fd_ground_energy
from .reference import FIG1, FIG2, FIG3, TABLE1_G, TABLE1_TOL, table1_a, table1_cells

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3
PROFILE_SAMPLES = 401


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: Optional[str], name: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        write_text(Path(out) / name, text)


def _grid_cfg(args) -> GridConfig:
    kw = {}
    if getattr(args, "nodes", None) is not None:
        kw["node_count"] = args.nodes
    if getattr(args, "tail_threshold", None) is not None:
        kw["tail_threshold"] = args.tail_threshold
    if getattr(args, "r_max", None) is not None:
        kw["r_max"] = args.r_max
    return GridConfig(**kw)


def _params(args) -> ModelParams:
    return ModelParams(g=args.g, N=args.N, l=args.l, a=args.a)


# -- validate -------------------------------------------------------------------

def cmd_validate(args) -> int:
    dc = validate_params(_params(args))
    d = dc.to_dict()
    if args.format == "json":
        sys.stdout.write(json_text({"command": "validate", "constants": d}))
    else:
        keys = ["g", "N", "l", "k", "a", "E0", "g_plus", "g_minus", "a_min", "a_max", "g2_min", "g2_max", "hierarchy_valid"]
        sys.stdout.write(csv_text(["name", "value"], [(k, d[k]) for k in keys]))
        verdict = "valid" if dc.hierarchy_valid else "invalid"
        print(
            f"# {verdict}: a-window [{dc.a_min:.4g}, {dc.a_max:.4g}], "
            f"g^2-window [{dc.g2_min:.4g}, {dc.g2_max:.4g}]",
            file=sys.stderr,
        )
    return EXIT_OK if dc.hierarchy_valid else EXIT_INVALID


# -- solve ------------------------------------------------------------------------

def iteration_rows(res: SolveResult) -> list:
    """m, shift, energy, f(0), f(r_max), residue, ordered."""
    E = res.energies
    rows = []
    for i, st in enumerate(res.states[1:]):
        if res.bc == BC_ORIGIN:
            # odd m fall, even m rise, each even stays below the preceding odd
            if i >= 2:
                ordered = E[i] < E[i - 2] if i % 2 == 0 else (E[i] > E[i - 2] and E[i] < E[i - 1])
            elif i == 1:
                ordered = E[1] < E[0]
            else:
                ordered = None
        else:
            ordered = E[i] < E[i - 1] if i else None
        rows.append((st.m, st.shift, E[i], st.f_at_origin, st.f_at_far, st.residue, ordered))
    return rows


ITERATION_HEADER = ["m", "shift", "energy", "f_origin", "f_far", "residue", "ordered"]


def profile_rows(res: SolveResult, f_inf: float = 1.0, emit_R: bool = False, samples: int = PROFILE_SAMPLES) -> list:
    """(r, psi[, R]) at r = 0 and about ``samples`` grid nodes."""
    grid = res.grid
    dc = res.dc
    scale = f_inf / res.final_f[-1]
    psi = res.psi(f_inf)
    R = res.radial_R(f_inf) if emit_R else None
    mask = grid.distinct_mask()
    idx = np.flatnonzero(mask)
    stride = max(1, idx.size // samples)
    pick = np.unique(np.concatenate([idx[::stride], [idx[-1], grid.n_left - 1]]))
    rows = []
    # origin limits: psi ~ r^k, R ~ r^l
    f0 = res.states[-1].f_at_origin * scale
    reduced0 = float(np.exp(TrialFunction(dc).log_phi_reduced(0.0))) * f0
    psi0 = reduced0 if dc.k == 0 else 0.0
    l = dc.l if dc.l is not None else 0
    R0 = reduced0 if l == 0 else 0.0
    rows.append((0.0, psi0, R0) if emit_R else (0.0, psi0))
    for i in pick:
        rows.append((grid.r[i], psi[i], R[i]) if emit_R else (grid.r[i], psi[i]))
    return rows


def _solve_payload(res: SolveResult, oracle: Optional[float], status: str) -> dict:
    return {
        "command": "solve",
        "status": status,
        "constants": res.dc.to_dict(),
        "bc": res.bc,
        "converged": res.converged,
        "iterations_used": res.iterations_used,
        "shifts": res.shifts,
        "energies": res.energies,
        "E_final": res.E_final if res.iterations_used else None,
        "bracket": res.bracket,
        "hierarchy": res.hierarchy.to_dict() if res.hierarchy else None,
        "oracle_energy": oracle,
        "grid": {"nodes": int(res.grid.size), "r_max": res.grid.r_max},
    }


def _write_solve(res: SolveResult, args, oracle, status: str, with_profile: bool) -> None:
    if args.format == "json":
        payload = _solve_payload(res, oracle, status)
        if with_profile:
            cols = ["r", "psi", "R"] if args.emit_R else ["r", "psi"]
            payload["profile"] = {"columns": cols, "rows": profile_rows(res, args.f_inf, args.emit_R)}
        _emit(json_text(payload), args.out, "solve.json")
        return
    _emit(csv_text(ITERATION_HEADER, iteration_rows(res)), args.out, "iterations.csv")
    summary = [("status", status), ("bc", res.bc), ("converged", res.converged), ("iterations", res.iterations_used)]
    if res.iterations_used:
        summary.append(("E_final", res.E_final))
    if res.bracket is not None:
        summary += [("bracket_lower", res.bracket[0]), ("bracket_upper", res.bracket[1])]
    if oracle is not None:
        summary.append(("oracle_energy", oracle))
    if res.hierarchy is not None:
        summary += [(f"flag_{k}", v) for k, v in sorted(res.hierarchy.flags.items())]
    if args.out is not None:
        _emit(csv_text(["name", "value"], summary), args.out, "summary.csv")
        if with_profile:
            cols = ["r", "psi", "R"] if args.emit_R else ["r", "psi"]
            _emit(csv_text(cols, profile_rows(res, args.f_inf, args.emit_R)), args.out, "profile.csv")


def cmd_solve(args) -> int:
    p = _params(args)
    cfg = SolverConfig(grid=_grid_cfg(args), tol=args.tol, max_iter=args.max_iter, force=args.force)
    oracle = fd_ground_energy(p, FDConfig()) if args.oracle else None
    try:
        res = solve(p, args.bc, cfg)
    except InvalidWindow as exc:
        print(f"InvalidWindow: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BoundaryBreakdown as exc:
        print(f"BoundaryBreakdown: {exc}", file=sys.stderr)
        if exc.partial is not None:
            _write_solve(exc.partial, args, oracle, "boundary_breakdown", with_profile=False)
        return EXIT_NUMERIC
    except NotConverged as exc:
        print(f"NotConverged: {exc}", file=sys.stderr)
        if exc.partial is not None:
            _write_solve(exc.partial, args, oracle, "not_converged", with_profile=False)
        return EXIT_NUMERIC
    _write_solve(res, args, oracle, "ok", with_profile=True)
    return EXIT_OK


# -- table1 -------------------------------------------------------------------------

def cmd_table1(args) -> int:
    cells = table1_cells(args.g)
    rows = [(c.k, c.a, c.column, c.computed, c.printed, c.diff, c.ok) for c in cells]
    header = ["k", "a", "column", "computed", "printed", "diff", "ok"]
    if args.format == "json":
        text = json_text({"command": "table1", "g": args.g, "tolerance": TABLE1_TOL, "columns": header, "rows": rows})
    else:
        text = csv_text(header, rows)
    _emit(text, args.out, "table1." + args.format)
    bad = [c for c in cells if not c.ok]
    for c in bad:
        print(f"mismatch k={c.k} {c.column}: computed {c.computed:.4f}, printed {c.printed}", file=sys.stderr)
    return EXIT_INVALID if bad else EXIT_OK


# -- proto1d ------------------------------------------------------------------------

def cmd_proto1d(args) -> int:
    if not args.g > 2:
        print(f"refused: the rate bound needs g > 2, got {args.g}", file=sys.stderr)
        return EXIT_USAGE
    rep = check_rate_bound(args.g, args.n)
    header = ["n", "shift", "gap", "bound", "margin"]
    if args.format == "json":
        text = json_text({"command": "proto1d", "report": rep.to_dict()})
    else:
        text = csv_text(header, rep.rows())
    _emit(text, args.out, "proto1d." + args.format)
    ok = rep.bound_holds and rep.gaps_positive
    if not ok:
        print("bound violated or nonpositive gap", file=sys.stderr)
    return EXIT_OK if ok else EXIT_INVALID


# -- sweep ----------------------------------------------------------------------------

def _thread_cap() -> int:
    raw = os.environ.get("SOMBRERO_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _run_one(job):
    p, bc, cfg, out, fmt = job
    tag = f"g{p.g:g}_N{p.N}_l{p.l}_a{p.a:g}_{bc}"
    status, E, n = "ok", None, 0
    try:
        res = solve(p, bc, cfg)
    except (BoundaryBreakdown, NotConverged) as exc:
        status = "boundary_breakdown" if isinstance(exc, BoundaryBreakdown) else "not_converged"
        res = exc.partial
    except InvalidWindow:
        return (p.g, p.N, p.l, p.a, bc, "invalid_window", None, 0)
    except SombreroError as exc:
        return (p.g, p.N, p.l, p.a, bc, type(exc).__name__, None, 0)
    if res is not None and res.iterations_used:
        E, n = res.E_final, res.iterations_used
        if fmt == "json":
            write_text(Path(out) / f"{tag}.json", json_text(_solve_payload(res, None, status)))
        else:
            write_text(Path(out) / f"{tag}.csv", csv_text(ITERATION_HEADER, iteration_rows(res)))
    return (p.g, p.N, p.l, p.a, bc, status, E, n)


def cmd_sweep(args) -> int:
    cfg = SolverConfig(grid=_grid_cfg(args), tol=args.tol, max_iter=args.max_iter, force=args.force)
    jobs = []
    for g, N, l, a, bc in itertools.product(args.g, args.N, args.l, args.a, args.bc):
        p = ModelParams(g=g, N=N, l=l, a=a)
        validate_params(p)
        jobs.append((p, bc, cfg, args.out, args.format))
    with ThreadPoolExecutor(max_workers=min(_thread_cap(), len(jobs))) as pool:
        rows = list(pool.map(_run_one, jobs))
    header = ["g", "N", "l", "a", "bc", "status", "E_final", "iterations"]
    write_text(Path(args.out) / "summary.csv", csv_text(header, rows))
    return EXIT_OK if all(r[5] == "ok" for r in rows) else EXIT_NUMERIC


# -- figure data ------------------------------------------------------------------------

def _profile_for(res: SolveResult, states, f_inf=None):
    """Columns r, psi_m for each requested iterate on distinct grid nodes."""
    mask = res.grid.distinct_mask()
    phi = np.exp(0.5 * res.disc.log_phi2)
    cols = [res.grid.r[mask]]
    for st in states:
        cols.append((phi * st.f)[mask])
    return list(zip(*cols))


def cmd_figdata(args) -> int:
    out = Path(args.out)
    cfg = SolverConfig(grid=_grid_cfg(args))
    if args.figure == 1:
        p = ModelParams(**FIG1)
        for bc in ("A", "B"):
            res = solve(p, bc, cfg)
            write_text(out / f"fig1_{bc}_energies.csv", csv_text(ITERATION_HEADER, iteration_rows(res)))
            shown = res.states[1 : args.curves + 1]
            header = ["r"] + [f"psi_{s.m}" for s in shown]
            write_text(out / f"fig1_{bc}_psi.csv", csv_text(header, _profile_for(res, shown)))
        return EXIT_OK
    family = FIG2 if args.figure == 2 else FIG3
    energies = []
    for N, l, f_inf in family:
        p = ModelParams(g=TABLE1_G, N=N, l=l, a=table1_a(l + 0.5 * (N - 1)))
        res = solve(p, "A", cfg)
        energies.append((N, l, p.k, p.a, f_inf, res.E_final))
        rows = profile_rows(res, f_inf, emit_R=True)
        write_text(out / f"fig{args.figure}_N{N}_l{l}_R.csv", csv_text(["r", "psi", "R"], rows))
    write_text(out / f"fig{args.figure}_energies.csv", csv_text(["N", "l", "k", "a", "f_inf", "E"], energies))
    return EXIT_OK


# -- angular -------------------------------------------------------------------------------

def cmd_angular(args) -> int:
    ms = None if args.m is None else list(range(args.m[0], args.m[1] + 1))
    table = angular.coefficient_table(range(args.N[0], args.N[1] + 1), range(args.l[0], args.l[1] + 1), ms)
    for row in table:
        row["eigenvalues"] = list(angular.build_Z(row["N"], row["l"], row["m"]).eigenvalues)
    _emit(json_text({"command": "angular", "functions": table}), args.out, "angular.json")
    return EXIT_OK


# -- parser -------------------------------------------------------------------------------

def _add_params(sp):
    sp.add_argument("--g", type=float, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--l", type=int, required=True)
    sp.add_argument("--a", type=float, required=True)


def _add_grid(sp):
    sp.add_argument("--nodes", type=int, help="radial grid nodes (default 4001)")
    sp.add_argument("--tail-threshold", type=float, help="2 g S0(r_max) (default 20)")
    sp.add_argument("--r-max", type=float, help="explicit truncation radius")


def _add_solver(sp):
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-iter", type=int, default=50)
    sp.add_argument("--force", action="store_true", help="run outside the sufficient window")


def _pair(text):
    parts = [int(x) for x in text.split(":")]
    if len(parts) == 1:
        parts *= 2
    if len(parts) != 2 or parts[0] > parts[1]:
        raise argparse.ArgumentTypeError("expected LO:HI or a single integer")
    return parts


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sombrero", description="Iterative ground states in the N-dimensional quartic double well.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("validate", help="derived constants and parameter window")
    _add_params(sp)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("solve", help="run the iteration")
    _add_params(sp)
    _add_grid(sp)
    _add_solver(sp)
    sp.add_argument("--bc", choices=["A", "B"], default="A", help="A: f(r_max)=1, B: f(0)=1")
    sp.add_argument("--oracle", action="store_true", help="also report the shooting-method energy")
    sp.add_argument("--emit-R", action="store_true", help="add R = r^-K psi to the profile")
    sp.add_argument("--f-inf", type=float, default=1.0, help="normalization: value of f at r_max")
    sp.add_argument("--out", help="output directory (default: iterations to stdout)")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("table1", help="parameter-window table at g = 3")
    sp.add_argument("--g", type=float, default=TABLE1_G)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("proto1d", help="half-line prototype and its rate bound")
    sp.add_argument("--g", type=float, required=True)
    sp.add_argument("--n", type=int, default=6)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_proto1d)

    sp = sub.add_parser("sweep", help="concurrent solves over a parameter product")
    sp.add_argument("--g", type=float, nargs="+", required=True)
    sp.add_argument("--N", type=int, nargs="+", required=True)
    sp.add_argument("--l", type=int, nargs="+", required=True)
    sp.add_argument("--a", type=float, nargs="+", required=True)
    sp.add_argument("--bc", choices=["A", "B"], nargs="+", default=["A"])
    _add_grid(sp)
    _add_solver(sp)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("figdata", help="curve data for the published figures")
    sp.add_argument("--figure", type=int, choices=[1, 2, 3], required=True)
    sp.add_argument("--curves", type=int, default=6, help="iterates shown for figure 1")
    _add_grid(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_figdata)

    sp = sub.add_parser("angular", help="coefficient tables of the polar-angle functions")
    sp.add_argument("--N", type=_pair, default=[2, 6], help="LO:HI")
    sp.add_argument("--l", type=_pair, default=[0, 4], help="LO:HI")
    sp.add_argument("--m", type=_pair, help="LO:HI (default 0..l)")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_angular)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (StructuralError, ConfigError, DomainError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoBracket, NonpositiveIterate, OverflowError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
