"""Iterative quadrature solution f_{m-1} -> (E_m shift, f_m).

With sigma = (w - shift) phi^2 f_{m-1} and the shift chosen so that the
total integral of sigma vanishes, the flux D(r) = int_0^r sigma gives

    f_m'(r) = -2 D(r) / phi^2(r),

and f_m is fixed by f(r_max) = 1 (condition "A", r_max standing in for
infinity) or f(0) = 1 (condition "B").
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BoundaryBreakdown, InvalidWindow, NonpositiveIterate, NotConverged
from .grid import GridConfig, RadialGrid
from .model import LEFT, RIGHT, DerivedConstants, ModelParams, TrialFunction, validate_params, w_value

BC_INFINITY = "A"
BC_ORIGIN = "B"

# relative size of a difference that is still distinguishable from rounding
NOISE = 256 * np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class Discretization:
    """phi^2 (scaled by a common offset) and w sampled on a grid."""

    grid: RadialGrid
    log_phi2: np.ndarray
    w: np.ndarray
    E0: float
    power: float = 0.0  # phi^2 ~ r^power near the origin
    phi2: np.ndarray = field(init=False)
    log_offset: float = field(init=False)

    def __post_init__(self):
        offset = float(np.max(self.log_phi2))
        object.__setattr__(self, "log_offset", offset)
        object.__setattr__(self, "phi2", np.exp(self.log_phi2 - offset))

    @classmethod
    def radial(cls, dc: DerivedConstants, grid: RadialGrid) -> "Discretization":
        trial = TrialFunction(dc)
        r = grid.r
        lp = np.empty(grid.size)
        w = np.empty(grid.size)
        lp[grid.left] = 2.0 * trial.log_phi(r[grid.left], LEFT)
        lp[grid.right] = 2.0 * trial.log_phi(r[grid.right], RIGHT)
        w[grid.left] = w_value(dc, r[grid.left], LEFT)
        w[grid.right] = w_value(dc, r[grid.right], RIGHT)
        return cls(grid=grid, log_phi2=lp, w=w, E0=dc.E0, power=2.0 * dc.k)


@dataclass(frozen=True, eq=False)
class IterationState:
    m: int
    f: np.ndarray
    shift: float  # the energy shift E_m (calligraphic), 0 for m = 0
    f_at_far: float
    f_at_origin: float
    residue: float = 0.0  # discrete total of sigma relative to its L1 size


def initial_state(disc: Discretization) -> IterationState:
    return IterationState(m=0, f=np.ones(disc.grid.size), shift=0.0, f_at_far=1.0, f_at_origin=1.0)


def compute_energy_shift(disc: Discretization, f_prev: np.ndarray) -> float:
    """Ratio int w phi^2 f / int phi^2 f on the grid."""
    f_prev = np.asarray(f_prev, dtype=float)
    if not np.all(f_prev > 0):
        bad = int(np.argmin(f_prev))
        raise NonpositiveIterate(f"f_prev <= 0 at r = {disc.grid.r[bad]:.6g} (value {f_prev[bad]:.3e})")
    q = disc.phi2 * f_prev
    return disc.grid.integrate(disc.w * q, disc.power) / disc.grid.integrate(q, disc.power)


def flux_derivative(disc: Discretization, sigma: np.ndarray):
    """f' = -2 D / phi^2 for a source sigma of zero total, plus the relative residue.

    The flux D = int_0^r sigma is taken from whichever end is closer, so
    neither the r^{2k} region nor the e^{-2 g S0} tail is formed by
    cancellation.
    """
    grid = disc.grid
    fwd = grid.cumulative_forward(sigma, disc.power)
    bwd = grid.cumulative_backward(sigma)
    D = np.empty(grid.size)
    D[grid.left] = fwd[grid.left]
    D[grid.right] = -bwd[grid.right]
    scale = grid.integrate(np.abs(sigma), disc.power)
    residue = fwd[-1] / scale if scale > 0 else 0.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        fp = -2.0 * D / disc.phi2
    if not np.all(np.isfinite(fp)):
        raise OverflowError("flux / phi^2 not representable; r_max too large for the grid")
    return fp, residue


def _derivative(disc: Discretization, f_prev, shift):
    return flux_derivative(disc, (disc.w - shift) * disc.phi2 * f_prev)


def _origin_value(disc: Discretization, f, fp):
    """f(0) extrapolated over the first cell where f' ~ r."""
    if disc.grid.origin_included:
        return float(f[0])
    return float(f[0] - fp[0] * disc.grid.r[0] / 2.0)


def step_bc_infinity(disc: Discretization, prev: IterationState, shift: float) -> IterationState:
    """f_m(r) = 1 - int_r^{r_max} f_m'(y) dy."""
    fp, residue = _derivative(disc, prev.f, shift)
    f = 1.0 - disc.grid.cumulative_backward(fp)
    return IterationState(
        m=prev.m + 1, f=f, shift=shift, f_at_far=float(f[-1]), f_at_origin=_origin_value(disc, f, fp), residue=residue
    )


def step_bc_origin(disc: Discretization, prev: IterationState, shift: float) -> IterationState:
    """f_m(r) = 1 + int_0^r f_m'(y) dy; raises when f_m(r_max) <= 0."""
    fp, residue = _derivative(disc, prev.f, shift)
    f = 1.0 + disc.grid.cumulative_forward(fp, 1.0)
    state = IterationState(
        m=prev.m + 1, f=f, shift=shift, f_at_far=float(f[-1]), f_at_origin=1.0, residue=residue
    )
    if not np.all(f > 0):
        raise BoundaryBreakdown(
            f"f_{state.m}(r_max) = {state.f_at_far:.6g} <= 0; condition B is not admissible here",
            m=state.m,
            f_at_far=state.f_at_far,
        )
    return state


STEPPERS = {BC_INFINITY: step_bc_infinity, BC_ORIGIN: step_bc_origin}


# -- driver --------------------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    grid: GridConfig = GridConfig()
    tol: float = 1e-10
    max_iter: int = 50
    force: bool = False


@dataclass(frozen=True)
class HierarchyReport:
    bc: str
    inside_window: bool
    flags: dict
    unresolved: dict
    label: str

    @property
    def all_true(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> dict:
        return {
            "bc": self.bc,
            "inside_window": self.inside_window,
            "flags": dict(self.flags),
            "unresolved": dict(self.unresolved),
            "label": self.label,
            "all_true": self.all_true,
        }


@dataclass(eq=False)
class SolveResult:
    dc: DerivedConstants
    bc: str
    disc: Discretization
    states: list
    converged: bool
    tol: float
    hierarchy: Optional[HierarchyReport] = None

    @property
    def grid(self) -> RadialGrid:
        return self.disc.grid

    @property
    def shifts(self) -> np.ndarray:
        return np.array([s.shift for s in self.states[1:]])

    @property
    def energies(self) -> np.ndarray:
        return self.dc.E0 - self.shifts

    @property
    def iterations_used(self) -> int:
        return len(self.states) - 1

    @property
    def final_f(self) -> np.ndarray:
        return self.states[-1].f

    @property
    def bracket(self) -> Optional[tuple]:
        """(latest lower bound, latest upper bound) under condition B."""
        if self.bc != BC_ORIGIN:
            return None
        E = self.energies
        even = E[1::2]  # m = 2, 4, ...
        odd = E[0::2]  # m = 1, 3, ...
        if even.size == 0:
            return None
        return float(even.max()), float(odd.min())

    @property
    def E_final(self) -> float:
        b = self.bracket
        if b is not None:
            return 0.5 * (b[0] + b[1])
        return float(self.energies[-1])

    def psi(self, f_inf: float = 1.0) -> np.ndarray:
        """psi = phi f on the grid, scaled so the outer value of f equals ``f_inf``."""
        f = self.final_f * (f_inf / self.final_f[-1])
        return np.exp(0.5 * self.disc.log_phi2) * f

    def radial_R(self, f_inf: float = 1.0) -> np.ndarray:
        """R = r^{-K} psi, the radial factor of the full wave function."""
        K = self.dc.K if self.dc.K is not None else self.dc.k
        lp = 0.5 * self.disc.log_phi2 - K * np.log(self.grid.r)
        return np.exp(lp) * self.final_f * (f_inf / self.final_f[-1])


def _discretize(dc: DerivedConstants, cfg: SolverConfig) -> Discretization:
    return Discretization.radial(dc, RadialGrid.build(cfg.grid, dc.g))


def solve(p, bc: str = BC_INFINITY, cfg: SolverConfig = SolverConfig(), raise_on_fail: bool = True) -> SolveResult:
    """Iterate until successive energies differ by less than ``cfg.tol``.

    ``p`` is a :class:`ModelParams` or already validated constants.
    """
    dc = validate_params(p) if isinstance(p, ModelParams) else p
    if bc not in STEPPERS:
        raise ValueError(f"bc must be 'A' or 'B', got {bc!r}")
    if not dc.hierarchy_valid and not cfg.force:
        raise InvalidWindow(
            f"(g={dc.g}, k={dc.k}, a={dc.a}) violates 1 < g/(k/a+1) < sqrt(1+1/(k+a)); pass force to run anyway"
        )
    disc = _discretize(dc, cfg)
    step = STEPPERS[bc]
    states = [initial_state(disc)]
    converged = False
    result = SolveResult(dc=dc, bc=bc, disc=disc, states=states, converged=False, tol=cfg.tol)
    for _ in range(cfg.max_iter):
        prev = states[-1]
        shift = compute_energy_shift(disc, prev.f)
        try:
            states.append(step(disc, prev, shift))
        except BoundaryBreakdown as exc:
            exc.partial = result
            raise
        if len(states) >= 3 and abs(states[-1].shift - states[-2].shift) < cfg.tol:
            converged = True
            break
    result.converged = converged
    if len(states) >= 3:
        result.hierarchy = check_hierarchy(result)
    if not converged and raise_on_fail:
        raise NotConverged(f"no convergence to {cfg.tol} in {cfg.max_iter} iterations", partial=result)
    return result


# -- hierarchy verification ---------------------------------------------------

def _ratio_slope_sign(grid: RadialGrid, num, den):
    """(max, min) of discrete slopes of num/den, or None if below rounding."""
    mask = grid.distinct_mask()
    ratio = (num / den)[mask]
    d = np.diff(ratio)
    if np.max(np.abs(d)) <= NOISE * np.max(np.abs(ratio)):
        return None
    # steps smaller than rounding carry no sign information
    floor = NOISE * np.abs(ratio[1:])
    resolved = d[np.abs(d) > floor]
    return float(resolved.max(initial=-np.inf)), float(resolved.min(initial=np.inf))


def _increasing(vals, scale):
    out, skipped = True, 0
    for x, y in zip(vals[:-1], vals[1:]):
        if abs(y - x) <= NOISE * scale:
            skipped += 1
            continue
        out &= y > x
    return bool(out), skipped


def check_hierarchy(result: SolveResult) -> HierarchyReport:
    """Ordering flags for the shift sequence and the f-ratio slopes.

    Consecutive values whose difference is at rounding level are skipped and
    counted in ``unresolved``; they neither confirm nor contradict the order.
    """
    shifts = list(result.shifts)
    fs = [s.f for s in result.states]
    grid = result.grid
    scale = max(abs(result.dc.E0), 1.0)
    flags, unresolved = {}, {}

    def ratio_flag(indices, sign, name):
        ok, skipped = True, 0
        for m in indices:
            if m + 1 >= len(fs):
                continue
            s = _ratio_slope_sign(grid, fs[m + 1], fs[m])
            if s is None:
                skipped += 1
                continue
            hi, lo = s
            ok &= (hi < 0) if sign < 0 else (lo > 0)
        flags[name] = bool(ok)
        unresolved[name] = skipped

    if result.bc == BC_INFINITY:
        flags["shift_ascending"], unresolved["shift_ascending"] = _increasing(shifts, scale)
        ratio_flag(range(len(fs) - 1), -1, "ratio_decreasing")
        ok, skipped = True, 0
        for m in range(1, len(fs)):
            d = fs[m] - fs[m - 1]
            if np.max(np.abs(d[:-1])) <= NOISE * np.max(np.abs(fs[m])):
                skipped += 1
                continue
            ok &= bool(np.all(d[:-1] > -NOISE * np.abs(fs[m][:-1])))
        flags["f_ascending"], unresolved["f_ascending"] = bool(ok), skipped
    else:
        odd = shifts[0::2]
        even = shifts[1::2]
        flags["odd_shift_ascending"], unresolved["odd_shift_ascending"] = _increasing(odd, scale)
        desc, skipped = _increasing([-x for x in even], scale)
        flags["even_shift_descending"], unresolved["even_shift_descending"] = desc, skipped
        cross = True
        if even and odd:
            cross = min(even) > max(odd) or abs(min(even) - max(odd)) <= NOISE * scale
        flags["even_above_odd"] = bool(cross)
        unresolved["even_above_odd"] = 0
        ratio_flag(range(0, len(fs) - 1, 2), -1, "ratio_even_decreasing")
        ratio_flag(range(1, len(fs) - 1, 2), +1, "ratio_odd_increasing")

    inside = result.dc.hierarchy_valid
    label = "inside sufficient window" if inside else "outside sufficient condition"
    return HierarchyReport(bc=result.bc, inside_window=inside, flags=flags, unresolved=unresolved, label=label)


def strict_decrease_count(energies) -> int:
    """Length of the leading run E_1 > E_2 > ... that is strictly decreasing."""
    n = 1 if len(energies) else 0
    for x, y in zip(energies[:-1], energies[1:]):
        if not y < x:
            break
        n += 1
    return n
