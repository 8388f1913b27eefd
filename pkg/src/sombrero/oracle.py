"""Reference solvers independent of the iteration.

``fd_ground_energy`` shoots the radial equation with Numerov's method on a
logarithmic grid; ``prototype1d_solve`` runs the half-line prototype
(x >= 0, f'(0) = 0, f(inf) = 1) used to study the convergence rate.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, DomainError, NoBracket
from .grid import GridConfig, RadialGrid, tail_radius
from .iterate import Discretization, IterationState, compute_energy_shift, flux_derivative, initial_state
from .model import S0, DerivedConstants, ModelParams, validate_params


@dataclass(frozen=True)
class FDConfig:
    node_count: int = 8000
    r_min: float = 1e-6
    r_max: float | None = None  # default: 2 g S0(r_max) = tail_threshold
    tail_threshold: float = 80.0
    tol: float = 1e-12
    max_bisect: int = 200

    def __post_init__(self):
        if self.node_count < 2000:
            raise ConfigError("FD node_count must be >= 2000")
        if self.tol < 1e-12:
            raise ConfigError("FD tolerance must be >= 1e-12")


def _fd_rmax(g: float, cfg: FDConfig) -> float:
    return float(cfg.r_max) if cfg.r_max is not None else tail_radius(g, cfg.tail_threshold)


class _Shooter:
    """Numerov on x = ln r for y = r^{-1/2} psi:  y'' = [(k - 1/2)^2 + 2 r^2 (V + ... - E)] y."""

    def __init__(self, g: float, k: float, cfg: FDConfig):
        self.g, self.k = g, k
        r_max = _fd_rmax(g, cfg)
        self.x = np.linspace(math.log(cfg.r_min), math.log(r_max), cfg.node_count)
        self.h = self.x[1] - self.x[0]
        self.r = np.exp(self.x)
        self.r_max = r_max
        self.V = 0.5 * g * g * (self.r**2 - 1.0) ** 2
        self.i_match = int(np.argmin(np.abs(self.x)))

    def _Q(self, E):
        return (self.k - 0.5) ** 2 + 2.0 * self.r**2 * (self.V - E)

    def outward(self, E, stop=None):
        n = self.x.size if stop is None else stop + 2
        Q = self._Q(E)
        c = self.h * self.h / 12.0
        k = self.k
        cser = (self.g**2 - 2.0 * E) / (4.0 * k + 2.0)
        y = np.empty(n)
        y[:2] = self.r[:2] ** (k - 0.5) * (1.0 + cser * self.r[:2] ** 2)
        a = 1.0 - c * Q
        b = 2.0 + 10.0 * c * Q
        for i in range(1, n - 1):
            y[i + 1] = (b[i] * y[i] - a[i - 1] * y[i - 1]) / a[i + 1]
        return y

    def inward(self, E, stop):
        Q = self._Q(E)
        c = self.h * self.h / 12.0
        a = 1.0 - c * Q
        b = 2.0 + 10.0 * c * Q
        n = self.x.size
        y = np.zeros(n)
        y[-1] = 0.0  # Dirichlet at r_max
        y[-2] = 1e-200
        for i in range(n - 2, stop - 1, -1):
            y[i - 1] = (b[i] * y[i] - a[i + 1] * y[i + 1]) / a[i - 1]
            if abs(y[i - 1]) > 1e200:
                y[i - 1 :] *= 1e-200
        return y

    def nodes(self, E) -> int:
        y = self.outward(E)
        s = np.sign(y)
        return int(np.count_nonzero(s[1:] * s[:-1] < 0))

    def mismatch(self, E) -> float:
        m = self.i_match
        yo = self.outward(E, stop=m)
        yi = self.inward(E, stop=m)
        return yo[m + 1] / yo[m] - yi[m + 1] / yi[m]


def fd_ground_energy(p, cfg: FDConfig = FDConfig()) -> float:
    """Lowest eigenvalue of the radial equation with psi ~ r^k and psi(r_max) = 0.

    Node-count bisection brackets the ground state starting from [0, E0];
    the bracket is then refined by matching log-derivatives at r = 1.
    """
    dc = validate_params(p) if isinstance(p, ModelParams) else p
    sh = _Shooter(dc.g, dc.k, cfg)
    lo, hi = 0.0, dc.E0
    if sh.nodes(lo) != 0:
        raise NoBracket("lower seed E = 0 already has a node")
    if sh.nodes(hi) == 0:
        hi = 2.0 * hi + dc.g
        if sh.nodes(hi) == 0:
            raise NoBracket(f"no node below E = {hi}")
    for _ in range(cfg.max_bisect):
        if hi - lo < 1e-6 * max(1.0, abs(hi)):
            break
        mid = 0.5 * (lo + hi)
        if sh.nodes(mid) == 0:
            lo = mid
        else:
            hi = mid
    try:
        return float(brentq(sh.mismatch, lo, hi, xtol=cfg.tol, rtol=4 * np.finfo(float).eps, maxiter=cfg.max_bisect))
    except ValueError:
        # mismatch has a pole in the bracket; finish by node counting
        for _ in range(cfg.max_bisect):
            if hi - lo < cfg.tol:
                break
            mid = 0.5 * (lo + hi)
            if sh.nodes(mid) == 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


# -- half-line prototype -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PrototypeResult:
    g: float
    shifts: np.ndarray  # E_1 .. E_nmax (calligraphic)
    gaps: np.ndarray  # e_1 = E_1 - 1/4, e_n = E_n - E_{n-1}
    g0: np.ndarray  # g_n(0) = f_n(0) - f_{n-1}(0)
    states: list
    disc: Discretization

    @property
    def n_max(self) -> int:
        return self.shifts.size


def prototype_discretization(g: float, grid_cfg: GridConfig = GridConfig()) -> Discretization:
    grid = RadialGrid.build(grid_cfg, g, origin_included=True)
    x = grid.r
    log_phi2 = 2.0 * (math.log(2.0) - np.log1p(x) - g * S0(x))
    u = 1.0 / (1.0 + x) ** 2
    return Discretization(grid=grid, log_phi2=log_phi2, w=u, E0=g)


def prototype1d_solve(g: float, n_max: int = 6, grid_cfg: GridConfig = GridConfig()) -> PrototypeResult:
    """Iterate the prototype with f_n(r_max) = 1.

    After the first step the increments g_n = f_n - f_{n-1} and
    e_n = [(u - E_{n-1}) g_{n-1}] / [f_{n-1}] are propagated directly, with
    -1/2 (phi^2 g_n')' = [(u - E_n) g_{n-1} - e_n f_{n-2}] phi^2, so tiny
    gaps keep their relative precision instead of being differences of
    nearly equal shifts.
    """
    if not g > 2:
        raise DomainError(f"the rate bound needs g > 2, got {g}")
    disc = prototype_discretization(g, grid_cfg)
    grid, phi2, u = disc.grid, disc.phi2, disc.w
    states = [initial_state(disc)]
    shift = compute_energy_shift(disc, states[0].f)
    fp, residue = flux_derivative(disc, (u - shift) * phi2)
    inc = -grid.cumulative_backward(fp)
    states.append(IterationState(m=1, f=1.0 + inc, shift=shift, f_at_far=1.0, f_at_origin=1.0 + inc[0], residue=residue))
    gaps = [shift - 0.25]
    g0 = [inc[0]]
    for n in range(2, n_max + 1):
        f_prev, f_prev2 = states[-1].f, states[-2].f
        e = grid.integrate((u - shift) * inc * phi2) / grid.integrate(f_prev * phi2)
        shift = shift + e
        fp, residue = flux_derivative(disc, ((u - shift) * inc - e * f_prev2) * phi2)
        inc = -grid.cumulative_backward(fp)
        f = f_prev + inc
        states.append(IterationState(m=n, f=f, shift=shift, f_at_far=1.0, f_at_origin=float(f[0]), residue=residue))
        gaps.append(e)
        g0.append(inc[0])
    shifts = np.array([s.shift for s in states[1:]])
    return PrototypeResult(g=g, shifts=shifts, gaps=np.array(gaps), g0=np.array(g0), states=states, disc=disc)


def e1_expansion(g: float) -> float:
    """1/4 + 9/(64 g) + (85/512)/g^2."""
    return 0.25 + 9.0 / (64.0 * g) + (85.0 / 512.0) / g**2


@dataclass(frozen=True)
class BoundReport:
    g: float
    n: list
    shift: list
    gap: list
    bound: list
    margin: list
    g0: list
    g0_bound: list
    gaps_positive: bool
    bound_holds: bool
    g0_bound_holds: bool

    def to_dict(self) -> dict:
        return asdict(self)

    def rows(self):
        return list(zip(self.n, self.shift, self.gap, self.bound, self.margin))


def check_rate_bound(g: float, n_max: int = 6, result: PrototypeResult | None = None) -> BoundReport:
    """Compare e_n with (5/24)(9/g)^n and g_n(0) with (9/g)^n."""
    res = prototype1d_solve(g, n_max) if result is None else result
    n = np.arange(1, res.n_max + 1)
    bound = (5.0 / 24.0) * (9.0 / g) ** n
    g0_bound = (9.0 / g) ** n
    margin = bound - res.gaps
    return BoundReport(
        g=float(g),
        n=n.tolist(),
        shift=res.shifts.tolist(),
        gap=res.gaps.tolist(),
        bound=bound.tolist(),
        margin=margin.tolist(),
        g0=res.g0.tolist(),
        g0_bound=g0_bound.tolist(),
        gaps_positive=bool(np.all(res.gaps > 0)),
        bound_holds=bool(np.all(margin > 0)),
        g0_bound_holds=bool(np.all(res.g0 < g0_bound)),
    )
