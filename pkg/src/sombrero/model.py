"""Problem definition: parameters, trial function and the potential gap w(r).

The radial equation is

    [-1/2 d^2/dr^2 + k(k-1)/(2 r^2) + V(r) - E] psi = 0,   V = (g^2/2)(r^2 - 1)^2,

with k = l + (N-1)/2.  The trial function phi is the exact ground state of
the same operator with V replaced by V + w and E by E0 = g(1 + k a).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InvalidWindow, StructuralError

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class ModelParams:
    g: float
    N: int
    l: int
    a: float

    @property
    def K(self) -> float:
        return 0.5 * (self.N - 1)

    @property
    def k(self) -> float:
        return self.l + self.K


@dataclass(frozen=True)
class DerivedConstants:
    """Everything computed from (g, k, a).

    ``N``/``l``/``K`` are ``None`` when the constants were built directly
    from ``k`` (window-table rows and the k = 0 diagnostic).
    """

    g: float
    k: float
    a: float
    g_plus: float
    g_minus: float
    E0: float
    a_min: float
    a_max: float
    g_min: float
    g_max: float
    hierarchy_valid: bool
    N: Optional[int] = None
    l: Optional[int] = None
    K: Optional[float] = None

    @classmethod
    def from_k(cls, g: float, k: float, a: float, N=None, l=None) -> "DerivedConstants":
        if not (g > 0 and a > 0 and k >= 0):
            raise StructuralError(f"need g > 0, a > 0, k >= 0 (got g={g}, k={k}, a={a})")
        c = k / a + 1.0
        a_lo, a_hi = a_window(g, k)
        g_lo, g_hi = g_window(k, a)
        return cls(
            g=float(g),
            k=float(k),
            a=float(a),
            g_plus=g + c,
            g_minus=g - c,
            E0=g * (1.0 + k * a),
            a_min=a_lo,
            a_max=a_hi,
            g_min=g_lo,
            g_max=g_hi,
            hierarchy_valid=bool(1.0 < g / c < math.sqrt(1.0 + 1.0 / (k + a))),
            N=N,
            l=l,
            K=None if N is None else 0.5 * (N - 1),
        )

    @property
    def g2_min(self) -> float:
        return self.g_min**2

    @property
    def g2_max(self) -> float:
        return self.g_max**2

    def to_dict(self) -> dict:
        d = asdict(self)
        d["g2_min"] = self.g2_min
        d["g2_max"] = self.g2_max
        return d


def a_window(g: float, k: float) -> tuple[float, float]:
    """Admissible (a_min, a_max) for given (g, k).

    a_min solves g = 1 + k/a; a_max solves g^2 = (1 + k/a)(1 + (k+1)/a),
    a quadratic in x = 1/a of which the positive root is taken.
    Returns nan for an endpoint that does not exist (g <= 1).
    """
    if g <= 1.0:
        return math.nan, math.nan
    a_min = k / (g - 1.0)
    qa, qb, qc = k * (k + 1.0), 2.0 * k + 1.0, 1.0 - g * g
    if qa == 0.0:
        x = -qc / qb
    else:
        # stable form of the positive root (qc < 0 here)
        x = 2.0 * (-qc) / (qb + math.sqrt(qb * qb - 4.0 * qa * qc))
    return a_min, 1.0 / x


def g_window(k: float, a: float) -> tuple[float, float]:
    g_min = 1.0 + k / a
    return g_min, math.sqrt(g_min * (1.0 + (k + 1.0) / a))


def validate_params(p: ModelParams) -> DerivedConstants:
    """Check structural invariants and compute the derived constants.

    A parameter set outside the hierarchy window is not an error; the
    returned constants carry ``hierarchy_valid=False``.
    """
    if int(p.N) != p.N or p.N < 2:
        raise StructuralError(f"N must be an integer >= 2, got {p.N}")
    if int(p.l) != p.l or p.l < 0:
        raise StructuralError(f"l must be an integer >= 0, got {p.l}")
    if not p.g > 0:
        raise StructuralError(f"g must be positive, got {p.g}")
    if not p.a > 0:
        raise StructuralError(f"a must be positive, got {p.a}")
    return DerivedConstants.from_k(p.g, p.k, p.a, N=int(p.N), l=int(p.l))


# -- elementary functions ----------------------------------------------------

def potential(g, r):
    r = np.asarray(r, dtype=float)
    return 0.5 * g * g * (r * r - 1.0) ** 2


def S0(r):
    r = np.asarray(r, dtype=float)
    return (r - 1.0) ** 2 * (r + 2.0) / 3.0


def S0_prime(r):
    r = np.asarray(r, dtype=float)
    return r * r - 1.0


def Lambda(g, r):
    r = np.asarray(r, dtype=float)
    return 2.0 * g * (r - r**3 / 3.0)


def _check_radius(r, strict=False):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or (strict and np.any(r == 0)):
        raise DomainError("radius must be " + ("> 0" if strict else ">= 0"))
    return r


def _is_left(r, side):
    """Mask of points evaluated with the r < 1 branch."""
    if side not in (LEFT, RIGHT):
        raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")
    return (r < 1.0) | ((r == 1.0) & (side == LEFT))


# -- trial function ----------------------------------------------------------

class TrialFunction:
    """phi(r) in log-magnitude form; phi is positive so the sign is always +1.

    For r < 1, phi = P(r) e^{-g S0} (g+ + g- e^{-Lambda}) and for r > 1,
    phi = P(r) e^{-g S0} (g+ + g- e^{-4g/3}), where
    P(r) = 2 r^k / (r+1) * ((1+a)/(r+a))^k.  Both branches meet at r = 1
    because Lambda(1) = 4g/3.
    """

    def __init__(self, dc: DerivedConstants):
        self.dc = dc
        # at r >= 1 the bracket is a constant
        self._log_right = math.log(dc.g_plus + dc.g_minus * math.exp(-4.0 * dc.g / 3.0))

    def _log_prefactor(self, r):
        k, a = self.dc.k, self.dc.a
        with np.errstate(divide="ignore"):
            out = math.log(2.0) - np.log1p(r) + k * (math.log1p(a) - np.log(r + a))
            if k != 0:
                out = out + k * np.log(r)
        return out

    def log_phi(self, r, side=LEFT):
        r = _check_radius(r)
        dc = self.dc
        left = _is_left(r, side)
        bracket = np.where(
            left,
            np.log(dc.g_plus + dc.g_minus * np.exp(-Lambda(dc.g, np.minimum(r, 1.0)))),
            self._log_right,
        )
        return self._log_prefactor(r) - dc.g * S0(r) + bracket

    def __call__(self, r, side=LEFT):
        return np.exp(self.log_phi(r, side))

    def dlog_phi(self, r, side=LEFT):
        """phi'/phi."""
        r = _check_radius(r, strict=self.dc.k != 0)
        dc = self.dc
        k, a, g = dc.k, dc.a, dc.g
        with np.errstate(divide="ignore"):
            base = k / r - 1.0 / (r + 1.0) - k / (r + a) - g * (r * r - 1.0)
        rl = np.minimum(r, 1.0)
        em = dc.g_minus * np.exp(-Lambda(g, rl))
        corr = -em * 2.0 * g * (1.0 - rl * rl) / (dc.g_plus + em)
        return base + np.where(_is_left(r, side), corr, 0.0)

    def log_phi_reduced(self, r):
        """log(r^{-k} phi) for r < 1; finite at r = 0."""
        r = _check_radius(r)
        dc = self.dc
        k, a, g = dc.k, dc.a, dc.g
        lp = math.log(2.0) - np.log1p(r) + k * (math.log1p(a) - np.log(r + a))
        rl = np.minimum(r, 1.0)
        return lp - g * S0(r) + np.log(dc.g_plus + dc.g_minus * np.exp(-Lambda(g, rl)))


# -- potential gap w(r) ------------------------------------------------------

@dataclass(frozen=True)
class PotentialTerms:
    r: np.ndarray
    side: str
    value: np.ndarray
    h: tuple  # h1..h5
    ghat: tuple  # g6, g7, g8 (zero on the r > 1 branch)
    regrouped: tuple  # w_I..w_VI (r < 1 branch only; nan elsewhere)
    w0: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray

    @property
    def h_total(self):
        return sum(self.h)

    @property
    def ghat_total(self):
        return sum(self.ghat)


def _left_factors(dc: DerivedConstants, r):
    """Left-branch factors (X, Y, Z/r), stable for large Lambda and r -> 0."""
    g, gp, gm = dc.g, dc.g_plus, dc.g_minus
    lam = Lambda(g, r)
    em = np.exp(-lam)
    den = gp + gm * em
    X = gm * em / den
    Y = (gp - gm * em) / den
    with np.errstate(divide="ignore", invalid="ignore"):
        one_minus = -np.expm1(-lam) / np.where(r > 0, r, 1.0)
    one_minus = np.where(r > 0, one_minus, 2.0 * g)
    Z_over_r = gp * gm * one_minus / den
    return X, Y, Z_over_r


def w_value(dc: DerivedConstants, r, side=LEFT):
    """Total w(r); regular at r = 0, ``side`` selects the branch at r = 1."""
    r = _check_radius(r)
    k, a, g = dc.k, dc.a, dc.g
    left = _is_left(r, side)
    h345 = 1.0 / (r + 1.0) ** 2 + k * (k + 1.0) / (2.0 * (r + a) ** 2) + k * a / ((r + a) * (r + 1.0))
    h2 = k * a * a * g / (r + a)
    rl = np.minimum(r, 1.0)
    X, _, Z_over_r = _left_factors(dc, rl)
    # w_I + h2 + g6 + g7, i.e. h1 + g8 folded into the regular w_I
    w_left = k * a * Z_over_r / (rl + a) + h2 + 2.0 * g * X * (1.0 + k * a * rl / (rl + a))
    with np.errstate(divide="ignore"):
        h1 = k * a * dc.g_minus / (r * (r + a))
    return h345 + np.where(left, w_left, h1 + h2)


def eval_w(dc: DerivedConstants, r, side=LEFT) -> PotentialTerms:
    """w(r) together with every component of its two decompositions."""
    r = _check_radius(r)
    k, a, g, gm = dc.k, dc.a, dc.g, dc.g_minus
    left = _is_left(r, side)
    with np.errstate(divide="ignore", invalid="ignore"):
        h1 = k * a * gm / (r * (r + a))
    h2 = k * a * a * g / (r + a)
    h3 = 1.0 / (r + 1.0) ** 2
    h4 = k * (k + 1.0) / (2.0 * (r + a) ** 2)
    h5 = k * a / ((r + a) * (r + 1.0))

    rl = np.minimum(r, 1.0)
    X, Y, Z_over_r = _left_factors(dc, rl)
    zero = np.zeros_like(r)
    g6 = np.where(left, 2.0 * g * X, zero)
    g7 = np.where(left, 2.0 * g * k * a * rl * X / (rl + a), zero)
    with np.errstate(divide="ignore", invalid="ignore"):
        g8 = np.where(left, -2.0 * k * g * a * X / (rl * (rl + a)), zero)

    nan = np.full_like(r, np.nan)
    wI = np.where(left, k * a * Z_over_r / (rl + a), nan)
    wII = np.where(left, g * k * a * a * Y / (rl + a), nan)
    w0 = np.where(left, 2.0 * g * k * a * X, nan)
    wVI = np.where(left, 2.0 * g * (k * a + 1.0) * X, nan)
    regrouped = (wI, wII, np.where(left, h3, nan), np.where(left, h4, nan), np.where(left, h5, nan), wVI)

    return PotentialTerms(
        r=r,
        side=side,
        value=w_value(dc, r, side),
        h=(h1, h2, h3, h4, h5),
        ghat=(g6, g7, g8),
        regrouped=regrouped,
        w0=w0,
        X=np.where(left, X, nan),
        Y=np.where(left, Y, nan),
        Z=np.where(left, Z_over_r * rl, nan),
    )


def jump_closed_form(dc: DerivedConstants) -> float:
    """w(1-) - w(1+) = 2 g g- / (g+ e^{4g/3} + g-)."""
    g = dc.g
    return 2.0 * g * dc.g_minus * math.exp(-4.0 * g / 3.0) / (dc.g_plus + dc.g_minus * math.exp(-4.0 * g / 3.0))


# -- property check ----------------------------------------------------------

@dataclass(frozen=True)
class PropertyReport:
    inside_window: bool
    min_w: float
    max_slope: float
    jump: float
    jump_closed_form: float
    jump_rel_err: float
    positive: bool
    decreasing: bool
    jump_ok: bool
    n_points: int
    label: str

    @property
    def passed(self) -> bool:
        return self.positive and self.decreasing and self.jump_ok

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def w_check_grid(n_points: int = 10_000, r_hi: float = 8.0):
    """Dense scan grid: (0, 1] and [1, r_hi], each with n_points // 2 nodes."""
    half = n_points // 2
    left = np.linspace(0.0, 1.0, half + 1)[1:]
    right = np.linspace(1.0, r_hi, n_points - half)
    return left, right


def check_w_properties(
    dc: DerivedConstants,
    grid=None,
    slope_tol: float = 1e-10,
    jump_rtol: float = 1e-10,
    strict: bool = False,
) -> PropertyReport:
    """Scan w for positivity, monotone decrease on each smooth piece and the jump at 1.

    ``grid`` is a (left, right) pair of increasing arrays covering (0, 1] and
    [1, r_hi].  Outside the window the check still runs and the report is
    labelled; pass ``strict=True`` to raise :class:`InvalidWindow` instead.
    """
    if strict and not dc.hierarchy_valid:
        raise InvalidWindow(f"(g={dc.g}, k={dc.k}, a={dc.a}) is outside the sufficient window")
    left, right = w_check_grid() if grid is None else grid
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    wl = w_value(dc, left, LEFT)
    wr = w_value(dc, right, RIGHT)
    slopes = np.concatenate([np.diff(wl) / np.diff(left), np.diff(wr) / np.diff(right)])
    min_w = float(min(wl.min(), wr.min()))
    max_slope = float(slopes.max())
    jump = float(w_value(dc, 1.0, LEFT) - w_value(dc, 1.0, RIGHT))
    jc = jump_closed_form(dc)
    rel = abs(jump - jc) / abs(jc) if jc != 0 else abs(jump)
    inside = dc.hierarchy_valid
    decreasing = max_slope < slope_tol
    if inside:
        label = "inside sufficient window"
    elif decreasing and min_w > 0:
        label = "outside sufficient window (vacuous pass)"
    else:
        label = "outside sufficient window (violation found)"
    return PropertyReport(
        inside_window=inside,
        min_w=min_w,
        max_slope=max_slope,
        jump=jump,
        jump_closed_form=jc,
        jump_rel_err=rel,
        positive=min_w > 0,
        decreasing=decreasing,
        jump_ok=rel < jump_rtol,
        n_points=int(left.size + right.size),
        label=label,
    )
