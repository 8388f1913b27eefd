"""Polar-angle factors of the N-dimensional spherical harmonics.

Z(z) = (1 - z^2)^{m/2} P(z) with z = cos(theta) solves

    (1 - z^2) Z'' - (N - 1) z Z' + [l(l + N - 2) - m(m + N - 3)/(1 - z^2)] Z = 0.

For odd N = 2q + 1 the m = 0 member is the (q-1)-th derivative of the
Legendre polynomial of degree l + q - 1; for even N = 2q the Chebyshev
polynomial T_{l+q-1} (cos of a multiple angle) takes its place.  Higher m
follow by m further derivatives and the (1 - z^2)^{m/2} prefactor.
Functions are left unnormalized.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError

# above this l + q the coefficients switch from Fraction to float
EXACT_LIMIT = 12


def eigenvalue(l: int, n: int) -> int:
    """Eigenvalue l(l + n - 1) of the squared angular momentum on the n-sphere."""
    if int(l) != l or int(n) != n:
        raise DomainError("l and n must be integers")
    if l < 0 or n < 1:
        raise DomainError(f"need l >= 0 and n >= 1, got l={l}, n={n}")
    return int(l) * (int(l) + int(n) - 1)


def separation_constants(N: int, l: int) -> tuple:
    """(k(k-1), K(K-1) + l(l+N-2)) as exact rationals; the two must agree."""
    K = Fraction(N - 1, 2)
    k = l + K
    return k * (k - 1), K * (K - 1) + l * (l + N - 2)


# -- polynomial helpers (coefficients in ascending powers) ---------------------

def _deriv(c: Sequence) -> list:
    return [i * c[i] for i in range(1, len(c))] or [c[0] * 0]


def _deriv_n(c: Sequence, n: int) -> list:
    c = list(c)
    for _ in range(n):
        c = _deriv(c)
    return c


def _horner(c: Sequence, z):
    acc = c[-1] * 0
    for coef in reversed(c):
        acc = acc * z + coef
    return acc


def _three_term(n: int, one, chebyshev: bool) -> list:
    """Coefficients of T_n (chebyshev) or P_n."""
    zero = one * 0
    prev, cur = [one], [zero, one]
    if n == 0:
        return prev
    for j in range(1, n):
        shifted = [zero] + cur
        padded = prev + [zero, zero]
        if chebyshev:
            nxt = [2 * s - p for s, p in zip(shifted, padded)]
        else:
            nxt = [((2 * j + 1) * s - j * p) / (j + 1) for s, p in zip(shifted, padded)]
        prev, cur = cur, nxt
    return cur


def legendre_coeffs(n: int, exact: bool = True) -> list:
    return _three_term(n, Fraction(1) if exact else 1.0, chebyshev=False)


def chebyshev_coeffs(n: int, exact: bool = True) -> list:
    return _three_term(n, Fraction(1) if exact else 1.0, chebyshev=True)


# -- angular functions ---------------------------------------------------------

@dataclass(frozen=True)
class AngularFunction:
    N: int
    l: int
    m: int
    coeffs: tuple  # P(z), ascending powers
    exact: bool

    @property
    def half_power(self) -> int:
        return self.m

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def eigenvalues(self) -> tuple:
        """(l(l+N-2), m(m+N-3)), the two separation constants in the ODE."""
        return self.l * (self.l + self.N - 2), self.m * (self.m + self.N - 3)

    def poly(self, z):
        return _horner(self.coeffs, z)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        P = np.polynomial.polynomial.polyval(z, [float(c) for c in self.coeffs])
        return (1.0 - z * z) ** (0.5 * self.m) * P

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "l": self.l,
            "m": self.m,
            "half_power": self.m,
            "exact": self.exact,
            "coefficients": [str(c) if self.exact else float(c) for c in self.coeffs],
        }


def build_Z(N: int, l: int, m: int = 0, exact: bool | None = None) -> AngularFunction:
    """Construct Z for dimension N and quantum numbers l >= m >= 0."""
    if N < 2 or l < 0 or m < 0:
        raise DomainError(f"need N >= 2, l >= 0, m >= 0; got N={N}, l={l}, m={m}")
    if m > l:
        raise DomainError(f"m = {m} exceeds l = {l}")
    q = N // 2
    if exact is None:
        exact = l + q <= EXACT_LIMIT
    base = (chebyshev_coeffs if N % 2 == 0 else legendre_coeffs)(l + q - 1, exact)
    P = _deriv_n(base, q - 1 + m)
    return AngularFunction(N=N, l=l, m=m, coeffs=tuple(P), exact=bool(exact))


def ode_residual(Z: AngularFunction, z) -> float:
    """Left side of the polar ODE at |z| < 1.

    Derivatives of the polynomial part are exact.  For exact functions the
    bracket multiplying (1 - z^2)^{m/2} is summed in rational arithmetic at
    the (exactly representable) point z, with the 1/(1 - z^2) pieces kept
    separate until they cancel.
    """
    if not abs(z) < 1:
        raise DomainError(f"|z| must be < 1, got {z}")
    if Z.exact:
        zz = Fraction(z)
    else:
        zz = float(z)
    t = 1 - zz * zz
    m, N = Z.m, Z.N
    lam, mu = Z.eigenvalues
    P0 = _horner(Z.coeffs, zz)
    P1 = _horner(_deriv(Z.coeffs), zz)
    P2 = _horner(_deriv_n(Z.coeffs, 2), zz)
    # Z = t^{m/2} P; everything below is divided by t^{m/2}
    d1 = P1 - m * zz * P0 / t
    d2 = P2 - 2 * m * zz * P1 / t - m * P0 / t + m * (m - 2) * zz * zz * P0 / (t * t)
    bracket = t * d2 - (N - 1) * zz * d1 + lam * P0 - mu * P0 / t
    return float(bracket) * math.sqrt(float(t)) ** m


def reduced_operator(Z: AngularFunction) -> list:
    """Polynomial Q with ODE(Z) = (1 - z^2)^{m/2} Q; identically zero for a true solution."""
    c = list(Z.coeffs)
    zero = c[0] * 0
    m, N = Z.m, Z.N
    lam, mu = Z.eigenvalues
    n = len(c)
    d1 = _deriv(c) + [zero]
    d2 = _deriv_n(c, 2) + [zero, zero]
    out = [zero] * n
    for j in range(n):
        # (1 - z^2) P'' - (2m + N - 1) z P' + (lam - m(m+N-2)) P
        out[j] += d2[j] + (lam - m * (m + N - 2)) * c[j] - (2 * m + N - 1) * j * c[j]
        if j >= 2:
            out[j] -= d2[j - 2]
    return out


def inner_product(Z1: AngularFunction, Z2: AngularFunction) -> float:
    """Integral of Z1 Z2 (1 - z^2)^{(N-3)/2} over [-1, 1] by Gauss-Jacobi quadrature."""
    if Z1.N != Z2.N or Z1.m != Z2.m:
        raise DomainError("inner product needs matching N and m")
    alpha = Z1.m + 0.5 * (Z1.N - 3)
    n = (Z1.degree + Z2.degree) // 2 + 1
    x, wts = roots_jacobi(n, alpha, alpha)
    p1 = np.polynomial.polynomial.polyval(x, [float(c) for c in Z1.coeffs])
    p2 = np.polynomial.polynomial.polyval(x, [float(c) for c in Z2.coeffs])
    return float(np.sum(wts * p1 * p2))


def coefficient_table(Ns: Sequence[int], ls: Sequence[int], ms: Sequence[int] | None = None) -> list:
    """Records for every (N, l, m) with m <= l; ``ms`` defaults to 0..l."""
    rows = []
    for N in Ns:
        for l in ls:
            for m in (range(l + 1) if ms is None else [m for m in ms if m <= l]):
                rows.append(build_Z(N, l, m).to_dict())
    return rows
