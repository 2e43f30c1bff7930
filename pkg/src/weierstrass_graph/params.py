"""Problem parameters, derived constants and evaluation of the Weierstrass series.

All derived scalars are computed once per parameter set (``derived_constants``
is cached) so every module sees bit-identical values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, ParameterDomainError


@dataclass(frozen=True)
class FractalParams:
    """Amplitude ratio ``lam`` and integer frequency ratio ``n_b``."""

    lam: float
    n_b: int

    def __post_init__(self):
        lam, n_b = self.lam, self.n_b
        if isinstance(n_b, bool) or not isinstance(n_b, (int, np.integer)):
            raise ParameterDomainError(f"n_b must be an integer, got {n_b!r}")
        if not math.isfinite(lam) or not 0.0 < lam < 1.0:
            raise ParameterDomainError(f"lambda must satisfy 0 < lambda < 1, got {lam!r}")
        if n_b < 3:
            raise ParameterDomainError(f"n_b must satisfy n_b >= 3, got {n_b!r}")
        if lam * n_b <= 1.0:
            raise ParameterDomainError(
                f"lambda * n_b must be > 1, got {lam!r} * {n_b} = {lam * n_b!r}"
            )
        object.__setattr__(self, "lam", float(lam))
        object.__setattr__(self, "n_b", int(n_b))


@dataclass(frozen=True)
class DerivedConstants:
    params: FractalParams
    d_w: float
    two_minus_dw: float
    h: float
    eta_w: float

    def l_m(self, m: int) -> float:
        """Cell width 1/((n_b - 1) n_b**m)."""
        n_b = self.params.n_b
        return 1.0 / ((n_b - 1) * n_b**m)

    def h_m(self, m: int) -> float:
        """Renormalized width l_m(m)**(2 - d_w)."""
        return self.l_m(m) ** self.two_minus_dw

    def r_m(self, m: int) -> float:
        return float(self.params.n_b**m)

    def height_scale(self, m: int) -> float:
        """(l_m (n_b-1))**(2-d_w), which equals lam**m."""
        return self.params.lam**m


def eta_w(params: FractalParams) -> float:
    lam, n = params.lam, params.n_b
    first = (2 * n - 1) * lam * (n**2 - 1) / ((n - 1) ** 2 * (1 - lam) * (lam * n**2 - 1))
    second = 2 * n / ((lam * n**2 - 1) * (lam * n**3 - 1))
    return 2 * math.pi**2 * (first + second)


@lru_cache(maxsize=None)
def derived_constants(params: FractalParams) -> DerivedConstants:
    d_w = 2.0 + math.log(params.lam) / math.log(params.n_b)
    two_minus_dw = 2.0 - d_w
    return DerivedConstants(
        params=params,
        d_w=d_w,
        two_minus_dw=two_minus_dw,
        h=params.n_b ** (d_w - 2.0),
        eta_w=eta_w(params),
    )


def truncation_order(lam: float, tol: float) -> int:
    """Smallest N >= 0 with lam**(N+1) / (1 - lam) <= tol."""
    if not tol > 0:
        raise DomainError(f"tolerance must be > 0, got {tol!r}")
    n = max(0, math.ceil(math.log(tol * (1 - lam)) / math.log(lam) - 1))
    while n > 0 and lam**n / (1 - lam) <= tol:
        n -= 1
    while lam ** (n + 1) / (1 - lam) > tol:
        n += 1
    return n


def weierstrass_eval(params: FractalParams, x, tol: float = 1e-12, order: int | None = None) -> float:
    """Partial sum of sum lam**n cos(2 pi n_b**n x) with absolute error <= tol.

    ``x`` may be a float, int or Fraction. It is converted to an exact
    rational so the phase n_b**n * x is reduced modulo 1 exactly; floats are
    evaluated at their exact binary value.
    """
    if order is None:
        order = truncation_order(params.lam, tol)
    q = Fraction(x)
    p, d = q.numerator, q.denominator
    total = 0.0
    for n in range(order + 1):
        phase = (p * pow(params.n_b, n, d)) % d
        total += params.lam**n * math.cos(2.0 * math.pi * (phase / d))
    return total


def weierstrass_on_grid(params: FractalParams, k, den: int, tol: float = 1e-12) -> np.ndarray:
    """Vectorized series at the exact rationals k/den (k integer array).

    Requires den**2 to fit in int64.
    """
    k = np.asarray(k, dtype=np.int64) % den
    if den > 3_000_000_000:
        raise DomainError(f"denominator {den} too large for int64 phase reduction")
    order = truncation_order(params.lam, tol)
    total = np.zeros(k.shape, dtype=np.float64)
    for n in range(order + 1):
        phase = (k * pow(params.n_b, n, den)) % den
        total += params.lam**n * np.cos(2.0 * np.pi * (phase / den))
    return total
