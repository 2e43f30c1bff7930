"""Order-m graph Laplacians, renormalized sequences, normal derivatives, Gauss-Green.

The Dirichlet set defaults to V_0, every fixed point P_0..P_{n_b-1}. Interior
fixed points are pinned as well, so the open path splits into n_b - 1
independent segments. ``dirichlet="ends"`` pins only the two extremities.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sparse

from .errors import DomainError, ShapeError
from .ifs import GraphLevel, build_level
from .measure import measure_table
from .params import FractalParams, derived_constants

log = logging.getLogger(__name__)

Provider = Callable[[GraphLevel], np.ndarray]

DIRICHLET_SETS = ("v0", "ends")


def pinned_indices(level: GraphLevel, dirichlet: str = "v0") -> np.ndarray:
    if dirichlet == "v0":
        return level.boundary_indices
    if dirichlet == "ends":
        return np.array([0, level.n_vertices - 1], dtype=np.int64)
    raise DomainError(f"unknown Dirichlet set {dirichlet!r}; expected one of {DIRICHLET_SETS}")


@dataclass(frozen=True, eq=False)
class DiscreteLaplacian:
    level: GraphLevel
    dirichlet: str = "v0"

    @property
    def m(self) -> int:
        return self.level.m

    @property
    def coefficient(self) -> float:
        """1/h_m^2, the weight of every edge."""
        return 1.0 / derived_constants(self.level.params).h_m(self.m) ** 2

    @cached_property
    def pinned(self) -> np.ndarray:
        return pinned_indices(self.level, self.dirichlet)

    @cached_property
    def interior(self) -> np.ndarray:
        mask = np.ones(self.level.n_vertices, dtype=bool)
        mask[self.pinned] = False
        return np.flatnonzero(mask)

    @cached_property
    def segments(self) -> list[np.ndarray]:
        """Runs of consecutive interior vertices between pinned ones."""
        p = self.pinned
        return [np.arange(a + 1, b) for a, b in zip(p[:-1], p[1:]) if b - a > 1]

    def apply(self, u) -> np.ndarray:
        """(Delta_m u)(X) for every X in ``interior``, Dirichlet data taken from u."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.level.n_vertices,):
            raise ShapeError(f"function has shape {u.shape}, level {self.m} has {self.level.n_vertices} vertices")
        i = self.interior
        return self.coefficient * (u[i - 1] + u[i + 1] - 2.0 * u[i])

    def matrix(self) -> sparse.csr_matrix:
        """Interior block of Delta_m (zero Dirichlet data), as a sparse matrix."""
        n = self.interior.size
        pos = np.full(self.level.n_vertices, -1, dtype=np.int64)
        pos[self.interior] = np.arange(n)
        rows, cols, vals = [np.arange(n)], [np.arange(n)], [np.full(n, -2.0)]
        for shift in (-1, 1):
            nb = pos[self.interior + shift]
            keep = nb >= 0
            rows.append(np.flatnonzero(keep))
            cols.append(nb[keep])
            vals.append(np.ones(int(keep.sum())))
        mat = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)
        )
        return (self.coefficient * mat).tocsr()


def assemble_laplacian(params: FractalParams, m: int, dirichlet: str = "v0") -> DiscreteLaplacian:
    if m < 1:
        raise DomainError(f"Laplacian of order m needs m >= 1 (V_0 has no interior), got {m}")
    return DiscreteLaplacian(build_level(params, m), dirichlet)


def restrict(f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Provider:
    """Turn a function of (x, y) into a provider of vertex values on any level."""
    def provider(level: GraphLevel) -> np.ndarray:
        return np.broadcast_to(np.asarray(f(level.x, level.y), dtype=float), (level.n_vertices,))
    return provider


def _in_v0(params: FractalParams, m0: int, k0: int) -> bool:
    return k0 % params.n_b**m0 == 0


def renormalized_laplacian_seq(params: FractalParams, u: Provider, m0: int, k0: int,
                               m_range: Sequence[int]) -> list[float]:
    """f_m(X) = n_b^m (Delta_m u)(X) for X = vertex (m0, k0) and each m in m_range."""
    if _in_v0(params, m0, k0):
        raise DomainError(f"vertex (m={m0}, k={k0}) belongs to V_0")
    out = []
    for m in m_range:
        level = build_level(params, m)
        idx = level.index_of(m0, k0)
        vals = u(level)
        h2 = derived_constants(params).h_m(m) ** 2
        out.append(params.n_b**m * (vals[idx - 1] + vals[idx + 1] - 2.0 * vals[idx]) / h2)
    log.info("renormalized Laplacian at (m=%d, k=%d): %s", m0, k0, out)
    return out


@dataclass
class NormalDerivativeReport:
    m0: int
    k0: int
    levels: list[int]
    approximants: list[float] = field(default_factory=list)
    converged: bool = False
    value: float | None = None


def normal_derivative_term(level: GraphLevel, vals: np.ndarray, idx: int) -> float:
    """(n_b^k/h_k^2) sum_{Y~X} (u(X) - u(Y)) A_k(X)/n_b at level k."""
    d = derived_constants(level.params)
    k = level.m
    incr = sum(vals[idx] - vals[j] for j in level.neighbors(idx))
    cell = measure_table(level).vertex_cell[idx]
    return d.r_m(k) / d.h_m(k) ** 2 * incr * cell / level.params.n_b


def normal_derivative(params: FractalParams, u: Provider, m0: int, k0: int,
                      k_range: Sequence[int], tol: float = 1e-8) -> NormalDerivativeReport:
    report = NormalDerivativeReport(m0, k0, list(k_range))
    for k in report.levels:
        level = build_level(params, k)
        report.approximants.append(normal_derivative_term(level, u(level), level.index_of(m0, k0)))
    tail = report.approximants[-3:]
    if len(tail) == 3 and max(tail) - min(tail) <= tol:
        report.converged = True
        report.value = tail[-1]
    return report


@dataclass(frozen=True)
class GaussGreenTerms:
    energy: float
    interior: float
    boundary_raw: float
    boundary_weighted: float

    @property
    def residual(self) -> float:
        return abs(self.energy + self.interior - self.boundary_raw)


def gauss_green_terms(level: GraphLevel, u, v, dirichlet: str = "v0") -> GaussGreenTerms:
    """Both sides of the level-m summation by parts, with coefficient n_b^m/h_m^2.

    energy      sum_{X~Y} (n_b^m/h_m^2) (u(X)-u(Y)) (v(X)-v(Y))
    interior    sum_{X interior} v(X) n_b^m (Delta_m u)(X)
    boundary    sum_{X pinned} (n_b^m/h_m^2) sum_{Y~X} v(X) (u(X)-u(Y)), optionally times A_m(X)/n_b
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != (level.n_vertices,) or v.shape != u.shape:
        raise ShapeError(f"functions must have shape ({level.n_vertices},), got {u.shape} and {v.shape}")
    lap = DiscreteLaplacian(level, dirichlet)
    d = derived_constants(level.params)
    scale = d.r_m(level.m)
    coef = scale / d.h_m(level.m) ** 2
    e = float(coef * np.sum(np.diff(u) * np.diff(v)))
    interior = float(scale * np.dot(v[lap.interior], lap.apply(u)))
    cells = measure_table(level).vertex_cell
    raw = weighted = 0.0
    for x in lap.pinned:
        t = coef * v[x] * sum(u[x] - u[y] for y in level.neighbors(int(x)))
        raw += t
        weighted += t * cells[x] / level.params.n_b
    return GaussGreenTerms(e, interior, float(raw), float(weighted))


def gauss_green_residual(level: GraphLevel, u, v, dirichlet: str = "v0") -> float:
    return gauss_green_terms(level, u, v, dirichlet).residual
