"""Graph energies on Gamma_m, Markov truncation, harmonic extension and splines.

Three normalizations are provided:

* ``RAW``          (1/h_m^2) sum_{X~Y} (u(X)-u(Y)) (v(X)-v(Y))
* ``RENORMALIZED`` n_b^m times RAW (the r^{-m} factor with r = 1/n_b)
* ``MEASURED``     the RENORMALIZED edge terms, each weighted by A_m/n_b

For MEASURED, an edge X~Y carries the weight (A_m(X) + A_m(Y)) / (2 n_b).

The coarse-to-fine energy relation is written with h_m on one side and
h_m^2 on the other in some presentations; here h_m^2 is used everywhere.
"""

from __future__ import annotations

import enum

import numpy as np
from scipy.linalg import solve_banded

from .errors import DomainError, ShapeError, VertexLookupError
from .ifs import MAX_LEVEL, GraphLevel, build_level
from .measure import MeasureTable, measure_table
from .params import derived_constants


class EnergyMode(str, enum.Enum):
    RAW = "raw"
    RENORMALIZED = "renormalized"
    MEASURED = "measured"


def _values(u, level: GraphLevel) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (level.n_vertices,):
        raise ShapeError(f"function has shape {u.shape}, level {level.m} has {level.n_vertices} vertices")
    return u


def edge_weights(level: GraphLevel, mode: EnergyMode | str = EnergyMode.RAW,
                 measures: MeasureTable | None = None) -> np.ndarray:
    mode = EnergyMode(mode)
    d = derived_constants(level.params)
    base = 1.0 / d.h_m(level.m) ** 2
    if mode is EnergyMode.RAW:
        return np.full(level.n_vertices - 1, base)
    base *= d.r_m(level.m)
    if mode is EnergyMode.RENORMALIZED:
        return np.full(level.n_vertices - 1, base)
    if measures is None:
        measures = measure_table(level)
    cells = measures.vertex_cell
    return base * 0.5 * (cells[:-1] + cells[1:]) / level.params.n_b


def energy(level: GraphLevel, u, v=None, mode: EnergyMode | str = EnergyMode.RAW,
           measures: MeasureTable | None = None) -> float:
    u = _values(u, level)
    v = u if v is None else _values(v, level)
    w = edge_weights(level, mode, measures)
    return float(np.sum(w * np.diff(u) * np.diff(v)))


def markov_truncate(u) -> np.ndarray:
    return np.clip(np.asarray(u, dtype=float), 0.0, 1.0)


def _segment_operator(n_b: int) -> np.ndarray:
    """Banded storage of tridiag(-1, 2, -1) of size n_b - 1."""
    n = n_b - 1
    ab = np.zeros((3, n))
    ab[0, 1:] = -1.0
    ab[1, :] = 2.0
    ab[2, :-1] = -1.0
    return ab


def harmonic_extension(coarse: GraphLevel, u, max_level: int = MAX_LEVEL) -> np.ndarray:
    """Energy-minimizing extension of u from level m-1 to level m.

    Inherited vertices keep their values; on every refined edge the N_b - 1
    new values solve the discrete Dirichlet problem of the path.
    """
    u = _values(u, coarse)
    if coarse.m + 1 > max_level:
        raise DomainError(f"cannot extend beyond level {max_level}")
    n = coarse.params.n_b
    fine = build_level(coarse.params, coarse.m + 1, max_level)
    left, right = u[:-1], u[1:]
    rhs = np.zeros((n - 1, left.size))
    rhs[0] += left
    rhs[-1] += right
    inner = solve_banded((1, 1), _segment_operator(n), rhs)
    out = np.empty(fine.n_vertices)
    out[::n] = u
    out[:-1].reshape(-1, n)[:, 1:] = inner.T
    return out


def extend_to(level: GraphLevel, u, target: int) -> np.ndarray:
    """Repeated harmonic extension from level.m up to ``target``."""
    if target < level.m:
        raise DomainError(f"target level {target} below source level {level.m}")
    u = _values(u, level)
    cur = level
    while cur.m < target:
        u = harmonic_extension(cur, u)
        cur = build_level(cur.params, cur.m + 1)
    return u


def spline_basis(level: GraphLevel, idx: int, k: int | None = None) -> np.ndarray:
    """psi_X^m at level k >= m: indicator of vertex ``idx`` of ``level``, extended harmonically."""
    if not 0 <= idx < level.n_vertices:
        raise VertexLookupError(f"vertex index {idx} not in level {level.m}")
    e = np.zeros(level.n_vertices)
    e[idx] = 1.0
    return extend_to(level, e, level.m if k is None else k)


def extension_energy_ladder(level: GraphLevel, u, target: int,
                            mode: EnergyMode | str = EnergyMode.RAW) -> list[float]:
    """Energies of u and its successive harmonic extensions, levels m..target."""
    out = [energy(level, u, mode=mode)]
    cur = level
    while cur.m < target:
        u = harmonic_extension(cur, u)
        cur = build_level(cur.params, cur.m + 1)
        out.append(energy(cur, u, mode=mode))
    return out
