"""Polygon measures, replication weights, vertex cells and the level-m quadrature."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateGeometryError, DomainError, ShapeError
from .ifs import GraphLevel, _build, build_level
from .params import FractalParams

log = logging.getLogger(__name__)

SIMPLICITY_CHECK_MAX_LEVEL = 3


def shoelace_area(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Unsigned area of closed polygons given as rows of vertex coordinates."""
    xs = np.atleast_2d(xs)
    ys = np.atleast_2d(ys)
    # centre each polygon first: removes the cancellation between large cross terms
    xs = xs - xs.mean(axis=1, keepdims=True)
    ys = ys - ys.mean(axis=1, keepdims=True)
    cross = xs * np.roll(ys, -1, axis=1) - np.roll(xs, -1, axis=1) * ys
    return 0.5 * np.abs(cross.sum(axis=1))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return d1 * d2 < 0 and d3 * d4 < 0


def self_intersections(points: np.ndarray) -> list[tuple[int, int]]:
    """Pairs of non-adjacent edges of a closed polygon that properly cross."""
    n = len(points)
    found = []
    for a in range(n):
        for b in range(a + 2, n):
            if a == 0 and b == n - 1:
                continue
            if _segments_cross(points[a], points[(a + 1) % n], points[b], points[(b + 1) % n]):
                found.append((a, b))
    return found


@dataclass(frozen=True, eq=False)
class MeasureTable:
    m: int
    polygon_measure: np.ndarray
    vertex_cell: np.ndarray
    reference_area: float

    @property
    def total(self) -> float:
        return float(self.polygon_measure.sum())


def polygon_measures(level: GraphLevel) -> np.ndarray:
    """Shoelace areas of the N_b-gons P_{m,j}, normalized by the area of P_0."""
    ref = _reference_area(level.params)
    pv = level.polygon_vertices
    areas = shoelace_area(level.x[pv], level.y[pv])
    bad = np.flatnonzero(areas <= 0.0)
    if bad.size:
        raise DegenerateGeometryError(f"polygon P_{{{level.m},{int(bad[0])}}} has zero area")
    if level.m <= SIMPLICITY_CHECK_MAX_LEVEL:
        pts = level.points
        for j, row in enumerate(pv):
            crossings = self_intersections(pts[row])
            if crossings:
                log.warning("polygon P_{%d,%d} is not simple: crossing edges %s", level.m, j, crossings)
    return areas / ref


@lru_cache(maxsize=None)
def _reference_area(params: FractalParams) -> float:
    base = _build(params, 0)
    area = float(shoelace_area(base.x, base.y)[0])
    if area <= 0.0:
        raise DegenerateGeometryError("level-0 polygon has zero area")
    return area


def vertex_cells(level: GraphLevel, poly: np.ndarray) -> np.ndarray:
    """A_m(X): own polygon measure, or the mean of both at a junction."""
    n1 = level.params.n_b - 1
    idx = level.k
    owner = np.minimum(idx // n1, level.n_polygons - 1)
    cells = poly[owner].astype(float)
    j = level.junction_indices
    left = j // n1 - 1
    cells[j] = 0.5 * (poly[left] + poly[left + 1])
    return cells


@lru_cache(maxsize=32)
def _table(params: FractalParams, m: int) -> MeasureTable:
    level = _build(params, m)
    poly = polygon_measures(level)
    poly.setflags(write=False)
    cells = vertex_cells(level, poly)
    cells.setflags(write=False)
    log.debug("level %d polygon measures: %s", m, poly if poly.size <= 9 else poly[:9])
    return MeasureTable(m, poly, cells, _reference_area(params))


def measure_table(level: GraphLevel) -> MeasureTable:
    return _table(level.params, level.m)


def vertex_cell_measure(level: GraphLevel, idx: int) -> float:
    return float(measure_table(level).vertex_cell[idx])


def replication_weights(params: FractalParams, m: int) -> np.ndarray:
    """mu_{m,i}: measure of the level-m polygons under letter i over the level-(m-1) total."""
    if m < 1:
        raise DomainError(f"replication weights need m >= 1, got {m}")
    fine = measure_table(build_level(params, m)).polygon_measure
    coarse_total = measure_table(build_level(params, m - 1)).total
    # T_i sends P_{m-1,j} to P_{m, i n_b^(m-1) + j}, so letter i owns a contiguous block
    return fine.reshape(params.n_b, -1).sum(axis=1) / coarse_total


def integrate(u, level: GraphLevel) -> float:
    """Level-m term of sum_j sum_{X in P_j} p(X) u(X) mu(P_j) / N_b."""
    u = np.asarray(u, dtype=float)
    if u.shape != (level.n_vertices,):
        raise ShapeError(f"function has shape {u.shape}, level {level.m} has {level.n_vertices} vertices")
    poly = measure_table(level).polygon_measure
    pv = level.polygon_vertices
    per_polygon = (level.powers[pv] * u[pv]).sum(axis=1)
    return float(per_polygon @ poly) / level.params.n_b


def total_measure_sequence(params: FractalParams, max_level: int = 8) -> list[float]:
    """integrate(1, m) for m = 0..max_level; logs the increments."""
    seq = []
    for m in range(max_level + 1):
        level = build_level(params, m)
        seq.append(integrate(np.ones(level.n_vertices), level))
    for m in range(1, len(seq)):
        log.info("integral of 1 at level %d: %.15g (increment %.3e)", m, seq[m], seq[m] - seq[m - 1])
    return seq
