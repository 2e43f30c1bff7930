"""Contractions T_i, words, fixed points and the prefractal graphs Gamma_m.

Vertices are identified by the exact integer pair (m, k): the vertex with
abscissa index k at level m sits at x = k / ((n_b - 1) n_b**m). Every index
0 <= k <= (n_b - 1) n_b**m occurs exactly once, so a level is stored as the
ordinate array alone and everything else (abscissas, powers, polygons) is
derived from k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .errors import ConsistencyError, DomainError, VertexLookupError
from .params import FractalParams

MAX_LEVEL = 12
JUNCTION_ATOL = 1e-10

Point = tuple[float, float]
Word = tuple[int, ...]


def _check_letter(params: FractalParams, i: int) -> int:
    if not 0 <= i <= params.n_b - 1:
        raise DomainError(f"letter {i!r} outside [0, {params.n_b - 1}]")
    return int(i)


def apply_contraction(params: FractalParams, i: int, point: Point) -> Point:
    """T_i(x, y) = ((x + i)/n_b, lam y + cos(2 pi (x + i)/n_b))."""
    i = _check_letter(params, i)
    x, y = point
    xn = (x + i) / params.n_b
    return xn, params.lam * y + math.cos(2.0 * math.pi * xn)


def apply_word(params: FractalParams, word: Sequence[int], point: Point) -> Point:
    """T_M(p) for M = (M_1, ..., M_m), i.e. T_{M_1}(T_{M_2}(...T_{M_m}(p)))."""
    for letter in reversed(tuple(word)):
        point = apply_contraction(params, letter, point)
    return point


def fixed_point(params: FractalParams, i: int) -> Point:
    i = _check_letter(params, i)
    n1 = params.n_b - 1
    return i / n1, math.cos(2.0 * math.pi * i / n1) / (1.0 - params.lam)


def word_of_polygon(j: int, m: int, n_b: int) -> Word:
    """Address of polygon P_{m,j}: base-n_b digits of j, most significant first."""
    if not 0 <= j < n_b**m:
        raise DomainError(f"polygon index {j} outside [0, {n_b**m - 1}]")
    digits = []
    for _ in range(m):
        j, d = divmod(j, n_b)
        digits.append(d)
    return tuple(reversed(digits))


def vertex_count(n_b: int, m: int) -> int:
    """Number of vertices of Gamma_m: N_b**m polygons of N_b vertices sharing junctions."""
    return (n_b - 1) * n_b**m + 1


def _cos_turns(k: np.ndarray, den: int) -> np.ndarray:
    """cos(2 pi k/den) with the integer reduction k mod den done exactly."""
    return np.cos(2.0 * np.pi * ((k % den) / den))


@dataclass(frozen=True)
class Vertex:
    level: int
    k: int
    den: int
    x: float
    y: float

    @property
    def abscissa(self) -> Fraction:
        return Fraction(self.k, self.den)


@dataclass(frozen=True)
class Polygon:
    m: int
    j: int
    vertex_indices: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class GraphLevel:
    params: FractalParams
    m: int
    y: np.ndarray

    @property
    def den(self) -> int:
        return (self.params.n_b - 1) * self.params.n_b**self.m

    @property
    def n_vertices(self) -> int:
        return self.y.shape[0]

    count = n_vertices

    @cached_property
    def k(self) -> np.ndarray:
        return np.arange(self.n_vertices, dtype=np.int64)

    @cached_property
    def x(self) -> np.ndarray:
        return self.k / self.den

    @cached_property
    def powers(self) -> np.ndarray:
        p = np.ones(self.n_vertices)
        p[self.junction_indices] = 0.5
        return p

    @cached_property
    def junction_indices(self) -> np.ndarray:
        step = self.params.n_b - 1
        return np.arange(step, self.n_vertices - 1, step, dtype=np.int64)

    @cached_property
    def boundary_indices(self) -> np.ndarray:
        """Positions of V_0 (the fixed points) inside this level."""
        return np.arange(self.params.n_b, dtype=np.int64) * self.params.n_b**self.m

    @cached_property
    def polygon_vertices(self) -> np.ndarray:
        """(n_b**m, n_b) array of vertex indices, one row per polygon."""
        n = self.params.n_b
        starts = np.arange(n**self.m, dtype=np.int64) * (n - 1)
        return starts[:, None] + np.arange(n, dtype=np.int64)[None, :]

    @property
    def n_polygons(self) -> int:
        return self.params.n_b**self.m

    @cached_property
    def edges(self) -> np.ndarray:
        idx = np.arange(self.n_vertices - 1, dtype=np.int64)
        return np.stack([idx, idx + 1], axis=1)

    @property
    def points(self) -> np.ndarray:
        return np.stack([self.x, self.y], axis=1)

    def vertex(self, idx: int) -> Vertex:
        if not 0 <= idx < self.n_vertices:
            raise VertexLookupError(f"vertex index {idx} not in level {self.m}")
        return Vertex(self.m, int(idx), self.den, float(self.x[idx]), float(self.y[idx]))

    def index_of(self, m0: int, k0: int) -> int:
        """Position in this level of the vertex (m0, k0) of a coarser level."""
        if m0 > self.m or not 0 <= k0 <= vertex_count(self.params.n_b, m0) - 1:
            raise VertexLookupError(f"vertex (m={m0}, k={k0}) is not in level {self.m}")
        return int(k0) * self.params.n_b ** (self.m - m0)

    def neighbors(self, idx: int) -> list[int]:
        return neighbors(self, idx)

    def polygons(self) -> list[Polygon]:
        return [Polygon(self.m, j, tuple(int(v) for v in row)) for j, row in enumerate(self.polygon_vertices)]

    def word(self, j: int) -> Word:
        return word_of_polygon(j, self.m, self.params.n_b)


def neighbors(level: GraphLevel, idx: int) -> list[int]:
    """Adjacent vertices on the open path Gamma_m (endpoints have one)."""
    if not 0 <= idx < level.n_vertices:
        raise VertexLookupError(f"vertex index {idx} not in level {level.m}")
    out = []
    if idx > 0:
        out.append(idx - 1)
    if idx < level.n_vertices - 1:
        out.append(idx + 1)
    return out


def polygonize(level: GraphLevel) -> tuple[list[Polygon], np.ndarray]:
    return level.polygons(), level.powers


@lru_cache(maxsize=48)
def _build(params: FractalParams, m: int) -> GraphLevel:
    n = params.n_b
    if m == 0:
        k = np.arange(n, dtype=np.int64)
        y = _cos_turns(k, n - 1) / (1.0 - params.lam)
    else:
        prev = _build(params, m - 1)
        span = prev.den
        den = n * span
        kp = np.arange(span + 1, dtype=np.int64)
        # block i holds T_i applied to every vertex of level m - 1
        shifted = kp[None, :] + span * np.arange(n, dtype=np.int64)[:, None]
        blocks = params.lam * prev.y[None, :] + _cos_turns(shifted, den)
        gap = np.abs(blocks[:-1, -1] - blocks[1:, 0])
        if gap.size and gap.max() > JUNCTION_ATOL:
            i = int(np.argmax(gap))
            raise ConsistencyError(
                f"junction T_{i}(P_last) vs T_{i + 1}(P_0) at level {m} differ by {gap[i]:.3e}"
            )
        y = np.concatenate([blocks[0], blocks[1:, 1:].ravel()])
    y.setflags(write=False)
    return GraphLevel(params, m, y)


def build_level(params: FractalParams, m: int, max_level: int = MAX_LEVEL) -> GraphLevel:
    if not 0 <= m <= max_level:
        raise DomainError(f"level {m} outside [0, {max_level}]")
    return _build(params, int(m))
