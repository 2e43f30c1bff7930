"""Cell-height (oscillation) bounds for Gamma_m.

Each edge of Gamma_m joins T_M(P_j) and T_M(P_{j+1}) for a word M of length m.
Its height is the ordinate difference of those two vertices; it is compared
with lower * lam^m and eta_W * lam^m, lam^m being (L_m (n_b-1))^(2-D_W).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .ifs import Word, build_level, word_of_polygon
from .params import FractalParams, derived_constants, weierstrass_on_grid

log = logging.getLogger(__name__)

DENSE_SAMPLES = 257


@dataclass(frozen=True)
class HeightRecord:
    m: int
    word: Word
    j: int
    width: float
    height: float
    lower_bound: float
    upper_bound: float

    @property
    def ok(self) -> bool:
        return self.lower_bound <= self.height <= self.upper_bound


def lower_constant(params: FractalParams) -> float:
    """Level-0 lower constant; for even n_b the max with the lam-free term is taken."""
    lam, n = params.lam, params.n_b
    smallest = min(abs(math.sin(math.pi * (2 * j + 1) / (n - 1))) for j in range(n))
    value = 2.0 / (1.0 - lam) * math.sin(math.pi / (n - 1)) * smallest
    value -= 2.0 * math.pi / (n * (n - 1)) / (lam * n - 1.0)
    if smallest < 1e-12:
        log.warning("lower-bound sine minimum vanishes for n_b=%d; lower bound is %.6g", n, value)
    if n % 2 == 0:
        value = max(value, 4.0 / n**2 * (1.0 - n**-2.0) / (n**2 - 1))
    return value


def upper_constant(params: FractalParams) -> float:
    return derived_constants(params).eta_w


def oscillation_heights(params: FractalParams, m: int) -> np.ndarray:
    """|y(S_{i+1}) - y(S_i)| for every edge of Gamma_m."""
    return np.abs(np.diff(build_level(params, m).y))


def height_records(params: FractalParams, m: int) -> list[HeightRecord]:
    heights = oscillation_heights(params, m)
    n1 = params.n_b - 1
    d = derived_constants(params)
    width = d.l_m(m)
    scale = d.height_scale(m)
    lo, hi = lower_constant(params) * scale, upper_constant(params) * scale
    return [
        HeightRecord(m, word_of_polygon(e // n1, m, params.n_b), e % n1, width, float(h), lo, hi)
        for e, h in enumerate(heights)
    ]


@dataclass
class BoundsReport:
    m: int
    lower: float
    upper: float
    scale: float
    min_height: float
    max_height: float
    report_only: bool
    violations: list[HeightRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.report_only or not self.violations


def check_bounds(params: FractalParams, m: int) -> BoundsReport:
    """Compare every cell height with the lower and upper bounds at level m.

    Even n_b runs in report-only mode: violations are listed but ``passed``
    stays True.
    """
    d = derived_constants(params)
    scale = d.height_scale(m)
    lo, hi = lower_constant(params) * scale, upper_constant(params) * scale
    heights = oscillation_heights(params, m)
    bad = np.flatnonzero((heights < lo) | (heights > hi))
    n1 = params.n_b - 1
    violations = [
        HeightRecord(m, word_of_polygon(int(e) // n1, m, params.n_b), int(e) % n1, d.l_m(m), float(heights[e]), lo, hi)
        for e in bad
    ]
    for v in violations:
        log.info("level %d word %s edge %d: height %.6g outside [%.6g, %.6g]", m, v.word, v.j, v.height, lo, hi)
    if violations:
        log.warning("level %d: %d of %d cell heights outside [%.6g, %.6g]", m, len(violations), heights.size, lo, hi)
    return BoundsReport(m, lo, hi, scale, float(heights.min()), float(heights.max()),
                        params.n_b % 2 == 0, violations)


def dense_oscillation(params: FractalParams, m: int, samples: int = DENSE_SAMPLES,
                      tol: float = 1e-10) -> np.ndarray:
    """max - min of W over each cell, sampled at ``samples`` exact rational points.

    Diagnostic only; the bound check uses vertex ordinates.
    """
    level = build_level(params, m)
    n_cells = level.n_vertices - 1
    sub = samples - 1
    den = level.den * sub
    k = np.arange(n_cells * sub + 1, dtype=np.int64)
    w = weierstrass_on_grid(params, k, den, tol)
    cells = np.lib.stride_tricks.sliding_window_view(w, samples)[::sub]
    return cells.max(axis=1) - cells.min(axis=1)
