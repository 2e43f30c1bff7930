from fractions import Fraction
from itertools import product

import math
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weierstrass_graph import (
    ConsistencyError,
    DomainError,
    FractalParams,
    VertexLookupError,
    apply_contraction,
    apply_word,
    build_level,
    fixed_point,
    vertex_count,
)
from weierstrass_graph.ifs import neighbors, word_of_polygon

REF = FractalParams(0.5, 3)


def abscissae(n, m):
    """V_m abscissae by applying every word to every fixed point, exactly."""
    pts = {Fraction(i, n - 1) for i in range(n)}
    for _ in range(m):
        pts = {(x + i) / n for x in pts for i in range(n)}
    return sorted(pts)


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_vertex_set_matches_word_enumeration(n, m):
    params = FractalParams(0.5, n)
    level = build_level(params, m)
    xs = abscissae(n, m)
    assert level.count == len(xs) == vertex_count(n, m) == (n - 1) * n**m + 1
    assert [Fraction(int(k), level.den) for k in level.k] == xs


@pytest.mark.parametrize("n", [3, 4, 7])
def test_ordinates_match_word_composition(n):
    params = FractalParams(0.45, n)
    m = 2
    level = build_level(params, m)
    for word in product(range(n), repeat=m):
        j = sum(d * n ** (m - 1 - i) for i, d in enumerate(word))
        for p in range(n):
            x, y = apply_word(params, word, fixed_point(params, p))
            idx = j * (n - 1) + p
            assert level.x[idx] == pytest.approx(x, abs=1e-15)
            assert level.y[idx] == pytest.approx(y, abs=1e-12)


def test_fixed_points_are_fixed():
    for params in (REF, FractalParams(0.3, 5)):
        for i in range(params.n_b):
            p = fixed_point(params, i)
            q = apply_contraction(params, i, p)
            assert math.hypot(p[0] - q[0], p[1] - q[1]) <= 1e-14
    assert fixed_point(REF, 1) == pytest.approx((0.5, -2.0))


@given(st.floats(0.01, 0.99), st.integers(3, 12))
def test_junctions_coincide(lam, n):
    if lam * n <= 1:
        return
    params = FractalParams(lam, n)
    for i in range(n - 1):
        a = apply_contraction(params, i, fixed_point(params, n - 1))
        b = apply_contraction(params, i + 1, fixed_point(params, 0))
        assert math.hypot(a[0] - b[0], a[1] - b[1]) <= 1e-12


def test_level_one_reference_vertices():
    level = build_level(REF, 1)
    assert level.count == 7
    idx = 2  # x = 1/3
    assert level.vertex(idx).abscissa == Fraction(1, 3)
    assert level.y[idx] == pytest.approx(0.5, abs=1e-12)
    assert level.powers[idx] == 0.5
    assert neighbors(level, idx) == [1, 3]
    assert list(level.junction_indices) == [2, 4]
    assert list(level.boundary_indices) == [0, 3, 6]
    assert neighbors(level, 0) == [1] and neighbors(level, 6) == [5]


def test_polygons_and_edges():
    level = build_level(REF, 2)
    polys = level.polygons()
    assert len(polys) == 9
    assert all(len(p.vertex_indices) == 3 for p in polys)
    assert polys[4].vertex_indices == (8, 9, 10)
    assert level.edges.shape == (18, 2)
    assert level.word(5) == (1, 2) == word_of_polygon(5, 2, 3)
    covered = sorted({v for p in polys for v in p.vertex_indices})
    assert covered == list(range(level.count))


def test_index_of_coarse_vertex():
    level = build_level(REF, 3)
    idx = level.index_of(1, 2)
    assert level.x[idx] == pytest.approx(1 / 3)
    with pytest.raises(VertexLookupError):
        level.index_of(4, 0)
    with pytest.raises(VertexLookupError):
        level.vertex(10**6)


def test_level_bounds_and_immutability():
    with pytest.raises(DomainError):
        build_level(REF, -1)
    with pytest.raises(DomainError):
        build_level(REF, 13)
    with pytest.raises(DomainError):
        apply_contraction(REF, 3, (0.0, 0.0))
    with pytest.raises(ValueError):
        build_level(REF, 1).y[0] = 1.0


def test_consistency_error_type():
    assert issubclass(ConsistencyError, RuntimeError)


def test_cached_levels_identical():
    assert build_level(REF, 4) is build_level(REF, 4)
    assert np.array_equal(build_level(REF, 4).y, build_level(FractalParams(0.5, 3), 4).y)
