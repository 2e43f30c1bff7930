import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weierstrass_graph import (
    DomainError,
    FractalParams,
    ShapeError,
    assemble_laplacian,
    build_level,
    derived_constants,
    energy,
    gauss_green_residual,
    measure_table,
    normal_derivative,
    renormalized_laplacian_seq,
)
from weierstrass_graph.laplacian import gauss_green_terms, restrict

REF = FractalParams(0.5, 3)


def test_apply_matches_loop():
    rng = np.random.default_rng(0)
    lap = assemble_laplacian(REF, 2)
    u = rng.normal(size=lap.level.count)
    c = 1 / derived_constants(REF).h_m(2) ** 2
    want = [c * (u[i - 1] + u[i + 1] - 2 * u[i]) for i in range(1, 18) if i % 9]
    assert lap.apply(u) == pytest.approx(want, rel=1e-12)
    assert lap.interior.tolist() == [i for i in range(1, 18) if i % 9]


def test_matrix_agrees_with_apply_on_dirichlet_data():
    rng = np.random.default_rng(1)
    for dirichlet in ("v0", "ends"):
        lap = assemble_laplacian(REF, 3, dirichlet)
        u = rng.normal(size=lap.level.count)
        u[lap.pinned] = 0
        assert lap.matrix() @ u[lap.interior] == pytest.approx(lap.apply(u), rel=1e-12)
        dense = lap.matrix().toarray()
        assert np.allclose(dense, dense.T)
        assert np.all(np.linalg.eigvalsh(dense) < 0)


def test_dirichlet_sets():
    lap = assemble_laplacian(REF, 1)
    assert lap.pinned.tolist() == [0, 3, 6]
    assert [s.tolist() for s in lap.segments] == [[1, 2], [4, 5]]
    ends = assemble_laplacian(REF, 1, "ends")
    assert ends.pinned.tolist() == [0, 6]
    assert [s.tolist() for s in ends.segments] == [[1, 2, 3, 4, 5]]
    with pytest.raises(DomainError):
        assemble_laplacian(REF, 1, "cyclic").pinned
    with pytest.raises(DomainError):
        assemble_laplacian(REF, 0)
    with pytest.raises(ShapeError):
        lap.apply(np.ones(3))


def brute_gauss_green(level, u, v):
    n = level.params.n_b
    d = derived_constants(level.params)
    c = n**level.m / d.h_m(level.m) ** 2
    e = sum(c * (u[a] - u[b]) * (v[a] - v[b]) for a, b in level.edges)
    pinned = set(level.boundary_indices.tolist())
    interior = boundary = 0.0
    for x in range(level.count):
        s = sum(u[y] - u[x] for y in level.neighbors(x))
        if x in pinned:
            boundary -= c * v[x] * s
        else:
            interior += c * v[x] * s
    return e, interior, boundary


@pytest.mark.parametrize("params", [REF, FractalParams(0.4, 4)])
def test_gauss_green_terms_against_brute_force(params):
    rng = np.random.default_rng(2)
    for m in (1, 2, 3):
        level = build_level(params, m)
        u, v = rng.normal(size=(2, level.count))
        t = gauss_green_terms(level, u, v)
        e, interior, boundary = brute_gauss_green(level, u, v)
        assert t.energy == pytest.approx(e, rel=1e-12)
        assert t.interior == pytest.approx(interior, rel=1e-10, abs=1e-9)
        assert t.boundary_raw == pytest.approx(boundary, rel=1e-10, abs=1e-9)
        assert t.energy == pytest.approx(energy(level, u, v, "renormalized"), rel=1e-12)


@settings(max_examples=40)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1), st.sampled_from(["v0", "ends"]))
def test_gauss_green_identity(m, seed, dirichlet):
    rng = np.random.default_rng(seed)
    level = build_level(REF, m)
    u, v = rng.normal(size=(2, level.count))
    t = gauss_green_terms(level, u, v, dirichlet)
    assert gauss_green_residual(level, u, v, dirichlet) <= 1e-9 * (1 + abs(t.energy))


def test_weighted_boundary_uses_cells():
    level = build_level(REF, 1)
    u, v = np.arange(7.0) ** 2, np.ones(7)
    t = gauss_green_terms(level, u, v)
    c = 3 / derived_constants(REF).h_m(1) ** 2
    cells = measure_table(level).vertex_cell
    want = c * ((u[0] - u[1]) * cells[0] + (2 * u[3] - u[2] - u[4]) * cells[3] + (u[6] - u[5]) * cells[6]) / 3
    assert t.boundary_weighted == pytest.approx(want, rel=1e-12)


def test_renormalized_sequence_of_linear_function_vanishes():
    seq = renormalized_laplacian_seq(REF, restrict(lambda x, y: 3 * x - 1), 1, 1, range(1, 6))
    assert np.allclose(seq, 0, atol=1e-6)


def test_renormalized_sequence_quadratic_closed_form():
    seq = renormalized_laplacian_seq(REF, restrict(lambda x, y: x**2), 1, 1, range(1, 5))
    d = derived_constants(REF)
    want = [3**m * 2 * d.l_m(m) ** 2 / d.h_m(m) ** 2 for m in range(1, 5)]
    assert seq == pytest.approx(want, rel=1e-9)


def test_renormalized_sequence_rejects_v0():
    with pytest.raises(DomainError):
        renormalized_laplacian_seq(REF, restrict(lambda x, y: x), 1, 3, [2])


def test_normal_derivative_of_constant_converges_to_zero():
    rep = normal_derivative(REF, restrict(lambda x, y: 1.0 + 0 * x), 0, 1, range(1, 6))
    assert rep.converged and rep.value == 0.0
    rep = normal_derivative(REF, restrict(lambda x, y: x), 0, 0, range(1, 4))
    assert len(rep.approximants) == 3
    assert all(a < 0 for a in rep.approximants)
