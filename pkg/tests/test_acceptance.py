"""Acceptance criteria 1-10, each against an oracle independent of the library.

A per-criterion PASS/FAIL summary is printed at the end of the session.
"""

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from weierstrass_graph import (
    FractalParams,
    apply_contraction,
    build_level,
    check_bounds,
    decimate_forward,
    direct_spectrum,
    energy,
    extend_eigenfunction,
    harmonic_extension,
    integrate,
    inverse_branches,
    lower_constant,
    markov_truncate,
    phi,
    phi_inverse,
    spline_basis,
    upper_constant,
    weierstrass_eval,
)
from weierstrass_graph.energy import EnergyMode
from weierstrass_graph.ifs import fixed_point
from weierstrass_graph.laplacian import gauss_green_terms

REF = FractalParams(0.5, 3)


def series(params, k, den, tol=1e-10):
    """Weierstrass partial sum at k/den with exact integer phase reduction."""
    lam, n = params.lam, params.n_b
    order = 0
    while lam ** (order + 1) / (1 - lam) > tol:
        order += 1
    total = 0.0
    for j in range(order + 1):
        total += lam**j * math.cos(2 * math.pi * ((k * n**j) % den) / den)
    return total


def shoelace(xs, ys):
    """Exact area of the polygon with these binary64 vertices."""
    xs = [Fraction(float(v)) for v in xs]
    ys = [Fraction(float(v)) for v in ys]
    n = len(xs)
    return abs(sum(xs[i] * ys[(i + 1) % n] - xs[(i + 1) % n] * ys[i] for i in range(n))) / 2


def cell_measures(level):
    """A_m per vertex, from polygon areas normalized by the level-0 area."""
    n = level.params.n_b
    base = build_level(level.params, 0)
    ref = shoelace(list(base.x), list(base.y))
    poly = []
    for j in range(n**level.m):
        idx = range(j * (n - 1), j * (n - 1) + n)
        poly.append(float(shoelace([level.x[i] for i in idx], [level.y[i] for i in idx]) / ref))
    cells = np.zeros(level.n_vertices)
    for i in range(level.n_vertices):
        owners = {min(i // (n - 1), n**level.m - 1)}
        if i % (n - 1) == 0 and 0 < i < level.n_vertices - 1:
            owners = {i // (n - 1) - 1, i // (n - 1)}
        cells[i] = sum(poly[j] for j in owners) / len(owners)
    return cells


# 1

@pytest.mark.parametrize("n_b", [3, 4, 5, 7])
def test_c01_vertex_count_law(criteria, n_b):
    params = FractalParams(0.5, n_b)
    start = time.perf_counter()
    bad = [(m, build_level(params, m).count, 2 * n_b**m + n_b - 2)
           for m in range(9) if build_level(params, m).count != 2 * n_b**m + n_b - 2]
    elapsed = time.perf_counter() - start
    detail = f"{len(bad)} mismatching levels" + (f", first m={bad[0][0]}: {bad[0][1]} vs {bad[0][2]}"
                                                            if bad else "") + f", {elapsed:.2f} s"
    assert criteria.record(1, f"N_b={n_b}", not bad and elapsed < 5.0, detail), detail


# 2

def test_c02_junction_identity(criteria):
    rng = np.random.default_rng(20)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(3, 10))
        params = FractalParams(float(rng.uniform(1 / n + 0.01, 0.95)), n)
        for i in range(n - 1):
            a = apply_contraction(params, i, fixed_point(params, n - 1))
            b = apply_contraction(params, i + 1, fixed_point(params, 0))
            worst = max(worst, math.hypot(a[0] - b[0], a[1] - b[1]))
    assert criteria.record(2, "junction", worst <= 1e-12, f"max gap {worst:.3e}"), worst


# 3

def test_c03_curve_membership(criteria):
    worst = 0.0
    for m in range(7):
        level = build_level(REF, m)
        w = np.array([series(REF, int(k), level.den) for k in level.k])
        worst = max(worst, float(np.max(np.abs(level.y - w))))
        lib = np.array([weierstrass_eval(REF, Fraction(int(k), level.den), tol=1e-10) for k in level.k[::7]])
        worst = max(worst, float(np.max(np.abs(lib - w[::7]))))
    with mpmath.workdps(40):
        exact = mpmath.nsum(lambda n: mpmath.mpf(0.5) ** n * mpmath.cospi(2 * mpmath.mpf(3) ** n / 3), [0, 200])
    third = weierstrass_eval(REF, Fraction(1, 3), tol=1e-14)
    ok = worst <= 1e-9 and abs(third - 0.5) <= 1e-12 and abs(float(exact) - 0.5) <= 1e-15
    detail = f"max |y - W(x)| {worst:.2e}, W(1/3) - 1/2 = {third - 0.5:.2e}"
    assert criteria.record(3, "membership", ok, detail), detail


# 4

def test_c04_dirichlet_form_axioms(criteria):
    rng = np.random.default_rng(4)
    negative = zero_bad = markov_bad = 0
    for m in range(1, 6):
        level = build_level(REF, m)
        for _ in range(100):
            u = rng.uniform(-0.5, 1.5, level.n_vertices)
            const = np.full(level.n_vertices, rng.uniform(-3, 3))
            for mode in EnergyMode:
                e = energy(level, u, mode=mode)
                negative += e < 0
                zero_bad += (e <= 1e-12) + (abs(energy(level, const, mode=mode)) > 1e-12)
                markov_bad += energy(level, np.clip(u, 0, 1), mode=mode) > e
                markov_bad += energy(level, markov_truncate(u), mode=mode) > e
    ok = negative == zero_bad == markov_bad == 0
    detail = f"{negative} negative, {zero_bad} zero/constant mismatches, {markov_bad} Markov violations"
    assert criteria.record(4, "axioms", ok, detail), detail


# 5

def test_c05_harmonic_extension_ratio(criteria):
    rng = np.random.default_rng(5)
    worst = 0.0
    for params in (REF, FractalParams(0.4, 4), FractalParams(0.3, 5), FractalParams(0.8, 3)):
        for m in range(1, 6):
            level = build_level(params, m)
            u = rng.normal(size=level.n_vertices)
            ratio = energy(build_level(params, m + 1), harmonic_extension(level, u)) / energy(level, u)
            worst = max(worst, abs(ratio * params.n_b * params.lam**2 - 1))
    exact = 0.0
    for m in range(1, 6):
        level = build_level(REF, m)
        u = rng.normal(size=level.n_vertices)
        fill = [u[i] + (u[i + 1] - u[i]) * t / 3 for i in range(len(u) - 1) for t in range(3)] + [u[-1]]
        h2 = (1 / (2 * 3**m)) ** (2 * math.log(2) / math.log(3))
        oracle = sum((b - a) ** 2 for a, b in zip(fill, fill[1:])) / (h2 / 4)
        exact = max(exact, abs(oracle / energy(level, u) - 4 / 3),
                    float(np.max(np.abs(harmonic_extension(level, u) - fill))))
    ok = worst <= 1e-10 and exact <= 1e-10
    detail = f"max rel err of ratio {worst:.2e}; closed-form 4/3 oracle err {exact:.2e}"
    assert criteria.record(5, "ratio", ok, detail), detail


# 6

def test_c06_gauss_green(criteria):
    rng = np.random.default_rng(6)
    worst = 0.0
    for m in range(1, 6):
        level = build_level(REF, m)
        for _ in range(100):
            u, v = rng.normal(size=(2, level.n_vertices))
            t = gauss_green_terms(level, u, v)
            worst = max(worst, t.residual / (1 + abs(t.energy)))
    assert criteria.record(6, "Gauss-Green", worst <= 1e-9, f"max scaled residual {worst:.2e}"), worst


# 7

def test_c07_spline_measure_identity(criteria):
    worst = 0.0
    for m in range(5):
        level = build_level(REF, m)
        cells = cell_measures(level)
        for idx in range(level.n_vertices):
            got = integrate(spline_basis(level, idx), level)
            worst = max(worst, abs(got - cells[idx] / 3) / (cells[idx] / 3))
    assert criteria.record(7, "spline", worst <= 1e-14, f"max rel err {worst:.2e}"), worst


# 8

def _independent_lower(lam, n):
    smallest = min(abs(math.sin(math.pi * (2 * j + 1) / (n - 1))) for j in range(n))
    return 2 / (1 - lam) * math.sin(math.pi / (n - 1)) * smallest - 2 * math.pi / (n * (n - 1) * (lam * n - 1))


def test_c08_bound_constants(criteria):
    lo, hi = lower_constant(REF), upper_constant(REF)
    ok = (abs(lo / 1.9056 - 1) <= 1e-3 and abs(hi / 59.105 - 1) <= 1e-3
          and abs(lo - _independent_lower(0.5, 3)) <= 1e-14)
    detail = f"lower {lo:.6f}, eta_W {hi:.6f}"
    assert criteria.record(8, "constants", ok, detail), detail


@pytest.mark.parametrize("m", range(7))
def test_c08_cell_heights_within_bounds(criteria, m):
    level = build_level(REF, m)
    w = np.array([series(REF, int(k), level.den, tol=1e-13) for k in level.k])
    heights = np.abs(np.diff(w))
    lo = _independent_lower(0.5, 3) * 0.5**m
    hi = upper_constant(REF) * 0.5**m
    below, above = int(np.sum(heights < lo)), int(np.sum(heights > hi))
    report = check_bounds(REF, m)
    consistent = len(report.violations) == below + above
    detail = (f"{below} heights below {lo:.5g} (min {heights.min():.5g}), "
              f"{above} above {hi:.5g}")
    assert criteria.record(8, f"m={m}", below == above == 0 and consistent, detail), detail


# 9

def test_c09_spectral_oracle(criteria):
    lv1 = sorted(p.lambda_tilde for p in direct_spectrum(REF, 1))
    err1 = max(abs(a - b) for a, b in zip(lv1, [1, 1, 3, 3]))
    lv2 = sorted(p.lambda_tilde for p in direct_spectrum(REF, 2))
    closed = sorted(2 - 2 * math.cos(k * math.pi / 9) for k in range(1, 9) for _ in range(2))
    err2 = max(abs(a - b) for a, b in zip(lv2, closed)) if len(lv2) == len(closed) else math.inf
    images = np.concatenate([inverse_branches(lt, 3) for lt in (1.0, 3.0)])
    unmatched = sorted(k for k in range(1, 9)
                       if np.min(np.abs(images - (2 - 2 * math.cos(k * math.pi / 9)))) > 1e-9)
    coarse = build_level(REF, 1)
    res = max(extend_eigenfunction(coarse, p.eigenfunction, float(lt)).new_point_residual
              for p in direct_spectrum(REF, 1) for lt in inverse_branches(p.lambda_tilde, 3))
    ok = err1 <= 1e-9 and err2 <= 1e-9 and unmatched == [3, 6] and res <= 1e-10
    detail = f"level-1 err {err1:.1e}, level-2 err {err2:.1e}, exceptional k {unmatched}, extension residual {res:.1e}"
    assert criteria.record(9, "spectrum", ok, detail), detail


# 10

def test_c10_phi_roundtrip_and_iterates(criteria):
    grid = 4 + np.geomspace(1e-6, 1e6 - 4, 10_000)
    worst = max(abs(phi_inverse(phi(float(x))) - x) / x for x in grid)
    monotone = True
    for start in (5.0, 6.0, 50.0):
        seq = [start]
        while seq[-1] - 4 > 1e-10 and len(seq) < 60:
            seq.append(decimate_forward(seq[-1], 3))
        monotone &= all(b < a for a, b in zip(seq, seq[1:])) and abs(seq[-1] - 4) <= 1e-10
    with mpmath.workdps(40):
        y = mpmath.cbrt(2 - mpmath.sqrt(3))
        oracle = float((y + 1) ** 2 / y)
    got = decimate_forward(6.0, 3)
    ok = worst <= 1e-10 and monotone and abs(got - oracle) <= 1e-12
    detail = f"round-trip rel err {worst:.1e}, iterates monotone to 4: {monotone}, forward(6) {got:.10f} vs {oracle:.10f}"
    assert criteria.record(10, "map", ok, detail), detail


def test_c10_stated_forward_value(criteria):
    got = decimate_forward(6.0, 3)
    detail = f"decimate_forward(6) = {got:.10f}, stated 4.19625 +- 1e-4, off by {abs(got - 4.19625):.2e}"
    assert criteria.record(10, "stated value", abs(got - 4.19625) <= 1e-4, detail), detail
