"""Invariant suite behind the ``verify`` subcommand.

Every check compares the library against an independent closed form or an
algebraic identity and reports one line. Parameter sets are fixed (they do
not follow the command-line flags) and the random draws are seeded.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import ifs
from .bounds import check_bounds, lower_constant, upper_constant
from .energy import EnergyMode, energy, harmonic_extension, markov_truncate, spline_basis
from .ifs import apply_contraction, build_level, fixed_point
from .laplacian import gauss_green_terms
from .measure import integrate, measure_table
from .params import FractalParams, weierstrass_eval, weierstrass_on_grid
from .spectral import (
    decimate_forward,
    decimation_closure,
    direct_spectrum,
    extend_eigenfunction,
    inverse_branches,
    phi,
    phi_inverse,
)

REFERENCE = FractalParams(0.5, 3)


@dataclass(frozen=True)
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.criterion:>2} {self.name}: {self.detail}"


def _random_params(rng: np.random.Generator, count: int) -> list[FractalParams]:
    out = []
    for _ in range(count):
        n = int(rng.integers(3, 12))
        lam = float(rng.uniform(1.0 / n + 0.01, 0.95))
        out.append(FractalParams(lam, n))
    return out


def vertex_count_law(seed: int) -> list[CheckResult]:
    out = []
    start = time.perf_counter()
    for n in (3, 4, 5, 7):
        params = FractalParams(0.5, n)
        bad = []
        for m in range(9):
            got = build_level(params, m).count
            want = 2 * n**m + n - 2
            if got != want:
                bad.append(f"m={m}: {got} != {want}")
        ifs._build.cache_clear()
        out.append(CheckResult(1, f"vertex count 2N^m+N-2, N_b={n}", not bad,
                               "m=0..8 exact" if not bad else "; ".join(bad[:3]) + f" ({len(bad)} levels)"))
    elapsed = time.perf_counter() - start
    out.append(CheckResult(1, "vertex count timing", elapsed < 5.0, f"{elapsed:.2f} s (limit 5 s)"))
    return out


def junction_identity(seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for params in _random_params(rng, 20):
        n = params.n_b
        for i in range(n - 1):
            a = apply_contraction(params, i, fixed_point(params, n - 1))
            b = apply_contraction(params, i + 1, fixed_point(params, 0))
            worst = max(worst, math.hypot(a[0] - b[0], a[1] - b[1]))
    return [CheckResult(2, "junction identity", worst <= 1e-12, f"max gap {worst:.3e} (tol 1e-12)")]


def curve_membership(seed: int) -> list[CheckResult]:
    worst = 0.0
    for m in range(7):
        level = build_level(REFERENCE, m)
        w = weierstrass_on_grid(REFERENCE, level.k, level.den, tol=1e-10)
        worst = max(worst, float(np.max(np.abs(level.y - w))))
    third = weierstrass_eval(REFERENCE, Fraction(1, 3), tol=1e-14)
    return [
        CheckResult(3, "vertices on the curve", worst <= 1e-9, f"max |y - W(x)| {worst:.3e} (tol 1e-9), m<=6"),
        CheckResult(3, "W(1/3) = 1/2", abs(third - 0.5) <= 1e-12, f"W(1/3) = {third!r}"),
    ]


def dirichlet_axioms(seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    negative = zero_bad = markov_bad = 0
    for m in range(1, 6):
        level = build_level(REFERENCE, m)
        for _ in range(100):
            u = rng.uniform(-0.5, 1.5, level.n_vertices)
            c = float(rng.uniform(-2.0, 2.0))
            for mode in EnergyMode:
                e = energy(level, u, mode=mode)
                negative += e < 0.0
                zero_bad += e <= 1e-12
                zero_bad += abs(energy(level, np.full(level.n_vertices, c), mode=mode)) > 1e-12
                markov_bad += energy(level, markov_truncate(u), mode=mode) > e
    return [
        CheckResult(4, "energy non-negative", negative == 0, f"{negative} negative values"),
        CheckResult(4, "zero energy iff constant", zero_bad == 0, f"{zero_bad} mismatches (tol 1e-12)"),
        CheckResult(4, "Markov inequality", markov_bad == 0, f"{markov_bad} violations"),
    ]


def _linear_fill(u: np.ndarray, n: int) -> np.ndarray:
    t = np.arange(n) / n
    inner = u[:-1, None] * (1.0 - t[None, :]) + u[1:, None] * t[None, :]
    return np.append(inner.ravel(), u[-1])


def harmonic_ratio(seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for params in [REFERENCE] + _random_params(rng, 4):
        expected = 1.0 / (params.n_b * params.lam**2)
        for m in range(1, 6):
            level = build_level(params, m)
            if level.n_vertices > 200_000:
                continue
            u = rng.normal(size=level.n_vertices)
            fine = build_level(params, m + 1)
            ratio = energy(fine, harmonic_extension(level, u)) / energy(level, u)
            worst = max(worst, abs(ratio / expected - 1.0))
    oracle = 0.0
    for m in range(1, 6):
        level = build_level(REFERENCE, m)
        u = rng.normal(size=level.n_vertices)
        ext = harmonic_extension(level, u)
        oracle = max(oracle, float(np.max(np.abs(ext - _linear_fill(u, 3)))))
    return [
        CheckResult(5, "extension energy ratio 1/(N_b lam^2)", worst <= 1e-10, f"max rel err {worst:.3e}"),
        CheckResult(5, "extension = per-segment linear fill", oracle <= 1e-12, f"max abs err {oracle:.3e}"),
    ]


def gauss_green(seed: int) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in range(1, 6):
        level = build_level(REFERENCE, m)
        for _ in range(100):
            u = rng.normal(size=level.n_vertices)
            v = rng.normal(size=level.n_vertices)
            t = gauss_green_terms(level, u, v)
            worst = max(worst, t.residual / (1.0 + abs(t.energy)))
    return [CheckResult(6, "discrete Gauss-Green", worst <= 1e-9, f"max scaled residual {worst:.3e}")]


def spline_measure(seed: int) -> list[CheckResult]:
    worst = 0.0
    for m in range(5):
        level = build_level(REFERENCE, m)
        cells = measure_table(level).vertex_cell
        for idx in range(level.n_vertices):
            got = integrate(spline_basis(level, idx), level)
            want = cells[idx] / REFERENCE.n_b
            worst = max(worst, abs(got - want) / abs(want))
    return [CheckResult(7, "integral of spline = A_m/N_b", worst <= 1e-14, f"max rel err {worst:.3e}")]


def height_bounds(seed: int) -> list[CheckResult]:
    lo, hi = lower_constant(REFERENCE), upper_constant(REFERENCE)
    out = [
        CheckResult(8, "lower constant", abs(lo / 1.9056 - 1.0) <= 1e-3, f"{lo:.6f} vs 1.9056"),
        CheckResult(8, "upper constant", abs(hi / 59.105 - 1.0) <= 1e-3, f"{hi:.6f} vs 59.105"),
    ]
    for m in range(7):
        rep = check_bounds(REFERENCE, m)
        below = sum(v.height < rep.lower for v in rep.violations)
        above = len(rep.violations) - below
        out.append(CheckResult(
            8, f"cell heights within bounds, m={m}", not rep.violations,
            f"{below} below {rep.lower:.6g}, {above} above {rep.upper:.6g}, "
            f"heights in [{rep.min_height:.6g}, {rep.max_height:.6g}]",
        ))
    return out


def spectral_oracle(seed: int) -> list[CheckResult]:
    out = []
    lv1 = sorted(p.lambda_tilde for p in direct_spectrum(REFERENCE, 1))
    err1 = float(np.max(np.abs(np.array(lv1) - [1.0, 1.0, 3.0, 3.0])))
    out.append(CheckResult(9, "level-1 spectrum {1,1,3,3}", err1 <= 1e-9, f"max err {err1:.3e}"))
    lv2 = direct_spectrum(REFERENCE, 2)
    closed = np.sort(np.repeat(2.0 - 2.0 * np.cos(np.arange(1, 9) * np.pi / 9.0), 2))
    err2 = float(np.max(np.abs(np.sort([p.lambda_tilde for p in lv2]) - closed)))
    out.append(CheckResult(9, "level-2 spectrum 2-2cos(k pi/9)", err2 <= 1e-9, f"max err {err2:.3e}"))
    closure = decimation_closure(REFERENCE, 2, tol=1e-9)
    ks = closure.exceptional_k
    out.append(CheckResult(9, "exceptional set at level 2", ks == [3, 6],
                           f"exceptional k {ks}, {len(closure.matched)} matched"))
    worst = 0.0
    coarse = build_level(REFERENCE, 1)
    for pair in direct_spectrum(REFERENCE, 1):
        for lt in inverse_branches(pair.lambda_tilde, REFERENCE.n_b):
            worst = max(worst, extend_eigenfunction(coarse, pair.eigenfunction, float(lt)).new_point_residual)
    out.append(CheckResult(9, "eigenfunction extension", worst <= 1e-10, f"max new-point residual {worst:.3e}"))
    return out


def decimation_map(seed: int) -> list[CheckResult]:
    grid = 4.0 + np.geomspace(1e-6, 1e6 - 4.0, 10_000)
    worst = max(abs(phi_inverse(phi(float(x))) / x - 1.0) for x in grid)
    out = [CheckResult(10, "phi_inverse(phi(x)) = x", worst <= 1e-10, f"max rel err {worst:.3e} on (4, 1e6]")]
    y = (2.0 - math.sqrt(3.0)) ** (1.0 / 3.0)
    closed = (y + 1.0) ** 2 / y
    got = decimate_forward(6.0, 3)
    out.append(CheckResult(10, "decimate_forward(6) closed form", abs(got - closed) <= 1e-12,
                           f"{got!r} vs {closed!r}"))
    out.append(CheckResult(10, "decimate_forward(6) = 4.19625 +- 1e-4", abs(got - 4.19625) <= 1e-4,
                           f"{got!r}, off by {abs(got - 4.19625):.3e}"))
    for start in (5.0, 6.0, 50.0):
        seq = [start]
        while seq[-1] - 4.0 > 1e-10 and len(seq) < 60:
            seq.append(decimate_forward(seq[-1], 3))
        monotone = all(b < a for a, b in zip(seq, seq[1:]))
        close = abs(seq[-1] - 4.0) <= 1e-10
        out.append(CheckResult(10, f"iterates from {start:g} decrease to 4", monotone and close,
                               f"{len(seq) - 1} steps, last {seq[-1]!r}"))
    return out


SUITE = (
    vertex_count_law,
    junction_identity,
    curve_membership,
    dirichlet_axioms,
    harmonic_ratio,
    gauss_green,
    spline_measure,
    height_bounds,
    spectral_oracle,
    decimation_map,
)


def run_suite(seed: int = 0) -> list[CheckResult]:
    results = []
    for check in SUITE:
        results.extend(check(seed))
    return results
