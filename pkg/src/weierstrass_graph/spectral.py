"""Spectral decimation on Gamma_m.

Eigenvalues are handled in the dimensionless form lt ("lambda tilde"), the
eigenvalue of the stencil 2u(X) - u(Y1) - u(Y2). The recurrence along a
refined edge has characteristic equation r^2 + (lt - 2) r + 1 = 0, whose roots
have product 1. Two regimes occur:

* lt > 4: real negative roots, moduli phi(lt) and 1/phi(lt);
* 0 < lt < 4: lt = 2 - 2 cos(theta), roots exp(+-i theta).

Refining an edge into n_b pieces maps the coarse root to the n_b-th power of
the fine root, which gives lt_fine = phi^-1(phi(lt_coarse)^(1/n_b)) in the
first regime and theta_fine = (theta_coarse + 2 pi j)/n_b in the second.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal

from .errors import DegenerateDiscriminantError, DomainError, ForbiddenEigenvalueError, ResourceError
from .ifs import GraphLevel, build_level
from .laplacian import DiscreteLaplacian
from .params import FractalParams, derived_constants

EIGEN_BUDGET = 20_000
CONVENTIONS = ("graph", "coarse")


def _check_nondegenerate(lt: float) -> None:
    if lt == 0.0 or lt == 4.0:
        raise DegenerateDiscriminantError(f"lambda_tilde = {lt} gives a double characteristic root")


def characteristic_roots(lt: float) -> tuple[complex, complex]:
    """Roots (r1, r2) of r^2 + (lt - 2) r + 1 = 0, r1 taking the minus sign."""
    _check_nondegenerate(lt)
    omega = cmath.sqrt(lt * (lt - 4.0))  # (lt-2)^2 - 4 without cancellation
    r1, r2 = (2.0 - lt - omega) / 2.0, (2.0 - lt + omega) / 2.0
    # real regime: take the small root as the reciprocal of the large one
    if lt > 4.0:
        r2 = 1.0 / r1
    elif lt < 0.0:
        r1 = 1.0 / r2
    return r1, r2


def physical_eigenvalue(params: FractalParams, lt: float, m: int, convention: str = "graph") -> float:
    """Convert lt to the eigenvalue of -Delta_m.

    ``graph`` divides by h_m^2 (the edge weight of Delta_m); ``coarse`` uses
    Lambda_m = h_{m-1}^2 lt, the scaling written in the decimation systems.
    """
    d = derived_constants(params)
    if convention == "graph":
        return lt / d.h_m(m) ** 2
    if convention == "coarse":
        return d.h_m(m - 1) ** 2 * lt
    raise DomainError(f"unknown eigenvalue convention {convention!r}; expected one of {CONVENTIONS}")


@dataclass(frozen=True)
class DecimationState:
    m: int
    lambda_tilde: float
    lambda_physical: float
    epsilon: int
    phase_branch: int
    roots: tuple[complex, complex]
    discriminant: float


def decimation_state(params: FractalParams, lt: float, m: int, epsilon: int = 1,
                     phase_branch: int = 0, convention: str = "graph") -> DecimationState:
    return DecimationState(
        m=m,
        lambda_tilde=lt,
        lambda_physical=physical_eigenvalue(params, lt, m, convention),
        epsilon=epsilon,
        phase_branch=phase_branch,
        roots=characteristic_roots(lt),
        discriminant=(lt - 2.0) ** 2 - 4.0,
    )


def phi(x: float, epsilon: int = 1) -> float:
    """Modulus of a real characteristic root, for x > 4.

    epsilon = +1 selects the root inside the unit disc, epsilon = -1 its
    reciprocal.
    """
    if not x > 4.0:
        raise DomainError(f"phi is defined for x > 4 (branch cut at x = 4), got {x!r}")
    if epsilon not in (1, -1):
        raise DomainError(f"epsilon must be +1 or -1, got {epsilon!r}")
    big = ((x - 2.0) + math.sqrt(x * (x - 4.0))) / 2.0
    return 1.0 / big if epsilon == 1 else big


def phi_inverse(y: float) -> float:
    """(y + 1)^2 / y on (0, 1]; phi_inverse(1) = 4 is the branch point."""
    if not 0.0 < y <= 1.0:
        raise DomainError(f"phi_inverse is defined on (0, 1] (image of the branch cut x > 4), got {y!r}")
    return (y + 1.0) ** 2 / y


def phase(lt: float) -> float:
    """theta in (0, pi) with lt = 2 - 2 cos(theta)."""
    if not 0.0 < lt < 4.0:
        raise DomainError(f"phase needs 0 < lambda_tilde < 4, got {lt!r}")
    return 2.0 * math.asin(math.sqrt(lt) / 2.0)


def from_phase(theta: float) -> float:
    return 4.0 * math.sin(theta / 2.0) ** 2


def decimate_forward(lt: float, n_b: int) -> float:
    """Principal-branch fine-level value from a coarse-level lt."""
    _check_nondegenerate(lt)
    if lt < 0.0:
        raise DomainError(f"lambda_tilde must be positive, got {lt!r}")
    if lt > 4.0:
        return phi_inverse(phi(lt) ** (1.0 / n_b))
    return from_phase(phase(lt) / n_b)


def decimate_sequence(lt0: float, n_b: int, steps: int) -> list[float]:
    out = [lt0]
    for _ in range(steps):
        out.append(decimate_forward(out[-1], n_b))
    return out


def _fold(angle: float) -> float:
    """Representative in [0, pi] of +-angle modulo 2 pi."""
    a = math.fmod(angle, 2.0 * math.pi)
    a = abs(a)
    return 2.0 * math.pi - a if a > math.pi else a


def branch_phases(lt: float, n_b: int) -> list[float]:
    """Folded phases (theta + 2 pi j)/n_b, j = 0..n_b-1; j = 0 is the principal branch."""
    theta = phase(lt)
    return [_fold((theta + 2.0 * math.pi * j) / n_b) for j in range(n_b)]


def inverse_branches(lt: float, n_b: int) -> np.ndarray:
    """Every fine-level lt whose n_b-fold phase multiplication returns ``lt``, ascending."""
    return np.sort([from_phase(t) for t in branch_phases(lt, n_b)])


@dataclass(eq=False)
class EigenPair:
    m: int
    lambda_tilde: float
    eigenfunction: np.ndarray
    residual: float
    segment: int | None = None
    k_index: int | None = None


def eigen_residual(level: GraphLevel, u: np.ndarray, lt: float, dirichlet: str = "v0",
                   where: np.ndarray | None = None) -> float:
    """max |(-Delta_m u)(X) - (lt/h_m^2) u(X)| over interior X (or the subset ``where``)."""
    lap = DiscreteLaplacian(level, dirichlet)
    r = -lap.apply(u) - lt * lap.coefficient * u[lap.interior]
    if where is not None:
        r = r[np.isin(lap.interior, where)]
    return float(np.max(np.abs(r))) if r.size else 0.0


def _check_budget(lap: DiscreteLaplacian, budget: int) -> None:
    if lap.interior.size > budget:
        raise ResourceError(f"{lap.interior.size} interior vertices exceed the eigensolver budget {budget}")


def direct_spectrum(params: FractalParams, m: int, dirichlet: str = "v0",
                    budget: int = EIGEN_BUDGET) -> list[EigenPair]:
    """All eigenpairs of -Delta_m on the interior, one tridiagonal solve per segment."""
    if m < 1:
        raise DomainError(f"spectrum needs m >= 1, got {m}")
    level = build_level(params, m)
    lap = DiscreteLaplacian(level, dirichlet)
    _check_budget(lap, budget)
    pairs = []
    for s, seg in enumerate(lap.segments):
        n = seg.size
        w, vecs = eigh_tridiagonal(np.full(n, 2.0), np.full(n - 1, -1.0))
        for i in range(n):
            u = np.zeros(level.n_vertices)
            u[seg] = vecs[:, i]
            k = round(phase(w[i]) * (n + 1) / math.pi) if 0.0 < w[i] < 4.0 else None
            pairs.append(EigenPair(m, float(w[i]), u, eigen_residual(level, u, w[i], dirichlet), s, k))
    pairs.sort(key=lambda p: (p.lambda_tilde, p.segment))
    return pairs


def direct_eigenvalues(params: FractalParams, m: int, dirichlet: str = "v0",
                       budget: int = 10 * EIGEN_BUDGET) -> list[tuple[int, int, float]]:
    """(segment, k_index, lt) for every eigenvalue, without eigenvectors."""
    level = build_level(params, m)
    lap = DiscreteLaplacian(level, dirichlet)
    _check_budget(lap, budget)
    out = []
    for s, seg in enumerate(lap.segments):
        n = seg.size
        for lt in eigvalsh_tridiagonal(np.full(n, 2.0), np.full(n - 1, -1.0)):
            out.append((s, round(phase(lt) * (n + 1) / math.pi), float(lt)))
    out.sort(key=lambda t: (t[2], t[0]))
    return out


@dataclass(eq=False)
class ExtensionResult:
    eigenpair: EigenPair
    new_point_residual: float
    old_point_residual: float
    coefficients: np.ndarray  # (n_edges, 2) complex (alpha, beta) per refined edge


def extend_eigenfunction(coarse: GraphLevel, u, lt: float, dirichlet: str = "v0") -> ExtensionResult:
    """Fill each refined edge with alpha r1^i + beta r2^i matching the coarse endpoint values."""
    u = np.asarray(u, dtype=float)
    if u.shape != (coarse.n_vertices,):
        raise DomainError(f"function has shape {u.shape}, level {coarse.m} has {coarse.n_vertices} vertices")
    scale = float(np.max(np.abs(u))) if u.size else 0.0
    pinned = DiscreteLaplacian(coarse, dirichlet).pinned
    if np.max(np.abs(u[pinned])) > 1e-12 * max(scale, 1.0):
        raise DomainError("eigenfunction extension needs u to vanish on the Dirichlet set")
    n = coarse.params.n_b
    r1, r2 = characteristic_roots(lt)
    p1, p2 = r1**n, r2**n
    det = p2 - p1
    if abs(det) <= 1e-12 * max(1.0, abs(p1), abs(p2)):
        raise ForbiddenEigenvalueError(
            f"lambda_tilde = {lt!r}: r1^{n} = r2^{n}, the endpoint system is singular"
        )
    a, b = u[:-1].astype(complex), u[1:].astype(complex)
    beta = (b - a * p1) / det
    alpha = a - beta
    i = np.arange(1, n)
    inner = alpha[:, None] * r1 ** i[None, :] + beta[:, None] * r2 ** i[None, :]
    imag = float(np.max(np.abs(inner.imag))) if inner.size else 0.0
    if imag > 1e-8 * max(scale, 1.0):
        raise DomainError(f"extension is not real (imaginary part {imag:.3e})")
    fine = build_level(coarse.params, coarse.m + 1)
    out = np.empty(fine.n_vertices)
    out[::n] = u
    out[:-1].reshape(-1, n)[:, 1:] = inner.real
    old = np.arange(0, fine.n_vertices, n)
    new = np.setdiff1d(np.arange(fine.n_vertices), old)
    res_new = eigen_residual(fine, out, lt, dirichlet, where=new)
    res_old = eigen_residual(fine, out, lt, dirichlet, where=old)
    pair = EigenPair(fine.m, lt, out, max(res_new, res_old))
    return ExtensionResult(pair, res_new, res_old, np.stack([alpha, beta], axis=1))


@dataclass
class DecimationClosure:
    m: int
    matched: list[tuple[int, float]]
    exceptional: list[tuple[int, float]]

    @property
    def exceptional_k(self) -> list[int]:
        return sorted({k for k, _ in self.exceptional})


def decimation_closure(params: FractalParams, m: int, tol: float = 1e-9,
                       dirichlet: str = "v0") -> DecimationClosure:
    """Split the level-m spectrum into values reached by inverse branches of level m-1 and the rest."""
    if m < 2:
        raise DomainError(f"closure needs a coarse level with interior, m >= 2, got {m}")
    coarse = sorted({round(lt, 12) for _, _, lt in direct_eigenvalues(params, m - 1, dirichlet)})
    images = np.sort(np.concatenate([inverse_branches(lt, params.n_b) for lt in coarse]))
    matched, exceptional = [], []
    for _, k, lt in direct_eigenvalues(params, m, dirichlet):
        j = np.searchsorted(images, lt)
        near = images[max(j - 1, 0): j + 1]
        hit = near.size and np.min(np.abs(near - lt)) <= tol
        (matched if hit else exceptional).append((k, lt))
    return DecimationClosure(m, matched, exceptional)


def physical_ladder(params: FractalParams, lts: list[float], m0: int, convention: str = "coarse") -> list[float]:
    """n_b^m Lambda_m for the sequence lts starting at level m0."""
    return [params.n_b ** (m0 + i) * physical_eigenvalue(params, lt, m0 + i, convention)
            for i, lt in enumerate(lts)]
