"""Cayley's criterion: Taylor coefficients of sqrt(det(tC + D)) and their Hankel determinants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .errors import BadOrder, BranchPole, NotTransverse, SamplingExhausted, SingularConic
from .numeric import DEFAULT_TOL, Tolerance, max_modulus_normalize, principal_sqrt
from .pencil import (
    Conic,
    ConicPair,
    as_conic,
    as_pair,
    is_transverse,
    random_symmetric,
    require_transverse,
    sigma_coefficients,
    solve_binary_quadratic,
)


@dataclass(frozen=True)
class CayleySeries:
    """A_0..A_K with (sum A_k t^k)^2 = det(tC + D) up to order K."""

    coefficients: np.ndarray
    branch: int  # +1: A_0 is the principal root of s03, -1: its negative

    def __getitem__(self, k):
        return self.coefficients[k]

    def __len__(self):
        return len(self.coefficients)

    def squared(self) -> np.ndarray:
        """Coefficients of the truncated square, orders 0..K."""
        A = self.coefficients
        return np.convolve(A, A)[: len(A)]


def sqrt_series(sigma, K: int, branch: int = 1) -> CayleySeries:
    """Taylor coefficients of sqrt(s30 t^3 + s21 t^2 + s12 t + s03) at t = 0."""
    if K < 0:
        raise ValueError("K must be non-negative")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    s30, s21, s12, s03 = (complex(s) for s in sigma)
    if s03 == 0:
        raise BranchPole("det(D) = 0: sqrt(det(tC + D)) is not analytic at t = 0")
    by_power = [s03, s12, s21, s30]
    A = np.zeros(K + 1, dtype=complex)
    A[0] = branch * principal_sqrt(s03)
    for k in range(1, K + 1):
        sk = by_power[k] if k <= 3 else 0.0
        A[k] = (sk - np.dot(A[1:k], A[k - 1 : 0 : -1])) / (2 * A[0])
    return CayleySeries(coefficients=A, branch=branch)


def gamma_from_sigma(sigma) -> complex:
    """-s12^2 + 4 s03 s21; ints and Fractions stay exact."""
    if all(isinstance(s, (int, Fraction)) for s in sigma):
        s30, s21, s12, s03 = (Fraction(s) for s in sigma)
    else:
        s30, s21, s12, s03 = (complex(s) for s in sigma)
    return -(s12**2) + 4 * s03 * s21


def cayley_gamma(pair, tol: Tolerance = DEFAULT_TOL) -> complex:
    """Left-hand side of the triangle Cayley equation, -s12^2 + 4 s03 s21."""
    pair = require_transverse(as_pair(pair), tol, error=NotTransverse)
    return gamma_from_sigma(pair.sigma)


def gamma_threshold(pair, tol: Tolerance = DEFAULT_TOL) -> float:
    """rel_eps * |C|^2 |D|^4, matching the bidegree (2, 4) of gamma."""
    pair = as_pair(pair)
    return tol.rel_eps * np.linalg.norm(pair.C.matrix) ** 2 * np.linalg.norm(pair.D.matrix) ** 4


def hankel_matrix(series: CayleySeries, n: int) -> np.ndarray:
    if n < 3:
        raise BadOrder(f"polygon order must be >= 3, got {n}")
    A = series.coefficients
    if n % 2:
        m, offset = (n - 1) // 2, 2
    else:
        m, offset = n // 2 - 1, 3
    need = offset + 2 * (m - 1)
    if need >= len(A):
        raise ValueError(f"series too short: need A_{need}, have up to A_{len(A) - 1}")
    idx = np.add.outer(np.arange(m), np.arange(m)) + offset
    return A[idx]


def default_order(n: int) -> int:
    return 2 * (n // 2) + 1


@dataclass(frozen=True)
class CayleyVerdict:
    n: int
    gamma: complex
    hankel: complex
    satisfied: bool
    threshold: float


def cayley_condition_n(pair, n: int = 3, tol: Tolerance = DEFAULT_TOL) -> CayleyVerdict:
    """Cayley's determinant test for an n-gon inscribed in C and circumscribed about D.

    For n = 3 the verdict uses gamma (branch free); for other n the Hankel
    determinant of the max-modulus normalized pair is compared against
    rel_eps * max|A_k|^size.
    """
    if n < 3:
        raise BadOrder(f"polygon order must be >= 3, got {n}")
    pair = require_transverse(as_pair(pair), tol, error=NotTransverse)
    K = default_order(n)
    series = sqrt_series(pair.sigma, K)
    hankel = complex(np.linalg.det(hankel_matrix(series, n)))
    gamma = gamma_from_sigma(pair.sigma)
    if n == 3:
        threshold = float(gamma_threshold(pair, tol))
        satisfied = abs(gamma) < threshold
    else:
        norm_series = sqrt_series(pair.normalized().sigma, K)
        H = hankel_matrix(norm_series, n)
        threshold = float(tol.rel_eps * max(1.0, float(np.max(np.abs(H)))) ** H.shape[0])
        satisfied = abs(np.linalg.det(H)) < threshold
    return CayleyVerdict(n=n, gamma=gamma, hankel=hankel, satisfied=bool(satisfied), threshold=threshold)


def trivialize_psi(D, C) -> np.ndarray:
    """Matrix with columns D^-1 c_1, D^-1 c_2, D^-1 c_3 (the map C -> D^-1 C)."""
    D = as_conic(D)
    if D.is_degenerate():
        raise SingularConic("D must be non-degenerate")
    return np.linalg.solve(D.matrix, np.asarray(getattr(C, "matrix", C), dtype=complex))


def untrivialize_psi(D, E) -> np.ndarray:
    """Inverse of :func:`trivialize_psi`: columns D e_1, D e_2, D e_3."""
    return as_conic(D).matrix @ np.asarray(E, dtype=complex)


def fiber_quadric(E) -> complex:
    """Cayley quadric of the fiber over the identity, evaluated at E.

    -sum e_ii^2 + 2 sum_{i<j} e_ii e_jj - 4 sum_{i<j} e_ij e_ji.  On symmetric
    E this is the familiar form with squared off-diagonal entries; the
    e_ij e_ji form equals -tr(E)^2 + 4 e_2(E) and so also holds for the
    non-symmetric images D^-1 C.
    """
    E = np.asarray(E, dtype=complex)
    d = np.diag(E)
    off = E[0, 1] * E[1, 0] + E[0, 2] * E[2, 0] + E[1, 2] * E[2, 1]
    return complex(
        -np.sum(d**2) + 2 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]) - 4 * off
    )


def fiber_quadric_symmetric(E) -> complex:
    """Same quadric written with squared off-diagonal entries (symmetric E only)."""
    E = np.asarray(E, dtype=complex)
    d = np.diag(E)
    return complex(
        -np.sum(d**2)
        + 2 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2])
        - 4 * (E[0, 1] ** 2 + E[0, 2] ** 2 + E[1, 2] ** 2)
    )


def quadric_residual(D, C) -> float:
    """|fiber_quadric| of the max-modulus normalized image of C under psi_D."""
    return abs(fiber_quadric(max_modulus_normalize(trivialize_psi(D, C))))


def _gamma_on_line(D: np.ndarray, C0: np.ndarray, C1: np.ndarray):
    """Coefficients (a, b, c) with gamma(s C0 + t C1, D) = a s^2 + 2 b s t + c t^2."""
    a = gamma_from_sigma(sigma_coefficients(C0, D))
    c = gamma_from_sigma(sigma_coefficients(C1, D))
    apb = gamma_from_sigma(sigma_coefficients(C0 + C1, D))
    return a, (apb - a - c) / 2, c


def cayley_points_on_line(D, C0, C1, tol: Tolerance = DEFAULT_TOL) -> list[Conic]:
    """Cayley conics on the line of CP^5 through C0 and C1 (fixed D).

    Returns an empty list when the restricted quadratic is degenerate (a
    double root or identically zero); hits that are degenerate conics, not
    transverse to D, or fail the normalized |gamma| < 1e-9 check are dropped.
    """
    D = as_conic(D)
    Dn = D.normalized().matrix
    C0 = np.asarray(C0, dtype=complex)
    C1 = np.asarray(C1, dtype=complex)
    a, b, c = _gamma_on_line(Dn, C0, C1)
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0 or abs(b * b - a * c) <= tol.rel_eps * scale**2:
        return []
    out = []
    for s, t in solve_binary_quadratic(a, b, c):
        M = s * C0 + t * C1
        try:
            Cn = Conic(M).normalized()
        except ValueError:
            continue
        if Cn.is_degenerate(tol):
            continue
        pair = ConicPair(Cn, Dn)
        if not is_transverse(pair, tol=tol):
            continue
        if abs(gamma_from_sigma(pair.sigma)) >= 1e-9:
            continue
        out.append(Cn)
    return out


def _random_lines(rng: np.random.Generator) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    while True:
        yield random_symmetric(rng), random_symmetric(rng)


def sample_cayley(
    D,
    seed: int = 42,
    count: int = 10,
    tol: Tolerance = DEFAULT_TOL,
    lines: Iterable[tuple[np.ndarray, np.ndarray]] | None = None,
) -> list[Conic]:
    """Draw ``count`` conics C with gamma(C, D) = 0 by cutting the fiber quadric with random lines.

    ``lines`` replaces the seeded complex-Gaussian line source (used in tests).
    """
    D = as_conic(D)
    if D.is_degenerate(tol):
        raise SingularConic("D must be non-degenerate")
    source = iter(lines) if lines is not None else _random_lines(np.random.default_rng(seed))
    found: list[Conic] = []
    rejections = 0
    while len(found) < count:
        try:
            C0, C1 = next(source)
        except StopIteration:
            raise SamplingExhausted("line source ran out before enough samples were found")
        hits = cayley_points_on_line(D, C0, C1, tol)
        if not hits:
            rejections += 1
            if rejections >= 1000:
                raise SamplingExhausted("1000 consecutive lines produced no Cayley conic")
            continue
        rejections = 0
        found.extend(hits[: count - len(found)])
    return found
