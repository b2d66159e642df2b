"""Conics as symmetric matrices, the pencil cubic and its invariants."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegeneratePencil, SingularConic
from .numeric import (
    DEFAULT_TOL,
    ProjPoint,
    Tolerance,
    adjugate3,
    as_matrix,
    kernel_vector,
    max_modulus_normalize,
    pencil_cubic,
    principal_sqrt,
    scale_normalize,
    solve_cubic,
)

# position of x_0..x_5 in the upper triangle
_COORD_INDEX = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))


@dataclass(frozen=True, eq=False)
class Conic:
    """Projective class of a complex symmetric 3x3 matrix.

    Stored exactly symmetric.  Inputs whose transpose differs by more than
    a few ulps are rejected instead of being silently symmetrized.
    """

    matrix: np.ndarray

    def __post_init__(self):
        M = as_matrix(self.matrix)
        scale = float(np.max(np.abs(M)))
        if scale == 0:
            raise ValueError("the zero matrix is not a conic")
        if np.max(np.abs(M - M.T)) > 1e-12 * scale:
            raise ValueError("conic matrix must be symmetric")
        M = (M + M.T) / 2
        M.flags.writeable = False
        object.__setattr__(self, "matrix", M)

    @classmethod
    def from_coords(cls, coords) -> "Conic":
        x = np.asarray(coords, dtype=complex).ravel()
        if x.shape != (6,):
            raise ValueError(f"a conic has 6 homogeneous coordinates, got {x.size}")
        M = np.empty((3, 3), dtype=complex)
        for value, (i, j) in zip(x, _COORD_INDEX):
            M[i, j] = M[j, i] = value
        return cls(M)

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.matrix[i, j] for i, j in _COORD_INDEX])

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.matrix))

    def normalized(self) -> "Conic":
        """Representative whose largest-modulus entry equals 1."""
        return Conic(max_modulus_normalize(self.matrix))

    def is_degenerate(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        return abs(np.linalg.det(scale_normalize(self.matrix))) <= tol.abs_eps

    def contains(self, p, tol: Tolerance = DEFAULT_TOL) -> bool:
        return point_residual(self, p) <= tol.rel_eps

    def __repr__(self):
        return f"Conic({np.array2string(self.matrix, precision=4)})"


def as_conic(C) -> Conic:
    return C if isinstance(C, Conic) else Conic(C)


def point_residual(C, p) -> float:
    """|p^T C p| with p max-modulus normalized and C scaled to unit max entry."""
    p = max_modulus_normalize(getattr(p, "coords", p))
    M = scale_normalize(as_conic(C).matrix)
    return float(abs(p @ M @ p))


@dataclass(frozen=True, eq=False)
class ConicPair:
    C: Conic
    D: Conic

    def __post_init__(self):
        object.__setattr__(self, "C", as_conic(self.C))
        object.__setattr__(self, "D", as_conic(self.D))

    @cached_property
    def sigma(self) -> np.ndarray:
        return sigma_coefficients(self.C, self.D)

    @cached_property
    def discriminant(self) -> complex:
        return discriminant(self.sigma)

    def normalized(self) -> "ConicPair":
        return ConicPair(self.C.normalized(), self.D.normalized())

    def __iter__(self):
        return iter((self.C, self.D))


def as_pair(pair) -> ConicPair:
    if isinstance(pair, ConicPair):
        return pair
    C, D = pair
    return ConicPair(C, D)


def sigma_coefficients(C, D) -> np.ndarray:
    """(s30, s21, s12, s03) with det(tC + D) = s30 t^3 + s21 t^2 + s12 t + s03."""
    return pencil_cubic(as_conic(C).matrix, as_conic(D).matrix)


def discriminant(sigma) -> complex:
    """Polynomial discriminant of the pencil cubic written in the sigma's.

    Equals s30**4 times the product of squared root differences, so it
    agrees with the root-product form only for a monic cubic.  The zero set
    is the same either way.
    """
    s30, s21, s12, s03 = (complex(s) for s in sigma)
    return (
        s21**2 * s12**2
        - 4 * s30 * s12**3
        - 4 * s21**3 * s03
        - 27 * s30**2 * s03**2
        + 18 * s30 * s21 * s12 * s03
    )


@dataclass(frozen=True)
class TransverseReport:
    transverse: bool
    discriminant: complex
    threshold: float
    separation: float

    def __bool__(self):
        return self.transverse


def _check_nondegenerate(pair: ConicPair, tol: Tolerance):
    for name, M in (("C", pair.C), ("D", pair.D)):
        if M.is_degenerate(tol):
            raise SingularConic(f"{name} is a degenerate conic")


def is_transverse(C, D=None, tol: Tolerance = DEFAULT_TOL) -> TransverseReport:
    """Whether C and D meet in four distinct points.

    The discriminant is evaluated on the max-modulus normalized pair and
    compared against rel_eps * max|sigma|^4.
    """
    pair = as_pair((C, D) if D is not None else C).normalized()
    _check_nondegenerate(pair, tol)
    sigma = pair.sigma
    disc = discriminant(sigma)
    threshold = tol.rel_eps * float(np.max(np.abs(sigma))) ** 4
    roots = np.array(solve_cubic(*sigma, tol=tol).roots)
    scale = max(1.0, float(np.max(np.abs(roots))))
    separation = min(
        abs(roots[i] - roots[j]) / scale for i in range(3) for j in range(i + 1, 3)
    )
    return TransverseReport(
        transverse=bool(abs(disc) > threshold),
        discriminant=disc,
        threshold=threshold,
        separation=float(separation),
    )


def require_transverse(pair, tol: Tolerance = DEFAULT_TOL, error=DegeneratePencil) -> ConicPair:
    pair = as_pair(pair)
    report = is_transverse(pair, tol=tol)
    if not report:
        raise error(
            f"pair is not transverse: |disc|={abs(report.discriminant):.3e} "
            f"<= {report.threshold:.3e}"
        )
    return pair


def cross_matrix(p) -> np.ndarray:
    """Matrix of the linear map x -> p x x."""
    a, b, c = p
    return np.array([[0, -c, b], [c, 0, -a], [-b, a, 0]], dtype=complex)


def split_degenerate(M) -> tuple[np.ndarray, np.ndarray]:
    """Two lines g, h with M proportional to g h^T + h g^T, for rank-2 symmetric M.

    The singular point comes from the adjugate (adj M = -s s^T for the
    line pair); adding the cross-product matrix of s makes M rank one.
    """
    M = np.asarray(M, dtype=complex)
    B = adjugate3(M)
    i = int(np.argmax(np.abs(np.diag(B))))
    beta = principal_sqrt(-B[i, i])
    if beta == 0:
        raise DegeneratePencil("degenerate conic is a double line")
    s = B[:, i] / beta
    R = M + cross_matrix(s)
    r, c = np.unravel_index(int(np.argmax(np.abs(R))), R.shape)
    return R[r, :].copy(), R[:, c].copy()


def line_basis(line) -> tuple[np.ndarray, np.ndarray]:
    """Two points spanning the line {x : line . x = 0}."""
    _, _, vh = np.linalg.svd(np.asarray(line, dtype=complex)[None, :])
    return vh[1].conj(), vh[2].conj()


def solve_binary_quadratic(a, b, c) -> list[np.ndarray]:
    """Projective roots [s:t] of a s^2 + 2 b s t + c t^2 = 0 (a double root twice)."""
    scale = max(abs(a), abs(b), abs(c))
    if scale == 0:
        raise DegeneratePencil("binary quadratic vanishes identically")
    a, b, c = a / scale, b / scale, c / scale
    disc = principal_sqrt(b * b - a * c)
    # take the sign that avoids cancellation; the other root follows from s1 s2 / (t1 t2) = c / a
    q = -b - disc if abs(-b - disc) >= abs(-b + disc) else -b + disc
    if q == 0:
        root = np.array([1, 0] if a == 0 else [0, 1], dtype=complex)
        return [root, root.copy()]
    return [np.array([q, a], dtype=complex), np.array([c, q], dtype=complex)]


def line_conic_intersection(line, C) -> list[np.ndarray]:
    """The two points where ``line`` meets the conic ``C``."""
    M = as_conic(C).matrix
    u, v = line_basis(line)
    a, b, c = u @ M @ u, u @ M @ v, v @ M @ v
    return [s * u + t * v for s, t in solve_binary_quadratic(a, b, c)]


def intersection_points(C, D=None, tol: Tolerance = DEFAULT_TOL) -> list[ProjPoint]:
    """The four points of C n D for a transverse pair."""
    pair = as_pair((C, D) if D is not None else C).normalized()
    pair = require_transverse(pair, tol)
    Cm, Dm = pair.C.matrix, pair.D.matrix
    roots = solve_cubic(*pair.sigma, tol=tol).roots
    # best-conditioned rank-2 member: largest ratio of 2nd to 1st singular value
    best, best_ratio = None, -1.0
    for r in roots:
        M = r * Cm + Dm
        sv = np.linalg.svd(M, compute_uv=False)
        ratio = sv[1] / sv[0]
        if ratio > best_ratio:
            best, best_ratio = M, ratio
    g, h = split_degenerate(best)
    points = [ProjPoint(p) for line in (g, h) for p in line_conic_intersection(line, Cm)]
    for i in range(4):
        for j in range(i + 1, 4):
            if points[i].distance(points[j]) < tol.cluster_eps:
                raise DegeneratePencil("intersection points are not distinct")
    return points


def dual_conic(C, tol: Tolerance = DEFAULT_TOL) -> Conic:
    """Conic of tangent lines: the adjugate, as a projective class."""
    C = as_conic(C)
    if C.is_degenerate(tol):
        raise SingularConic("a degenerate conic has no proper dual")
    return Conic(max_modulus_normalize(adjugate3(C.normalized().matrix)))


def tangent_at(C, p) -> np.ndarray:
    """Tangent line to C at a point p of C (the polar line C p)."""
    return as_conic(C).matrix @ np.asarray(getattr(p, "coords", p), dtype=complex)


def circles_pair(R: float, r: float, d: float) -> ConicPair:
    """Circle of radius R at the origin and circle of radius r centred at (d, 0)."""
    C = np.diag([1.0, 1.0, -R * R]).astype(complex)
    D = np.array([[1, 0, -d], [0, 1, 0], [-d, 0, d * d - r * r]], dtype=complex)
    return ConicPair(C, D)


def random_symmetric(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    return scale * (X + X.T) / 2


def random_transverse_pair(
    rng: np.random.Generator, min_separation: float = 1e-2, tol: Tolerance = DEFAULT_TOL
) -> ConicPair:
    """Complex-Gaussian pair whose pencil roots are at least ``min_separation`` apart."""
    while True:
        pair = ConicPair(random_symmetric(rng), random_symmetric(rng))
        if pair.C.is_degenerate(tol) or pair.D.is_degenerate(tol):
            continue
        report = is_transverse(pair, tol=tol)
        if report and report.separation >= min_separation:
            return pair


def random_transform(rng: np.random.Generator, min_abs_det: float = 1e-2) -> np.ndarray:
    while True:
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        A /= np.max(np.abs(A))
        if abs(np.linalg.det(A)) >= min_abs_det:
            return A


__all__ = [
    "Conic",
    "ConicPair",
    "TransverseReport",
    "as_conic",
    "as_pair",
    "circles_pair",
    "discriminant",
    "dual_conic",
    "intersection_points",
    "is_transverse",
    "kernel_vector",
    "line_conic_intersection",
    "point_residual",
    "random_transform",
    "random_transverse_pair",
    "require_transverse",
    "sigma_coefficients",
    "split_degenerate",
    "tangent_at",
]
