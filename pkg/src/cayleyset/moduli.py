"""Congruence action of PGL_3 on conic pairs and the moduli space CP^2/S_3 = P(1,2,3).

Convention: the normal form of a transverse pair is (I_3, diag(lam)) with
A^T C A = I and A^T D A = diag(lam), so lam are the eigenvalues of C^-1 D,
i.e. the negatives of the roots of det(tC + D).  Every invariant used here
is even under lam -> -lam, so the point of P(1,2,3) does not depend on it.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned, SingularTransform
from .numeric import (
    DEFAULT_TOL,
    Tolerance,
    eigen_pencil,
    max_modulus_normalize,
    principal_sqrt,
    proj_distance,
    scale_normalize,
)
from .pencil import ConicPair, as_pair, require_transverse

OMEGA = np.exp(2j * np.pi / 3)


def act(A, pair) -> ConicPair:
    """(A^T C A, A^T D A)."""
    A = np.asarray(A, dtype=complex)
    if A.shape != (3, 3):
        raise ValueError("transform must be 3x3")
    if abs(np.linalg.det(scale_normalize(A))) <= DEFAULT_TOL.abs_eps:
        raise SingularTransform("transform is singular")
    pair = as_pair(pair)

    def congruence(M):
        X = A.T @ M @ A
        return (X + X.T) / 2

    return ConicPair(congruence(pair.C.matrix), congruence(pair.D.matrix))


def pair_distance(p, q) -> float:
    """Projective distance between two pairs, worst of the two conics."""
    p, q = as_pair(p), as_pair(q)
    return max(
        proj_distance(p.C.matrix.ravel(), q.C.matrix.ravel()),
        proj_distance(p.D.matrix.ravel(), q.D.matrix.ravel()),
    )


@dataclass(frozen=True)
class NormalForm:
    A: np.ndarray
    lam: np.ndarray
    conditioning: float

    def residuals(self, pair) -> tuple[float, float]:
        """(|A^T C A - I|, |offdiag(A^T D A)|) relative to the pair's scale."""
        pair = as_pair(pair)
        A = self.A
        CC = A.T @ pair.C.matrix @ A
        DD = A.T @ pair.D.matrix @ A
        off = DD - np.diag(np.diag(DD))
        return (
            float(np.max(np.abs(CC - np.eye(3)))),
            float(np.max(np.abs(off)) / max(1.0, np.max(np.abs(self.lam)))),
        )


def normal_form(pair, tol: Tolerance = DEFAULT_TOL) -> NormalForm:
    """Congruence A taking (C, D) to (I_3, diag(lam)), built from C-normalized kernel vectors."""
    pair = require_transverse(as_pair(pair), tol)
    spec = eigen_pencil(pair.C.matrix, pair.D.matrix, tol)
    if spec.separation < 1e-4:
        warnings.warn(
            f"pencil roots nearly coincide (separation {spec.separation:.2e})",
            IllConditioned,
            stacklevel=2,
        )
    A = spec.vectors
    return NormalForm(A=A, lam=-spec.roots, conditioning=float(np.linalg.cond(A)))


def elementary_symmetric(lam) -> np.ndarray:
    l1, l2, l3 = (complex(x) for x in lam)
    return np.array([l1 + l2 + l3, l1 * l2 + l1 * l3 + l2 * l3, l1 * l2 * l3])


def _nonneg_key(z: complex) -> bool:
    return z.real > 0 or (z.real == 0 and z.imag >= 0)


def canonical_weighted(e, zero_eps: float = DEFAULT_TOL.rel_eps) -> tuple[np.ndarray, bool]:
    """Canonical representative of [e1 : e2 : e3] in P(1,2,3) and the special flag.

    e1 != 0: scale by 1/e1.  e1 = 0, e2 != 0: scale by s with s^2 e2 = 1,
    the sign of s chosen so the last coordinate has non-negative real part
    (non-negative imaginary part on ties).  Otherwise [0:0:1], special.
    Zero tests use the representative whose weighted max modulus is 1.
    """
    e = np.asarray(e, dtype=complex)
    m = max(abs(e[0]), abs(e[1]) ** 0.5, abs(e[2]) ** (1 / 3))
    if m == 0:
        raise ValueError("[0:0:0] is not a point of P(1,2,3)")
    e = e / np.array([m, m**2, m**3])
    if abs(e[0]) > zero_eps:
        s = 1 / e[0]
        return np.array([1.0, e[1] * s**2, e[2] * s**3], dtype=complex), False
    if abs(e[1]) > zero_eps:
        s = 1 / principal_sqrt(e[1])
        last = complex(e[2] * s**3)
        if not _nonneg_key(last):
            last = -last
        return np.array([0.0, 1.0, last], dtype=complex), False
    return np.array([0.0, 0.0, 1.0], dtype=complex), True


@dataclass(frozen=True)
class ModuliPoint:
    e: np.ndarray
    canonical: np.ndarray
    special: bool
    lam: np.ndarray

    @classmethod
    def from_lambda(cls, lam, tol: Tolerance = DEFAULT_TOL) -> "ModuliPoint":
        lam = np.asarray(lam, dtype=complex)
        e = elementary_symmetric(lam)
        canonical, special = canonical_weighted(e, tol.rel_eps)
        return cls(e=e, canonical=canonical, special=special, lam=lam)

    def distance(self, other: "ModuliPoint") -> float:
        a, b = self.canonical, other.canonical
        return float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(a)), np.max(np.abs(b))))

    def roots(self) -> np.ndarray:
        """lam recovered as roots of t^3 - e1 t^2 + e2 t - e3."""
        e1, e2, e3 = self.e
        return np.roots([1, -e1, e2, -e3])


def moduli_point(pair, tol: Tolerance = DEFAULT_TOL) -> ModuliPoint:
    nf = normal_form(pair, tol)
    return ModuliPoint.from_lambda(nf.lam, tol)


def is_special_orbit(pair, tol: Tolerance = DEFAULT_TOL) -> bool:
    return moduli_point(pair, tol).special


def permutation_matrix(perm) -> np.ndarray:
    """P with P e_j = e_perm[j]."""
    P = np.zeros((3, 3), dtype=complex)
    for j, i in enumerate(perm):
        P[i, j] = 1
    return P


@dataclass(frozen=True)
class IsotropyGroup:
    elements: tuple
    residual: float

    @property
    def order(self) -> int:
        return len(self.elements)

    def index_of(self, g, eps: float = 1e-6) -> int:
        for k, h in enumerate(self.elements):
            if proj_distance(np.ravel(g), np.ravel(h)) < eps:
                return k
        return -1


def isotropy_group(pair, tol: Tolerance = DEFAULT_TOL, eps: float = 1e-6) -> IsotropyGroup:
    """Projective classes g with g^T C g ~ C and g^T D g ~ D.

    Candidates P_sigma diag(+-1, +-1, +-1) in the normal frame are tested
    against diag(lam) directly; survivors are conjugated back by the
    normal-form transform.  The group order is counted, not assumed.
    """
    pair = as_pair(pair)
    nf = normal_form(pair, tol)
    A = nf.A
    A_inv = np.linalg.inv(A)
    lam = max_modulus_normalize(nf.lam)
    elements = []
    for perm in itertools.permutations(range(3)):
        P = permutation_matrix(perm)
        moved = np.diag(P.T @ np.diag(lam) @ P)
        if proj_distance(moved, lam) >= eps:
            continue
        for signs in itertools.product((1, -1), repeat=2):
            g0 = P @ np.diag([1, *signs])
            elements.append(max_modulus_normalize(A @ g0 @ A_inv))
    residual = 0.0
    for g in elements:
        for M in (pair.C.matrix, pair.D.matrix):
            residual = max(residual, proj_distance((g.T @ M @ g).ravel(), M.ravel()))
    return IsotropyGroup(elements=tuple(elements), residual=residual)


def special_pair(scale: complex = 1.0) -> ConicPair:
    """(I_3, diag(1, w, w^2)) scaled; the representative of the special orbit."""
    return ConicPair(np.eye(3), scale * np.diag([1, OMEGA, OMEGA**2]))


def diagonal_pair(lam) -> ConicPair:
    return ConicPair(np.eye(3), np.diag(np.asarray(lam, dtype=complex)))
