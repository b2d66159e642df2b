"""First-order perturbation of pencil roots, checked against finite differences.

For a simple root r of det(tC + D) with kernel vector v, differentiating
(r C + D) v = 0 and pairing with v gives

    dr = -(v^T dD v + r v^T dC v) / (v^T C v).

Gradients are returned both as 3x3 matrices (entry-wise derivative, so the
trace pairing sum(G * dM) gives dr) and in the six independent symmetric
coordinates x0..x5 = (00, 01, 02, 11, 12, 22), where each off-diagonal
coordinate moves two matrix entries and therefore carries a factor 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePencil
from .numeric import DEFAULT_TOL, Tolerance, eigen_pencil, pencil_cubic
from .pencil import ConicPair, as_pair, random_transverse_pair, require_transverse

_SYM_INDEX = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
OFFDIAG_FACTOR = 2.0


@dataclass(frozen=True)
class GradientPair:
    grad_C: np.ndarray
    grad_D: np.ndarray
    root: complex
    vector: np.ndarray
    vCv: complex

    def symmetric_coords(self) -> tuple[np.ndarray, np.ndarray]:
        """Derivatives with respect to the six symmetric coordinates of C and of D."""
        return to_symmetric_coords(self.grad_C), to_symmetric_coords(self.grad_D)

    def pair_with(self, dC, dD) -> complex:
        return complex(np.sum(self.grad_C * dC) + np.sum(self.grad_D * dD))


def to_symmetric_coords(G) -> np.ndarray:
    G = np.asarray(G)
    return np.array(
        [G[i, j] if i == j else OFFDIAG_FACTOR * G[i, j] for i, j in _SYM_INDEX]
    )


def _spectrum(pair: ConicPair, tol: Tolerance):
    pair = require_transverse(pair, tol)
    return eigen_pencil(pair.C.matrix, pair.D.matrix, tol)


def eigenvalue_gradients(pair, root_index: int, tol: Tolerance = DEFAULT_TOL) -> GradientPair:
    pair = as_pair(pair)
    spec = _spectrum(pair, tol)
    r = complex(spec.roots[root_index])
    v = spec.vectors[:, root_index]
    vCv = complex(v @ pair.C.matrix @ v)
    if abs(vCv) <= tol.abs_eps:
        raise DegeneratePencil("v^T C v vanishes; the pair is not transverse")
    outer = np.outer(v, v)
    return GradientPair(
        grad_C=-r * outer / vCv,
        grad_D=-outer / vCv,
        root=r,
        vector=v,
        vCv=vCv,
    )


def directional_derivative(
    pair, root_index: int, dC, dD, tol: Tolerance = DEFAULT_TOL
) -> complex:
    """Rate of change of the root_index-th pencil root along (C + h dC, D + h dD)."""
    pair = as_pair(pair)
    spec = _spectrum(pair, tol)
    r = complex(spec.roots[root_index])
    v = spec.vectors[:, root_index]
    dC = np.asarray(dC, dtype=complex)
    dD = np.asarray(dD, dtype=complex)
    vCv = v @ pair.C.matrix @ v
    if abs(vCv) <= tol.abs_eps:
        raise DegeneratePencil("v^T C v vanishes; the pair is not transverse")
    return complex(-(v @ dD @ v + r * (v @ dC @ v)) / vCv)


def _roots_of(C, D) -> np.ndarray:
    return np.roots(pencil_cubic(C, D))


def _nearest(roots: np.ndarray, target: complex) -> complex:
    return complex(roots[int(np.argmin(np.abs(roots - target)))])


def finite_difference(pair, root_index: int, dC, dD, h: float = 1e-6) -> complex:
    """Central difference of the tracked root along (dC, dD)."""
    pair = as_pair(pair)
    C, D = pair.C.matrix, pair.D.matrix
    r0 = complex(eigen_pencil(C, D).roots[root_index])
    plus = _nearest(_roots_of(C + h * dC, D + h * dD), r0)
    minus = _nearest(_roots_of(C - h * dC, D - h * dD), r0)
    return (plus - minus) / (2 * h)


def _basis(i, j) -> np.ndarray:
    E = np.zeros((3, 3), dtype=complex)
    E[i, j] = E[j, i] = 1
    return E


@dataclass(frozen=True)
class RootCheck:
    root_index: int
    root: complex
    rel_error: float
    worst_entry: str


@dataclass(frozen=True)
class GradcheckReport:
    roots: tuple
    threshold: float

    @property
    def worst(self) -> float:
        return max(r.rel_error for r in self.roots)

    @property
    def passed(self) -> bool:
        return self.worst < self.threshold


def gradcheck(pair, h: float = 1e-6, threshold: float = 1e-6, tol: Tolerance = DEFAULT_TOL):
    """Compare all 12 symmetric-coordinate derivatives with central differences.

    The pair is max-modulus normalized first.  Errors are relative to
    max(1, |analytic gradient|_inf) per root.
    """
    pair = as_pair(pair).normalized()
    checks = []
    for k in range(3):
        g = eigenvalue_gradients(pair, k, tol)
        gC, gD = g.symmetric_coords()
        scale = max(1.0, float(np.max(np.abs(np.concatenate([gC, gD])))))
        worst, worst_name = 0.0, ""
        zero = np.zeros((3, 3), dtype=complex)
        for which, grads in (("C", gC), ("D", gD)):
            for idx, (i, j) in enumerate(_SYM_INDEX):
                E = _basis(i, j)
                fd = finite_difference(pair, k, E, zero, h) if which == "C" else finite_difference(pair, k, zero, E, h)
                err = abs(fd - grads[idx]) / scale
                if err >= worst:
                    worst, worst_name = err, f"{which}[{i},{j}]"
        checks.append(RootCheck(k, g.root, float(worst), worst_name))
    return GradcheckReport(roots=tuple(checks), threshold=threshold)


def random_gradcheck(seed: int = 42, count: int = 100, **kwargs) -> list[GradcheckReport]:
    rng = np.random.default_rng(seed)
    return [gradcheck(random_transverse_pair(rng), **kwargs) for _ in range(count)]


@dataclass(frozen=True)
class SubmersionTangents:
    T1: np.ndarray  # induced (l1', l2', l3') along (0, C v1 v1^T C)
    T2: np.ndarray  # induced along (0, C v2 v2^T C)
    chart_det: float

    def independent(self, eps: float = 1e-8) -> bool:
        return self.chart_det > eps


def submersion_tangents(pair, tol: Tolerance = DEFAULT_TOL) -> SubmersionTangents:
    """Moduli velocities along D-deformations supported on one eigendirection.

    Velocities are of the pencil roots r_k; for the tangent built from v_1
    only r_1 moves, at rate -v_1^T C v_1.  ``chart_det`` is
    |det| of the two image vectors in the affine chart (l1/l3, l2/l3).
    """
    pair = as_pair(pair)
    spec = _spectrum(pair, tol)
    C = pair.C.matrix
    zero = np.zeros((3, 3), dtype=complex)
    lam = spec.roots
    images = []
    for i in (0, 1):
        w = C @ spec.vectors[:, i]
        dD = np.outer(w, w)
        images.append(
            np.array([directional_derivative(pair, k, zero, dD, tol) for k in range(3)])
        )
    # d(l_k / l_3) = (l_k' l_3 - l_k l_3') / l_3^2
    cols = [
        [(t[k] * lam[2] - lam[k] * t[2]) / lam[2] ** 2 for k in (0, 1)] for t in images
    ]
    chart_det = abs(np.linalg.det(np.array(cols)))
    return SubmersionTangents(T1=images[0], T2=images[1], chart_det=float(chart_det))


__all__ = [
    "GradcheckReport",
    "GradientPair",
    "SubmersionTangents",
    "directional_derivative",
    "eigenvalue_gradients",
    "finite_difference",
    "gradcheck",
    "random_gradcheck",
    "submersion_tangents",
    "to_symmetric_coords",
]
