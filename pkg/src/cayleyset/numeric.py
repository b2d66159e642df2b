"""Complex 3x3 linear algebra, cubic roots and projective normalization.

Every routine here is a pure function on immutable inputs.  The tolerance
policy used across the package lives in :class:`Tolerance`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import DegeneratePencil, DegreeError, NonFinite, SingularConic

ENV_TOL = "PONCELET_TOL"


@dataclass(frozen=True)
class Tolerance:
    abs_eps: float = 1e-10
    rel_eps: float = 1e-8
    cluster_eps: float = 1e-6

    def __post_init__(self):
        for name in ("abs_eps", "rel_eps", "cluster_eps"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value!r}")
        if self.cluster_eps < self.abs_eps:
            raise ValueError("cluster_eps must be >= abs_eps")

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "Tolerance":
        """Defaults, then ``PONCELET_TOL`` (rel_eps), then explicit overrides."""
        environ = os.environ if environ is None else environ
        tol = cls()
        raw = environ.get(ENV_TOL)
        if raw:
            try:
                tol = replace(tol, rel_eps=float(raw))
            except ValueError as exc:
                raise ValueError(f"{ENV_TOL}={raw!r} is not a positive float") from exc
        overrides = {k: v for k, v in overrides.items() if v is not None}
        return replace(tol, **overrides) if overrides else tol


DEFAULT_TOL = Tolerance()


def principal_sqrt(z):
    """Square root with argument in (-pi/2, pi/2]."""
    z = complex(z)
    # adding +0.0 turns a -0.0 imaginary part into +0.0, so negative reals map to +i*sqrt
    root = complex(np.sqrt(complex(z.real, z.imag + 0.0)))
    if root.real == 0.0 and root.imag < 0.0:
        root = -root
    return root


def as_matrix(M) -> np.ndarray:
    """Return a fresh complex 3x3 array, rejecting NaN/inf."""
    A = np.array(getattr(M, "matrix", M), dtype=complex)
    if A.shape != (3, 3):
        raise ValueError(f"expected a 3x3 matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFinite("matrix has non-finite entries")
    return A


def max_modulus_normalize(x: np.ndarray) -> np.ndarray:
    """Divide by the entry of largest modulus (first one on ties)."""
    x = np.asarray(x, dtype=complex)
    flat = x.ravel()
    k = int(np.argmax(np.abs(flat)))
    if flat[k] == 0:
        raise ValueError("cannot normalize the zero vector")
    out = x / flat[k]
    out.reshape(-1)[k] = 1.0  # complex division can land one ulp off
    return out


def scale_normalize(x: np.ndarray) -> np.ndarray:
    """Divide by the largest modulus only (keeps phases)."""
    x = np.asarray(x, dtype=complex)
    m = np.max(np.abs(x))
    if m == 0:
        raise ValueError("cannot normalize the zero vector")
    return x / m


def proj_distance(p, q) -> float:
    """Max-modulus-normalized coordinate distance between two projective points.

    Both points are dehomogenized in the same chart (the dominant coordinate
    of each in turn) and the larger of the two sup-distances is returned, so
    near-ties in the dominant coordinate cannot fake a large distance.
    """
    p = np.asarray(p, dtype=complex).ravel()
    q = np.asarray(q, dtype=complex).ravel()
    out = 0.0
    for a, b in ((p, q), (q, p)):
        k = int(np.argmax(np.abs(a)))
        if b[k] == 0:
            return float("inf")
        out = max(out, float(np.max(np.abs(a / a[k] - b / b[k]))))
    return out


@dataclass(frozen=True, eq=False)
class ProjPoint:
    """Point of CP^N stored in max-modulus normal form (one coordinate is 1)."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=complex).ravel()
        if not np.all(np.isfinite(c)):
            raise NonFinite("projective point has non-finite coordinates")
        c = max_modulus_normalize(c)
        c.flags.writeable = False
        object.__setattr__(self, "coords", c)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def distance(self, other) -> float:
        return proj_distance(self.coords, getattr(other, "coords", other))

    def close_to(self, other, tol: float = DEFAULT_TOL.cluster_eps) -> bool:
        return self.distance(other) < tol

    def __repr__(self):
        inner = " : ".join(f"{z.real:.6g}{z.imag:+.6g}j" for z in self.coords)
        return f"ProjPoint[{inner}]"


def cluster_labels(points: np.ndarray, eps: float) -> np.ndarray:
    """Single-linkage clusters of rows of ``points`` at threshold ``eps``.

    Labels are numbered by first appearance, so the result does not depend
    on how the connected-components routine orders its output.
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim == 1:
        pts = pts[:, None]
    dist = np.max(np.abs(pts[:, None, :] - pts[None, :, :]), axis=-1)
    _, raw = connected_components(dist < eps, directed=False)
    remap: dict[int, int] = {}
    return np.array([remap.setdefault(r, len(remap)) for r in raw], dtype=int)


@dataclass(frozen=True)
class CubicRoots:
    roots: tuple
    multiplicity: tuple
    residual: float

    @property
    def simple(self) -> bool:
        return all(m == 1 for m in self.multiplicity)

    def distinct(self) -> list:
        seen, out = set(), []
        for r, m in zip(self.roots, self.multiplicity):
            key = (round(r.real, 12), round(r.imag, 12))
            if key not in seen:
                seen.add(key)
                out.append((r, m))
        return out


def _sort_roots(roots: np.ndarray) -> np.ndarray:
    # descending real part, then descending imaginary part; rounding keeps
    # the order stable under last-bit noise
    scale = max(1.0, float(np.max(np.abs(roots))))
    re = np.round(roots.real / scale, 10)
    im = np.round(roots.imag / scale, 10)
    return roots[np.lexsort((-im, -re))]


def solve_cubic(a, b, c, d, tol: Tolerance = DEFAULT_TOL) -> CubicRoots:
    """Roots of a t^3 + b t^2 + c t + d with multiplicity labels.

    Companion-matrix eigenvalues, one guarded Newton step per root, then
    single-linkage clustering of the scale-normalized roots.  Members of a
    cluster are replaced by the cluster mean.
    """
    coeffs = np.array([a, b, c, d], dtype=complex)
    if not np.all(np.isfinite(coeffs)):
        raise NonFinite("cubic coefficients are not finite")
    if coeffs[0] == 0:
        raise DegreeError("leading coefficient vanishes; polynomial is not a cubic")
    with np.errstate(all="ignore"):
        monic = coeffs / coeffs[0]
    if not np.all(np.isfinite(monic)):
        raise NonFinite("cubic coefficients overflow after normalization")
    companion = np.array(
        [[-monic[1], -monic[2], -monic[3]], [1, 0, 0], [0, 1, 0]], dtype=complex
    )
    with np.errstate(all="ignore"):
        roots = np.linalg.eigvals(companion)
    if not np.all(np.isfinite(roots)):
        raise NonFinite("cubic roots overflowed")

    dpoly = np.polyder(monic)
    for i, r in enumerate(roots):
        f = np.polyval(monic, r)
        fp = np.polyval(dpoly, r)
        if fp != 0:
            cand = r - f / fp
            if np.isfinite(cand) and abs(np.polyval(monic, cand)) < abs(f):
                roots[i] = cand

    scale = max(1.0, float(np.max(np.abs(roots))))
    labels = cluster_labels(roots / scale, tol.cluster_eps)
    mult = np.bincount(labels)[labels]
    for lab in np.unique(labels):
        members = labels == lab
        if members.sum() > 1:
            roots[members] = roots[members].mean()

    order_roots = _sort_roots(roots)
    # recover multiplicities after sorting
    mult_sorted = []
    for r in order_roots:
        k = int(np.argmin(np.abs(roots - r)))
        mult_sorted.append(int(mult[k]))
    residual = float(np.max(np.abs(np.polyval(coeffs, order_roots))))
    return CubicRoots(
        roots=tuple(complex(r) for r in order_roots),
        multiplicity=tuple(mult_sorted),
        residual=residual,
    )


def adjugate3(M) -> np.ndarray:
    """Classical adjoint (transpose of the cofactor matrix) of a 3x3 matrix."""
    A = np.asarray(getattr(M, "matrix", M), dtype=complex)
    c0, c1, c2 = A[:, 0], A[:, 1], A[:, 2]
    # rows of adj(A) are the cross products of column pairs
    return np.array([np.cross(c1, c2), np.cross(c2, c0), np.cross(c0, c1)])


def pencil_cubic(C, D) -> np.ndarray:
    """Coefficients (s30, s21, s12, s03) of det(tC + D), highest power first.

    Each coefficient is a sum of determinants of matrices mixing the columns
    of C and D.
    """
    C = np.asarray(getattr(C, "matrix", C), dtype=complex)
    D = np.asarray(getattr(D, "matrix", D), dtype=complex)
    c = [C[:, i] for i in range(3)]
    d = [D[:, i] for i in range(3)]

    def det(u, v, w):
        return np.dot(u, np.cross(v, w))

    s30 = det(c[0], c[1], c[2])
    s21 = det(c[0], c[1], d[2]) + det(c[0], d[1], c[2]) + det(d[0], c[1], c[2])
    s12 = det(c[0], d[1], d[2]) + det(d[0], c[1], d[2]) + det(d[0], d[1], c[2])
    s03 = det(d[0], d[1], d[2])
    return np.array([s30, s21, s12, s03], dtype=complex)


@dataclass(frozen=True)
class PencilSpectrum:
    """Roots r_i of det(tC + D) and kernel vectors v_i of r_i C + D.

    ``vectors[:, i]`` pairs with ``roots[i]`` and satisfies v^T C v = 1.
    """

    roots: np.ndarray
    vectors: np.ndarray
    separation: float
    residual: float

    def __iter__(self):
        return iter(zip(self.roots, self.vectors.T))


def kernel_vector(M: np.ndarray) -> np.ndarray:
    """Right null vector of a (numerically) rank-2 matrix, phase-fixed."""
    _, _, vh = np.linalg.svd(M)
    v = vh[-1].conj()
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def eigen_pencil(C, D, tol: Tolerance = DEFAULT_TOL) -> PencilSpectrum:
    C = as_matrix(C)
    D = as_matrix(D)
    for name, M in (("C", C), ("D", D)):
        if abs(np.linalg.det(scale_normalize(M))) <= tol.abs_eps:
            raise SingularConic(f"{name} is degenerate")

    cubic = solve_cubic(*pencil_cubic(C, D), tol=tol)
    if not cubic.simple:
        raise DegeneratePencil(
            f"pencil has a repeated root (multiplicities {cubic.multiplicity})"
        )
    roots = np.array(cubic.roots)
    scale = max(1.0, float(np.max(np.abs(roots))))
    separation = min(
        abs(roots[i] - roots[j]) / scale for i in range(3) for j in range(i + 1, 3)
    )

    vectors = np.empty((3, 3), dtype=complex)
    normC = np.linalg.norm(C)
    normD = np.linalg.norm(D)
    residual = 0.0
    for i, r in enumerate(roots):
        v = kernel_vector(r * C + D)
        vCv = v @ C @ v
        if abs(vCv) <= tol.abs_eps * normC:
            raise DegeneratePencil("kernel vector is C-isotropic; conics are tangent")
        v = v / principal_sqrt(vCv)
        vectors[:, i] = v
        res = np.linalg.norm((r * C + D) @ v) / ((normC + normD) * np.linalg.norm(v))
        residual = max(residual, float(res))
    return PencilSpectrum(roots=roots, vectors=vectors, separation=separation, residual=residual)
