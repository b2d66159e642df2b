"""j-invariant of the pencil curve y^2 = det(xC + D) and its fibers on the Cayley curve.

In the moduli plane (coordinates lam = [l1 : l2 : l3]) the Cayley set is the
quartic Q(lam) = 4 e1 e3 - e2^2 = 0 and the j-fiber over z is the sextic
F(lam) = 256 N^3 - z Disc = 0, with N = e1^2 - 3 e2 and Disc the cubic
discriminant.  Fibers are computed by an exact Sylvester resultant in one
affine chart followed by Newton polishing of the 2x2 system.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    CayleySetError,
    CriticalZ,
    DegeneratePencil,
    RepeatedLambda,
    ResultantIllConditioned,
)
from .moduli import ModuliPoint, elementary_symmetric
from .numeric import DEFAULT_TOL, ProjPoint, Tolerance, max_modulus_normalize, proj_distance

REGULAR, J0, J1728 = "regular", "j0", "j1728"


def j_from_sigma(sigma, tol: Tolerance = DEFAULT_TOL) -> complex:
    s30, s21, s12, s03 = (complex(s) for s in sigma)
    den = s30**2 * (
        27 * s03**2 * s30**2
        + 2 * s12 * s30 * (-9 * s03 * s21 + 2 * s12**2)
        + s21**2 * (4 * s03 * s21 - s12**2)
    )
    scale = max(abs(s30), abs(s21), abs(s12), abs(s03))
    if scale == 0 or abs(den) <= tol.rel_eps * scale**6:
        raise DegeneratePencil("j-invariant denominator vanishes (repeated pencil root)")
    return 256 * (3 * s12 * s30 - s21**2) ** 3 / den


def _quadratic_form(l1, l2, l3):
    return l1**2 - l1 * l2 - l1 * l3 + l2**2 - l2 * l3 + l3**2


def _diff_product_sq(l1, l2, l3):
    return ((l1 - l2) * (l1 - l3) * (l2 - l3)) ** 2


def j_from_lambda(lam, tol: Tolerance = DEFAULT_TOL) -> complex:
    l1, l2, l3 = (complex(x) for x in max_modulus_normalize(lam))
    den = _diff_product_sq(l1, l2, l3)
    if abs(den) <= tol.rel_eps:
        raise RepeatedLambda("lambda has repeated entries")
    return 256 * _quadratic_form(l1, l2, l3) ** 3 / den


def sigma_of_lambda(lam) -> np.ndarray:
    """Pencil coefficients of (I_3, diag(lam))."""
    e1, e2, e3 = elementary_symmetric(lam)
    return np.array([1.0, e1, e2, e3], dtype=complex)


@dataclass(frozen=True)
class JValue:
    z: complex
    critical_class: str
    factors: tuple = ()

    @classmethod
    def of(cls, z: complex, tol: Tolerance = DEFAULT_TOL) -> "JValue":
        z = complex(z)
        if abs(z) < tol.cluster_eps:
            return cls(z, J0)
        if abs(z - 1728) < tol.cluster_eps * 1728:
            return cls(z, J1728)
        return cls(z, REGULAR)


def critical_factors(lam) -> tuple[complex, complex, complex, complex]:
    l1, l2, l3 = (complex(x) for x in max_modulus_normalize(lam))
    return (
        l1 - 2 * l2 + l3,
        l1 + l2 - 2 * l3,
        2 * l1 - l2 - l3,
        _quadratic_form(l1, l2, l3),
    )


def classify_critical(lam, tol: Tolerance = DEFAULT_TOL) -> JValue:
    """Critical class of lam from the factors of the critical curve, cross-checked with j."""
    factors = critical_factors(lam)
    z = j_from_lambda(lam, tol)
    if min(abs(f) for f in factors[:3]) < tol.rel_eps:
        cls = J1728
    elif abs(factors[3]) < tol.rel_eps:
        cls = J0
    else:
        cls = REGULAR
    expected = {J1728: 1728.0, J0: 0.0}.get(cls)
    if expected is not None and abs(z - expected) > 1e-6 * max(1.0, abs(expected)):
        raise CayleySetError(f"critical class {cls} disagrees with j = {z}")
    return JValue(z, cls, factors)


def cayley_moduli_residual(lam) -> complex:
    """Cayley quartic in lam (the triangle condition restricted to diagonal pairs)."""
    l1, l2, l3 = (complex(x) for x in lam)
    return (
        -(l1**2) * l2**2
        + 2 * l1**2 * l2 * l3
        - l1**2 * l3**2
        + 2 * l1 * l2**2 * l3
        + 2 * l1 * l2 * l3**2
        - l2**2 * l3**2
    )


def fiber_residual(lam, z) -> complex:
    """256 N^3 - z Disc: vanishes where the j-invariant of lam equals z."""
    l1, l2, l3 = (complex(x) for x in lam)
    return 256 * _quadratic_form(l1, l2, l3) ** 3 - complex(z) * _diff_product_sq(l1, l2, l3)


# exact elimination -----------------------------------------------------------

# the identity chart is lam = (x, y, 1); the fallback chart uses a fixed integer change
# of coordinates (columns: images of x, y and 1)
CHARTS = {
    "lambda3": ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    "rotated": ((1, 0, 0), (1, 1, 0), (1, 2, 1)),
}


def _Q_exact(l1, l2, l3):
    e1 = l1 + l2 + l3
    e2 = l1 * l2 + l1 * l3 + l2 * l3
    e3 = l1 * l2 * l3
    return 4 * e1 * e3 - e2 * e2


def _F_exact(l1, l2, l3, z):
    return 256 * _quadratic_form(l1, l2, l3) ** 3 - z * _diff_product_sq(l1, l2, l3)


def _chart_point(chart, x, y):
    cx, cy, c1 = CHARTS[chart]
    return tuple(cx[i] * x + cy[i] * y + c1[i] for i in range(3))


def _solve_exact(V, b):
    n = len(b)
    M = [list(row) + [bi] for row, bi in zip(V, b)]
    for col in range(n):
        piv = next(r for r in range(col, n) if M[r][col] != 0)
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def _interpolate_exact(nodes, values):
    """Monomial coefficients (lowest first) through (node, value) pairs, exactly."""
    V = [[Fraction(t) ** k for k in range(len(nodes))] for t in nodes]
    return _solve_exact(V, [Fraction(v) for v in values])


def _det_exact(M):
    M = [[Fraction(a) for a in row] for row in M]
    n = len(M)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        for r in range(col + 1, n):
            if M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return det


def sylvester_matrix(p, q):
    """Sylvester matrix of two polynomials given highest coefficient first."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    S = [[0] * size for _ in range(size)]
    for i in range(n):
        for j, c in enumerate(p):
            S[i][i + j] = c
    for i in range(m):
        for j, c in enumerate(q):
            S[n + i][i + j] = c
    return S


def _y_coefficients(f, degree):
    """Exact coefficients (highest first) of y -> f(y) for a polynomial of known degree."""
    nodes = list(range(degree + 1))
    low_first = _interpolate_exact(nodes, [f(Fraction(y)) for y in nodes])
    return low_first[::-1]


@lru_cache(maxsize=None)
def chart_degrees(chart: str) -> tuple[int, int]:
    """Generic y-degrees of Q and F in a chart, read off exact samples."""
    dq = df = 0
    for x in range(4):
        qc = _y_coefficients(lambda y: _Q_exact(*_chart_point(chart, Fraction(x), y)), 4)
        fc = _y_coefficients(lambda y: _F_exact(*_chart_point(chart, Fraction(x), y), 1), 6)
        dq = max(dq, 4 - next(i for i, c in enumerate(qc) if c != 0))
        df = max(df, 6 - next(i for i, c in enumerate(fc) if c != 0))
    return dq, df


@lru_cache(maxsize=None)
def resultant_table(chart: str = "lambda3") -> tuple:
    """Integer coefficient rows P_j with Res_y(Q, F_z)(x) = sum_j z^j P_j(x).

    Each row lists coefficients of x^d .. x^0.  Built from exact Sylvester
    determinants at integer sample points (always at the generic y-degrees,
    so the samples are values of one polynomial) and exact interpolation in
    x and z.
    """
    deg_q, deg_f = chart_degrees(chart)
    # Q is linear in each of its coefficients' z-dependence (none) and F is
    # linear in z, so the resultant has z-degree <= deg_q; x-degree <= 4 * 6
    xs = list(range(4 * 6 + 1))
    zs = list(range(deg_q + 1))
    per_z = []
    for z in zs:
        dets = []
        for x in xs:
            qc = _y_coefficients(lambda y: _Q_exact(*_chart_point(chart, Fraction(x), y)), 4)
            fc = _y_coefficients(lambda y: _F_exact(*_chart_point(chart, Fraction(x), y), z), 6)
            qc, fc = qc[4 - deg_q :], fc[6 - deg_f :]
            dets.append(_det_exact(sylvester_matrix(qc, fc)))
        per_z.append(_interpolate_exact(xs, dets))
    rows = [[Fraction(0)] * len(xs) for _ in zs]
    for k in range(len(xs)):
        coeffs = _interpolate_exact(zs, [per_z[i][k] for i in range(len(zs))])
        for j, c in enumerate(coeffs):
            rows[j][k] = c
    while len(rows) > 1 and not any(rows[-1]):
        rows.pop()
    top = max(max((k for k, c in enumerate(r) if c != 0), default=0) for r in rows)
    table = []
    for row in rows:
        if any(c.denominator != 1 for c in row):
            raise ResultantIllConditioned("resultant coefficients are not integral")
        table.append(tuple(int(c) for c in reversed(row[: top + 1])))
    return tuple(table)


def fiber_polynomial(z, chart: str = "lambda3") -> np.ndarray:
    """Degree-24 univariate resultant in x at the given z, highest power first."""
    z = complex(z)
    table = resultant_table(chart)
    out = np.zeros(len(table[0]), dtype=complex)
    for j, row in enumerate(table):
        out += np.array([float(c) for c in row]) * z**j
    return out


# numerical fiber -----------------------------------------------------------------


def _sym_and_grads(lam):
    l1, l2, l3 = lam
    e1 = l1 + l2 + l3
    e2 = l1 * l2 + l1 * l3 + l2 * l3
    e3 = l1 * l2 * l3
    de = np.array(
        [[1, 1, 1], [l2 + l3, l1 + l3, l1 + l2], [l2 * l3, l1 * l3, l1 * l2]], dtype=complex
    )
    return (e1, e2, e3), de


def _system(lam, z):
    """(Q, F) and their gradients with respect to lam."""
    (e1, e2, e3), de = _sym_and_grads(lam)
    Q = 4 * e1 * e3 - e2**2
    dQ = np.array([4 * e3, -2 * e2, 4 * e1]) @ de
    N = e1**2 - 3 * e2
    disc = e1**2 * e2**2 - 4 * e2**3 - 4 * e1**3 * e3 + 18 * e1 * e2 * e3 - 27 * e3**2
    dN = np.array([2 * e1, -3, 0])
    ddisc = np.array(
        [
            2 * e1 * e2**2 - 12 * e1**2 * e3 + 18 * e2 * e3,
            2 * e1**2 * e2 - 12 * e2**2 + 18 * e1 * e3,
            -4 * e1**3 + 18 * e1 * e2 - 54 * e3,
        ]
    )
    F = 256 * N**3 - z * disc
    dF = (768 * N**2 * dN - z * ddisc) @ de
    return np.array([Q, F]), np.vstack([dQ, dF])


def _newton(x, y, z, chart, iters: int = 8):
    cx, cy, c1 = (np.array(c, dtype=complex) for c in CHARTS[chart])
    J_chart = np.column_stack([cx, cy])
    for _ in range(iters):
        lam = cx * x + cy * y + c1
        val, grad = _system(lam, z)
        J = grad @ J_chart
        try:
            step = np.linalg.solve(J, -val)
        except np.linalg.LinAlgError:
            break
        x, y = x + step[0], y + step[1]
        if np.max(np.abs(step)) <= 1e-15 * max(1.0, abs(x), abs(y)):
            break
    return x, y


def root_residuals(lam, z) -> tuple[float, float]:
    """(|Q|, |F| / (256 + |z|)) at the max-modulus normalized lam."""
    lam = max_modulus_normalize(lam)
    return abs(cayley_moduli_residual(lam)), abs(fiber_residual(lam, z)) / (256 + abs(z))


def _chart_lambda(chart, x, y):
    return np.array(_chart_point(chart, x, y), dtype=complex)


def _back_substitute(x, z, chart):
    """Best y for a resultant root x: root of Q(x, .) minimizing |F(x, .)|."""
    deg = 4
    nodes = np.exp(2j * np.pi * np.arange(deg + 1) / (deg + 1))
    vals = np.array([_Q_exact(*_chart_lambda(chart, x, y)) for y in nodes])
    V = np.vander(nodes, deg + 1, increasing=True)
    low_first = np.linalg.solve(V, vals)
    coeffs = np.trim_zeros(low_first[::-1], "f")
    scale = np.max(np.abs(low_first))
    while len(coeffs) > 1 and abs(coeffs[0]) <= 1e-12 * scale:
        coeffs = coeffs[1:]
    candidates = np.roots(coeffs) if len(coeffs) > 1 else np.array([])
    best, best_val = None, np.inf
    for y in candidates:
        lam = _chart_lambda(chart, x, y)
        val = abs(fiber_residual(max_modulus_normalize(lam), z))
        if val < best_val:
            best, best_val = y, val
    return best


def _distance_clusters(points, eps):
    n = len(points)
    adj = np.zeros((n, n), dtype=bool)
    for i, j in itertools.combinations(range(n), 2):
        adj[i, j] = proj_distance(points[i], points[j]) < eps
    _, raw = connected_components(adj, directed=False)
    remap: dict[int, int] = {}
    return [remap.setdefault(r, len(remap)) for r in raw]


@dataclass(frozen=True)
class FiberRoot:
    lam: ProjPoint
    mult: int
    res_cayley: float
    res_j: float


@dataclass(frozen=True)
class AtlasRecord:
    z: complex
    roots: tuple
    residual_eq7: float
    residual_eq8: float
    orbit_count: int
    total_with_multiplicity: int
    chart: str = "lambda3"
    infinity_clear: bool = True
    notes: tuple = field(default_factory=tuple)

    @property
    def simple(self) -> bool:
        return all(r.mult == 1 for r in self.roots)

    @property
    def max_residual(self) -> float:
        return max(self.residual_eq7, self.residual_eq8)


def _no_solutions_at_infinity(z) -> bool:
    # on lam3 = 0 the quartic reduces to -l1^2 l2^2, so only [1:0:0] and [0:1:0] can occur
    return all(abs(fiber_residual(p, z)) > 0 for p in ((1, 0, 0), (0, 1, 0)))


def _fiber_in_chart(z, chart, tol, residual_bound):
    poly = fiber_polynomial(z, chart)
    if abs(poly[0]) <= 1e-12 * np.max(np.abs(poly)):
        raise ResultantIllConditioned(f"resultant degree drops at z = {z}")
    xs = np.roots(poly)
    lams, res = [], []
    for x in xs:
        y = _back_substitute(x, z, chart)
        if y is None:
            continue
        x2, y2 = _newton(x, y, z, chart)
        lam = _chart_lambda(chart, x2, y2)
        r7, r8 = root_residuals(lam, z)
        lams.append(max_modulus_normalize(lam))
        res.append((r7, r8))
    ok = [k for k, (r7, r8) in enumerate(res) if max(r7, r8) < residual_bound]
    if len(ok) != len(xs):
        raise ResultantIllConditioned(
            f"{len(xs) - len(ok)} of {len(xs)} resultant roots failed verification at z = {z}"
        )
    return [lams[k] for k in ok], [res[k] for k in ok]


def fiber_solutions(
    z, tol: Tolerance = DEFAULT_TOL, residual_bound: float = 1e-8
) -> AtlasRecord:
    """All points of the Cayley curve where the j-invariant equals z (z not 0 or 1728)."""
    z = complex(z)
    if JValue.of(z, tol).critical_class != REGULAR:
        raise CriticalZ(f"z = {z} is a critical value of j")
    notes = []
    try:
        chart = "lambda3"
        lams, res = _fiber_in_chart(z, chart, tol, residual_bound)
    except ResultantIllConditioned as exc:
        notes.append(f"fallback: {exc}")
        chart = "rotated"
        lams, res = _fiber_in_chart(z, chart, tol, residual_bound)

    labels = _distance_clusters(lams, tol.cluster_eps)
    sizes = np.bincount(labels)
    roots = []
    seen = set()
    for k, lab in enumerate(labels):
        if lab in seen:
            continue
        seen.add(lab)
        members = [i for i, l in enumerate(labels) if l == lab]
        r7 = max(res[i][0] for i in members)
        r8 = max(res[i][1] for i in members)
        roots.append(FiberRoot(ProjPoint(lams[k]), int(sizes[lab]), r7, r8))
    if any(r.mult > 1 for r in roots):
        notes.append("repeated root in a regular fiber")

    moduli = [ModuliPoint.from_lambda(r.lam.coords, tol) for r in roots]
    orbit_labels = _orbit_labels(moduli, tol.cluster_eps)
    return AtlasRecord(
        z=z,
        roots=tuple(roots),
        residual_eq7=max((r.res_cayley for r in roots), default=0.0),
        residual_eq8=max((r.res_j for r in roots), default=0.0),
        orbit_count=len(set(orbit_labels)),
        total_with_multiplicity=int(sum(r.mult for r in roots)),
        chart=chart,
        infinity_clear=_no_solutions_at_infinity(z),
        notes=tuple(notes),
    )


def _orbit_labels(points: list[ModuliPoint], eps: float) -> list[int]:
    labels: list[int] = []
    reps: list[ModuliPoint] = []
    for p in points:
        for k, q in enumerate(reps):
            if p.distance(q) < eps:
                labels.append(k)
                break
        else:
            reps.append(p)
            labels.append(len(reps) - 1)
    return labels


def fiber_atlas(zs, tol: Tolerance = DEFAULT_TOL, jobs: int = 1) -> list[AtlasRecord]:
    """fiber_solutions over many z; results come back in input order."""
    zs = list(zs)
    resultant_table("lambda3")  # build the cache before fanning out
    if jobs <= 1:
        return [fiber_solutions(z, tol) for z in zs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda z: fiber_solutions(z, tol), zs))


# critical sets ---------------------------------------------------------------------


def _displayed_critical_points():
    r3 = np.sqrt(3.0)

    def sq(x):
        return np.sqrt(complex(x))

    a = sq(-3 + 2 * r3)
    b = sq(-2 * r3 - 3)
    c = sq(3 + 2 * r3)
    d = sq(3 - 2 * r3)
    e = sq(3 / 4 + r3 / 2)
    f = sq(3 / 4 - r3 / 2)
    s0 = [
        ((-1 - r3 * 1j) / 2, -0.5 + r3 * 1j / 2, 1),
        ((-1 + r3 * 1j) / 2, -0.5 - r3 * 1j / 2, 1),
    ]
    s1728 = [
        (1 - a, a + 1, 1),
        (1 - b, 1 + b, 1),
        (1 + b, 1 - b, 1),
        (a + 1, 1 - a, 1),
        (1 + r3 + c, r3 / 2 + 1 + e, 1),
        (-r3 + 1 - d, -r3 / 2 + 1 - f, 1),
        (-r3 + 1 + d, -r3 / 2 + 1 + f, 1),
        ((-r3 + 2 - d) / 2, -r3 + 1 - d, 1),
        ((-r3 + 2 + d) / 2, -r3 + 1 + d, 1),
        ((r3 + 2 + c) / 2, 1 + r3 + c, 1),
        (-c + 1 + r3, -e + r3 / 2 + 1, 1),
        ((-c + r3 + 2) / 2, -c + 1 + r3, 1),
    ]
    return s0, s1728


@dataclass(frozen=True)
class CriticalSets:
    S0: tuple
    S1728: tuple

    def points(self, which: str) -> list[np.ndarray]:
        group = self.S0 if which == "S0" else self.S1728
        return [p.lam for p in group]


def critical_sets_S(tol: Tolerance = DEFAULT_TOL, bound: float = 1e-10) -> CriticalSets:
    """The tabulated critical points of j restricted to the Cayley curve, each verified."""
    s0, s1728 = _displayed_critical_points()
    out = {}
    for name, pts, expected in (("S0", s0, J0), ("S1728", s1728, J1728)):
        group = []
        for lam in pts:
            lam = np.array(lam, dtype=complex)
            if abs(cayley_moduli_residual(lam)) >= bound:
                raise CayleySetError(f"{name} point {lam} is off the Cayley curve")
            if classify_critical(lam, tol).critical_class != expected:
                raise CayleySetError(f"{name} point {lam} is not in the j = {expected} fiber")
            group.append(ModuliPoint.from_lambda(lam, tol))
        out[name] = tuple(group)
    return CriticalSets(S0=out["S0"], S1728=out["S1728"])


def critical_intersections(which: str) -> list[np.ndarray]:
    """All points of CP^2 where the Cayley quartic meets a component of the critical curve.

    ``which`` is "j1728" (the three lines l1 - 2 l2 + l3 = 0 and permutations) or
    "j0" (the two lines on which N = 0).  Each line is parametrized and the
    quartic restricted to it is solved directly; nothing is taken from the
    tabulated sets.
    """
    w = np.exp(2j * np.pi / 3)
    if which == "j1728":
        # points u + t v spanning each line
        lines = [
            (np.array([1, 1, 1]), np.array([1, 0, -1])),  # l1 - 2 l2 + l3 = 0
            (np.array([1, 1, 1]), np.array([1, -1, 0])),  # l1 + l2 - 2 l3 = 0
            (np.array([1, 1, 1]), np.array([0, 1, -1])),  # 2 l1 - l2 - l3 = 0
        ]
    elif which == "j0":
        lines = [
            (np.array([1, 1, 1]), np.array([1, w, w * w])),
            (np.array([1, 1, 1]), np.array([1, w * w, w])),
        ]
    else:
        raise ValueError("which must be 'j0' or 'j1728'")
    pts = []
    for u, v in lines:
        u = u.astype(complex)
        v = v.astype(complex)
        # quartic in s on the line s u + v, plus the point u itself if it lies on it
        nodes = np.exp(2j * np.pi * np.arange(5) / 5)
        vals = [cayley_moduli_residual(s * u + v) for s in nodes]
        coeffs = np.linalg.solve(np.vander(nodes, 5, increasing=True), vals)[::-1]
        deg = 4
        while deg > 0 and abs(coeffs[0]) < 1e-12:
            coeffs = coeffs[1:]
            deg -= 1
        for s in np.roots(coeffs):
            pts.append(max_modulus_normalize(s * u + v))
        pts.extend([max_modulus_normalize(u)] * (4 - deg))
    return pts
