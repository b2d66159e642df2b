"""Poncelet map on the correspondence {(p, l) : p on C, l tangent to D, p on l}.

One step replaces the line l through p by the other tangent l' from p to D,
then replaces p by the second point where l' meets C.  The "return" branch
undoes a forward step: it slides the point first and switches tangents
second.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BranchCollapse, NumericalTangency
from .numeric import DEFAULT_TOL, ProjPoint, Tolerance, adjugate3, max_modulus_normalize, proj_distance
from .pencil import as_pair, line_basis, point_residual, solve_binary_quadratic

FORWARD, RETURN = "forward", "return"


def _unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    return x / np.linalg.norm(x)


def _dual(D) -> np.ndarray:
    return adjugate3(D / np.max(np.abs(D)))


def residuals(pair, p, l) -> tuple[float, float, float]:
    """(|p^T C p|, |l^T adj(D) l|, |l . p|) on unit-norm representatives."""
    pair = as_pair(pair)
    p, l = _unit(getattr(p, "coords", p)), _unit(getattr(l, "coords", l))
    C = pair.C.matrix / np.max(np.abs(pair.C.matrix))
    return (
        float(abs(p @ C @ p)),
        float(abs(l @ _dual(pair.D.matrix) @ l)),
        float(abs(l @ p)),
    )


@dataclass(frozen=True)
class PonceletState:
    point: ProjPoint
    line: ProjPoint
    history: tuple = field(default_factory=tuple)

    def residuals(self, pair) -> tuple[float, float, float]:
        return residuals(pair, self.point, self.line)


def tangents_from_point(D, p, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """The two tangent lines to D through p.

    Lines through p are p x q for q on an auxiliary line; tangency to D is a
    binary quadratic in q.
    """
    D = np.asarray(getattr(D, "matrix", D), dtype=complex)
    p = _unit(getattr(p, "coords", p))
    # any two points q1, q2 with p, q1, q2 independent
    _, _, vh = np.linalg.svd(p.conj()[None, :])
    q1, q2 = vh[1].conj(), vh[2].conj()
    m1, m2 = np.cross(p, q1), np.cross(p, q2)
    B = _dual(D)
    a, b, c = m1 @ B @ m1, m1 @ B @ m2, m2 @ B @ m2
    scale = max(abs(a), abs(b), abs(c))
    if scale <= tol.abs_eps:
        raise NumericalTangency("tangent quadratic vanishes identically")
    disc = b * b - a * c
    if abs(disc) <= tol.rel_eps * scale**2:
        raise BranchCollapse("p lies on D: the two tangents coincide")
    return [_unit(s * m1 + t * m2) for s, t in solve_binary_quadratic(a, b, c)]


def second_intersection(C, p, l) -> np.ndarray:
    """The point of l n C other than p: (q^T C q) p - 2 (p^T C q) q for any other q on l."""
    C = np.asarray(getattr(C, "matrix", C), dtype=complex)
    p = _unit(p)
    u, v = line_basis(l)
    # pick the basis point farthest from p so the formula is well conditioned
    q = max((u, v), key=lambda w: proj_distance(w, p))
    return _unit((q @ C @ q) * p - 2 * (p @ C @ q) * q)


def _other_tangent(D, p, l, tol):
    candidates = tangents_from_point(D, p, tol)
    return max(candidates, key=lambda m: proj_distance(m, l))


def _lex_key(x):
    x = max_modulus_normalize(x)
    return tuple(v for z in x for v in (round(z.real, 12), round(z.imag, 12)))


def initial_state(pair, p0, tol: Tolerance = DEFAULT_TOL) -> PonceletState:
    """State at p0 with the lexicographically smaller of its two tangents."""
    pair = as_pair(pair)
    p0 = ProjPoint(getattr(p0, "coords", p0))
    lines = tangents_from_point(pair.D.matrix, p0.coords, tol)
    line = min(lines, key=_lex_key)
    return PonceletState(point=p0, line=ProjPoint(line))


def poncelet_step(pair, state: PonceletState, branch: str = FORWARD, tol: Tolerance = DEFAULT_TOL) -> PonceletState:
    pair = as_pair(pair)
    C, D = pair.C.matrix, pair.D.matrix
    p, l = state.point.coords, state.line.coords
    if branch == FORWARD:
        l2 = _other_tangent(D, p, l, tol)
        p2 = second_intersection(C, p, l2)
    elif branch == RETURN:
        p2 = second_intersection(C, p, l)
        l2 = _other_tangent(D, p2, l, tol)
    else:
        raise ValueError(f"branch must be {FORWARD!r} or {RETURN!r}")
    return PonceletState(
        point=ProjPoint(p2), line=ProjPoint(l2), history=state.history + (branch,)
    )


def orbit(pair, state: PonceletState, steps: int, tol: Tolerance = DEFAULT_TOL) -> list[PonceletState]:
    out = [state]
    for _ in range(steps):
        out.append(poncelet_step(pair, out[-1], FORWARD, tol))
    return out


def triangle_closure(pair, p0, tol: Tolerance = DEFAULT_TOL) -> float:
    """Distance between p0 and the point reached after three forward steps."""
    pair = as_pair(pair)
    if point_residual(pair.C, getattr(p0, "coords", p0)) > 1e-8:
        raise ValueError("start point is not on C")
    states = orbit(pair, initial_state(pair, p0, tol), 3, tol)
    return states[-1].point.distance(states[0].point)


def random_start_points(pair, seed: int = 42, count: int = 20) -> list[ProjPoint]:
    """Points of C cut out by seeded complex-Gaussian lines (first intersection of each)."""
    pair = as_pair(pair)
    C = pair.C.matrix
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        line = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        u, v = line_basis(line)
        a, b, c = u @ C @ u, u @ C @ v, v @ C @ v
        s, t = solve_binary_quadratic(a, b, c)[0]
        p = s * u + t * v
        try:
            tangents_from_point(pair.D.matrix, p)
        except (BranchCollapse, NumericalTangency):
            continue
        out.append(ProjPoint(p))
    return out


def correspondence_member(pair, p, l, tol: float = 1e-9) -> bool:
    return max(residuals(pair, p, l)) < tol


def e_curve_residual(pair, r, u) -> complex:
    """u0^2 r1^3 - u1^2 det(r0 C + r1 D) with r, u max-modulus normalized."""
    pair = as_pair(pair)
    r0, r1 = max_modulus_normalize(getattr(r, "coords", r))
    u0, u1 = max_modulus_normalize(getattr(u, "coords", u))
    det = np.linalg.det(r0 * pair.C.matrix + r1 * pair.D.matrix)
    return complex(u0**2 * r1**3 - u1**2 * det)


@dataclass(frozen=True)
class Trace:
    states: tuple
    residuals: tuple
    closure_error: float
    closed: bool


def trace(pair, p0, steps: int = 3, close_tol: float = 1e-8, tol: Tolerance = DEFAULT_TOL) -> Trace:
    pair = as_pair(pair)
    states = orbit(pair, initial_state(pair, p0, tol), steps, tol)
    err = states[-1].point.distance(states[0].point)
    return Trace(
        states=tuple(states),
        residuals=tuple(s.residuals(pair) for s in states),
        closure_error=float(err),
        closed=bool(err < close_tol),
    )
