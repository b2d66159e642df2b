"""Quick property checks bundled with the package (``cayleyset selftest``).

These are lighter than the pytest suite and need nothing beyond the
runtime dependencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cayley import cayley_condition_n, cayley_gamma, sqrt_series
from .dynamics import random_start_points, triangle_closure
from .elliptic import fiber_solutions, j_from_lambda, j_from_sigma
from .gradients import random_gradcheck, submersion_tangents
from .moduli import OMEGA, act, diagonal_pair, isotropy_group, moduli_point, special_pair
from .numeric import DEFAULT_TOL, Tolerance
from .pencil import circles_pair, random_transform, random_transverse_pair


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _chapple():
    return circles_pair(3.0, 1.0, np.sqrt(3.0))


def run_selftest(seed: int = 42, tol: Tolerance = DEFAULT_TOL) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []

    pair = _chapple()
    g = abs(cayley_gamma(pair, tol)) / np.max(np.abs(pair.sigma)) ** 2
    errs = [triangle_closure(pair, p, tol) for p in random_start_points(pair, seed, 5)]
    out.append(Check("chapple closes", g < 1e-9 and max(errs) < 1e-8, f"gamma={g:.2e} closure={max(errs):.2e}"))

    neg = diagonal_pair([1, 2, 3])
    gamma = cayley_gamma(neg, tol)
    errs = [triangle_closure(neg, p, tol) for p in random_start_points(neg, seed, 5)]
    out.append(Check("negative control", abs(gamma - 23) < 1e-12 and min(errs) > 1e-3, f"gamma={gamma.real:g} min closure={min(errs):.2e}"))

    worst = 0.0
    for _ in range(20):
        p = random_transverse_pair(rng)
        lam = moduli_point(p, tol).lam
        a, b = j_from_sigma(p.sigma, tol), j_from_lambda(lam, tol)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    j0 = abs(j_from_lambda([1, OMEGA, OMEGA**2], tol))
    out.append(Check("j cross-check", worst < 1e-10 and j0 < 1e-12, f"max rel diff={worst:.2e}"))

    rec = fiber_solutions(100.0, tol)
    out.append(Check("fiber z=100", rec.total_with_multiplicity == 24 and rec.simple and rec.max_residual < 1e-8, f"total={rec.total_with_multiplicity} orbits={rec.orbit_count}"))

    orders = (isotropy_group(neg, tol).order, isotropy_group(special_pair(), tol).order)
    out.append(Check("isotropy orders", orders == (4, 12), f"orders={orders}"))

    reps = random_gradcheck(seed=seed, count=5)
    st = submersion_tangents(random_transverse_pair(rng), tol)
    zeros = max(abs(st.T1[1]), abs(st.T1[2]), abs(st.T2[0]), abs(st.T2[2]))
    out.append(Check("gradients", all(r.passed for r in reps) and zeros < 1e-10, f"worst={max(r.worst for r in reps):.2e}"))

    p = random_transverse_pair(rng)
    m0 = moduli_point(p, tol)
    drift = max(m0.distance(moduli_point(act(random_transform(rng), p), tol)) for _ in range(10))
    out.append(Check("orbit invariance", drift < 1e-8, f"drift={drift:.2e}"))

    s = sqrt_series(pair.sigma, 3)
    ident = abs(8 * s[0] ** 3 * s[2] - cayley_gamma(pair, tol))
    verdict = cayley_condition_n(pair, 3, tol)
    out.append(Check("hankel n=3", verdict.satisfied and ident < 1e-10, f"identity residual={ident:.2e}"))
    return out
