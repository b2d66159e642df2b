"""Numerics for Poncelet triangles: pencil invariants, Cayley's test, moduli and j-fibers."""

from .cayley import (
    CayleyVerdict,
    cayley_condition_n,
    cayley_gamma,
    sample_cayley,
    sqrt_series,
    trivialize_psi,
)
from .dynamics import PonceletState, poncelet_step, triangle_closure
from .elliptic import AtlasRecord, JValue, critical_sets_S, fiber_solutions, j_from_lambda, j_from_sigma
from .errors import CayleySetError
from .gradients import directional_derivative, eigenvalue_gradients, submersion_tangents
from .moduli import ModuliPoint, act, isotropy_group, moduli_point, normal_form
from .numeric import DEFAULT_TOL, ProjPoint, Tolerance, solve_cubic
from .pencil import Conic, ConicPair, circles_pair, discriminant, is_transverse, sigma_coefficients

__all__ = [
    "AtlasRecord",
    "CayleySetError",
    "CayleyVerdict",
    "Conic",
    "ConicPair",
    "DEFAULT_TOL",
    "JValue",
    "ModuliPoint",
    "PonceletState",
    "ProjPoint",
    "Tolerance",
    "act",
    "cayley_condition_n",
    "cayley_gamma",
    "circles_pair",
    "critical_sets_S",
    "directional_derivative",
    "discriminant",
    "eigenvalue_gradients",
    "fiber_solutions",
    "is_transverse",
    "isotropy_group",
    "j_from_lambda",
    "j_from_sigma",
    "moduli_point",
    "normal_form",
    "poncelet_step",
    "sample_cayley",
    "sigma_coefficients",
    "solve_cubic",
    "sqrt_series",
    "submersion_tangents",
    "triangle_closure",
    "trivialize_psi",
]
