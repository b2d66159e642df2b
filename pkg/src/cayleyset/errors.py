"""Exception hierarchy shared by every module of the package."""


class CayleySetError(Exception):
    """Base class for numerical and geometric failures."""


class DegreeError(CayleySetError):
    pass


class NonFinite(CayleySetError):
    pass


class SingularConic(CayleySetError):
    pass


class SingularTransform(CayleySetError):
    pass


class DegeneratePencil(CayleySetError):
    """The pencil det(tC + D) has a repeated root (the conics are tangent)."""


class NotTransverse(DegeneratePencil):
    pass


class BranchPole(CayleySetError):
    pass


class BadOrder(CayleySetError, ValueError):
    pass


class SamplingExhausted(CayleySetError):
    pass


class RepeatedLambda(CayleySetError):
    pass


class CriticalZ(CayleySetError, ValueError):
    pass


class ResultantIllConditioned(CayleySetError):
    pass


class BranchCollapse(CayleySetError):
    pass


class NumericalTangency(CayleySetError):
    pass


class IllConditioned(UserWarning):
    """Warning: pencil roots are close enough that results lose accuracy."""
