"""Exception types raised by the regularization library.

Every error that signals a state outside the domain of a map derives from
``DomainError``; the command line turns those into exit code 2.
"""


class DomainError(ValueError):
    """A state lies outside the domain of the requested operation."""


class CollisionState(DomainError):
    pass


class ZeroEnergy(DomainError):
    pass


class NonNegativeEnergy(DomainError):
    pass


class DegenerateDenominator(DomainError):
    pass


class NorthPole(DomainError):
    pass


class ZeroZ(DomainError):
    pass


class ZeroY(DomainError):
    pass


class ZeroPoint(DomainError):
    pass


class PrimaryCollision(DomainError):
    pass


class NonFinite(DomainError):
    pass


class NoRootInBracket(DomainError):
    pass


class ZeroGradient(DomainError):
    pass


class EvaluationFailed(DomainError):
    pass


class InfeasibleStart(DomainError):
    pass


class AllNegative(DomainError):
    pass
