"""Exception hierarchy shared by every module.

Domain errors (bad arguments for the mathematics) map to CLI exit status 2,
non-convergence to exit status 3.
"""


class CritStripError(Exception):
    """Base class for all toolkit errors."""


class DomainError(CritStripError, ValueError):
    """Argument lies outside the region where the quantity is defined."""


class PoleAt1(DomainError):
    pass


class DegenerateDenominator(DomainError):
    """1 - 2**(1-s) vanishes (s = 1 + 2*pi*i*k/log 2, k != 0)."""


class OutsideRegionA(DomainError):
    """Re(s) <= 1 where only the absolutely convergent region is allowed."""


class OutsideDomain(DomainError):
    pass


class DomainProximity(DomainError):
    """Too close to x = 1/2, where zeta(2x) blows up."""


class MeshMismatch(DomainError):
    """A shift is not an integer multiple of the sampling mesh."""


class DomainExceeded(DomainError):
    pass


class NonConvergence(CritStripError, ArithmeticError):
    """An accelerated evaluation failed to meet its tolerance."""
