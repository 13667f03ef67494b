"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: ParseError -> 2,
NumericError -> 3, DomainError -> 4. Everything else is a bug.
"""


class HermcalcError(Exception):
    """Base class for all errors raised deliberately by this package."""


class ParseError(HermcalcError):
    """Malformed input: bad JSON, wrong entry count, unknown function kind."""


class NumericError(HermcalcError):
    """A computation failed numerically (non-convergence, overflow)."""


class ConvergenceError(NumericError):
    """Iterative solver hit its iteration cap before reaching tolerance."""


class OverflowRangeError(NumericError):
    """Magnitudes too large for the floating-point range (exp overflow)."""


class DomainError(HermcalcError):
    """Input outside the supported domain (caps, radii, derivative orders)."""


class CapExceededError(DomainError):
    """An enumeration or derivative-order cap was exceeded."""


class RadiusError(DomainError):
    """A matrix lies outside the ball a table or bound was built for."""


class OrderSupportError(DomainError):
    """A scalar function cannot supply a derivative of the requested order."""


class GridError(NumericError):
    """A quadrature grid could not meet its tail or residual tolerance."""
