"""Exception types shared by the whole package."""


class LocalSelbergError(Exception):
    """Base class for all package errors."""


class PrecisionError(LocalSelbergError, ArithmeticError):
    """A p-adic quantity could not be resolved at the working precision."""


class PoleError(LocalSelbergError, ZeroDivisionError):
    """A gamma factor was requested at one of its poles."""


class RegionError(LocalSelbergError, ValueError):
    """Parameters lie outside the region where an identity is valid."""


class BudgetError(LocalSelbergError, RuntimeError):
    """An engine ran out of its strata / enumeration budget."""


class TailNotDecaying(LocalSelbergError, RuntimeError):
    """Outer-shell increments failed to decrease geometrically."""


class SingularInput(LocalSelbergError, ValueError):
    """An integrand was evaluated on its singular locus."""


class UnsupportedDegree(LocalSelbergError, ValueError):
    """Splitting-type detection only covers tame polynomials of degree <= 4."""
