"""Exception types shared across the package."""


class SiegelLabError(ValueError):
    """Base class for all siegellab errors."""


class NonFundamentalDiscriminantError(SiegelLabError):
    """Raised when a discriminant is zero, one, or not fundamental."""


class NonInvertibleError(SiegelLabError):
    """Raised when a residue has no inverse for the given modulus."""


class RangeError(SiegelLabError):
    """Raised when an argument violates a documented precondition."""


class BudgetExceededError(SiegelLabError):
    """Raised when a request would exceed the memory or compute budget."""
