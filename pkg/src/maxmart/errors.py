"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class StateError(RuntimeError):
    """An object is missing data required by the requested operation."""


class ResourceLimitError(RuntimeError):
    """A request would exceed a configured resource limit (e.g. step count)."""


class InsufficientDataError(ValueError):
    """Not enough samples fell into the requested window."""

    def __init__(self, message, occupancy=0):
        super().__init__(message)
        self.occupancy = occupancy


class NumericError(ArithmeticError):
    """A numerical routine failed to reach its tolerance."""

    def __init__(self, message, achieved_tolerance=float("nan")):
        super().__init__(message)
        self.achieved_tolerance = achieved_tolerance
