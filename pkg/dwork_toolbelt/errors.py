class DworkError(Exception):
    pass


class ConfigError(DworkError):
    """A profile, tower or job configuration failed validation."""

    pass


class DomainError(DworkError):
    pass


class PrecisionExhausted(DworkError):
    """A division needs more p-adic digits than the operands carry."""

    pass


class BudgetExceeded(DworkError):
    pass


class IntegralityError(DworkError):
    """Raised when a value that must be p-integral (or T-adically small) is not.

    This never depends on user input; it means a truncation bound is wrong.
    """

    pass


class SlopeAnalysisError(DworkError):
    pass
