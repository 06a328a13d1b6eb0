"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration or parameter set."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class MissingKey(ConfigError):
    pass


class TypeMismatch(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class SolverError(RuntimeError):
    pass


class NewtonDiverged(SolverError):
    """Newton iteration failed to reach the residual tolerance."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class StepUnderflow(SolverError):
    """Step size fell below ``dt_min``; ``partial`` holds the trajectory so far."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class AUpperBoundViolated(ValueError):
    """A snapshot exceeds the entropy upper bound ``A``."""


class DegenerateDenominator(ZeroDivisionError):
    """The normalising norm of a ratio vanishes."""
