"""Exception and warning classes shared across the package."""


class MonoratError(Exception):
    """Base class for all package errors."""


class DomainError(MonoratError, ValueError):
    pass


class DegenerateInput(MonoratError, ValueError):
    pass


class SchemaError(MonoratError, ValueError):
    pass


class DegreeError(MonoratError, ValueError):
    pass


class ParityError(MonoratError, ValueError):
    pass


class CertificateMissing(MonoratError):
    pass


class DimensionMismatch(MonoratError, ValueError):
    pass


class NoConvergence(MonoratError):
    """Iterative solver gave up; carries the last iterate and its residual."""

    def __init__(self, message, x=None, residual=None, iterations=None):
        super().__init__(message)
        self.x = x
        self.residual = residual
        self.iterations = iterations


class SignConditionViolated(MonoratError):
    pass


class SingularJacobian(MonoratError):
    pass


class SlopeTooSmall(MonoratError, ValueError):
    pass


class LevelNotBracketed(MonoratError):
    pass


class PatternViolation(MonoratError):
    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class InvalidEpsilon(MonoratError, ValueError):
    pass


class NonPositiveSlope(MonoratError):
    pass


class GammaUnderflow(MonoratError):
    """No admissible bump scale was found; ``partial`` holds the last good report."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class OverflowRisk(UserWarning):
    """Polynomial expansion of a multi-scale kernel form loses accuracy."""
