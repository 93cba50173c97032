import numpy as np


class QngError(Exception):
    """Base class for every error raised by qnglab."""


class InvalidParameter(QngError, ValueError):
    pass


class DomainError(QngError, ValueError):
    """A scalar function was asked for a value outside its domain."""


class DimensionMismatch(QngError, ValueError):
    pass


class InvalidDistribution(QngError, ValueError):
    pass


class InvalidBlochVector(QngError, ValueError):
    pass


class ConfigError(QngError, ValueError):
    pass


class NotHermitian(QngError, np.linalg.LinAlgError):
    pass


class ConvergenceFailure(QngError, np.linalg.LinAlgError):
    pass


class SingularState(QngError, np.linalg.LinAlgError):
    """Raised when a density operator has an eigenvalue below the floor."""


class SingularMetric(QngError, np.linalg.LinAlgError):
    pass


class VanishingGradient(QngError):
    """
    Raised by the step rules when the gradient is below tolerance.
    This is a convergence signal, not a failure.
    """
