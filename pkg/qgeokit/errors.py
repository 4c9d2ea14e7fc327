# qgeokit/errors.py
# Exception hierarchy shared by the numeric modules and the runner.
from typing import Optional


class QGeoError(Exception):
    """Base class for every error raised by qgeokit."""


class ConfigError(QGeoError):
    """Bad run document, bad parameters, or unreadable/unwritable files."""


class BoundaryError(QGeoError):
    """A differential object was requested where some P^i is below the floor."""

    def __init__(self, message: str, index: Optional[int] = None, value: Optional[float] = None):
        super().__init__(message)
        self.index = index
        self.value = value


class GridError(QGeoError):
    """Parameter grid is not strictly increasing or does not span [0, 1]."""


class ConvergenceError(QGeoError):
    def __init__(self, message: str, last_length: float, iterations: int):
        super().__init__(f"{message} (last length {last_length:.17g} after {iterations} iterations)")
        self.last_length = last_length
        self.iterations = iterations


class AdmissibilityError(QGeoError):
    """Extension block A violates G A G^-1 = A^T."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class DimensionError(QGeoError):
    pass


class SingularMetricError(QGeoError):
    pass


class HermitianError(QGeoError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class NonconvergenceError(QGeoError):
    """Fixed-point iteration of the implicit midpoint step hit its cap."""

    def __init__(self, message: str, step: int, residual: float):
        super().__init__(message)
        self.step = step
        self.residual = residual


class ConditioningWarning(UserWarning):
    """Result is numerically unreliable (e.g. near-singular Jacobian)."""
