"""
Warnings and errors raised by roughlog.

Failed property checks are not errors: checks return their measured violation.
The exceptions below signal violated hypotheses or numerical breakdown.
"""
from astropy.utils.exceptions import AstropyUserWarning

__all__ = ['RoughlogUserWarning', 'RoughlogError', 'DegenerateDomainError', 'AssemblyError',
           'EllipticityError', 'MaskMismatchError', 'PositivityRequiredError', 'DenseCapError',
           'ConvergenceError', 'SolverFailure', 'PreconditionError', 'MonotonicityError',
           'UniquenessError', 'ConfigError']


class RoughlogUserWarning(AstropyUserWarning):
    """
    The primary warning class for roughlog.

    Use this if you do not need a specific type of warning.
    """


class RoughlogError(Exception):
    """
    Base class for roughlog errors.
    """


class DegenerateDomainError(RoughlogError, ValueError):
    """
    A rasterized domain has no interior cells.
    """


class AssemblyError(RoughlogError, ValueError):
    """
    An operator can not be assembled from the given boundary data.
    """


class EllipticityError(RoughlogError, ValueError):
    """
    Diffusion coefficients fail the ellipticity condition.

    Parameters
    ----------
    message : `str`
    cell : `int`
        Index of the offending interior cell.
    alpha : `float`
        Smallest eigenvalue of the symmetrized tensor at that cell.
    """

    def __init__(self, message, cell=None, alpha=None):
        super().__init__(message)
        self.cell = cell
        self.alpha = alpha


class MaskMismatchError(RoughlogError, ValueError):
    """
    Two objects live on different domain masks.
    """


class PositivityRequiredError(RoughlogError, ValueError):
    """
    An operation that relies on positivity was given a non Z-matrix operator or a
    disconnected domain.
    """


class DenseCapError(RoughlogError, ValueError):
    """
    A dense computation was requested above ``conf.dense_cap``.
    """


class ConvergenceError(RoughlogError, RuntimeError):
    """
    An iteration or search did not converge.

    Parameters
    ----------
    message : `str`
    residual : `float`, optional
        The last residual reached.
    diagnostics : `dict`, optional
        Anything else worth reporting (last search value, iteration count, ...).
    """

    def __init__(self, message, residual=None, diagnostics=None):
        super().__init__(message)
        self.residual = residual
        self.diagnostics = diagnostics or {}


class SolverFailure(RoughlogError, ArithmeticError):
    """
    A linear solve failed.

    Parameters
    ----------
    message : `str`
    condition : `float`, optional
        One-norm condition estimate of the system matrix.
    """

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class PreconditionError(RoughlogError, ValueError):
    """
    The hypotheses of a construction are not satisfied.
    """


class MonotonicityError(RoughlogError, RuntimeError):
    """
    A monotone iteration stopped being monotone.
    """


class UniquenessError(RoughlogError, RuntimeError):
    """
    The iterations from above and below reached different limits.
    """


class ConfigError(RoughlogError, ValueError):
    """
    An experiment configuration is invalid.

    Parameters
    ----------
    path : `str`
        Dotted path of the offending field, e.g. ``operator.bc.beta``.
    message : `str`
    """

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
