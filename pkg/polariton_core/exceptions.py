"""
Exception hierarchy and the handler that turns it into command exit codes
"""
from django.core.management.base import CommandError
from rest_framework.exceptions import ValidationError
import logging

logger = logging.getLogger('polariton_core')

CONFIG_EXIT_CODE = 2
NUMERIC_EXIT_CODE = 3


class PolaritonError(Exception):
    """Base exception for numerical and configuration failures"""
    pass


class ConfigurationError(PolaritonError):
    """Raised when a configuration document or flag is invalid"""
    pass


class EmptyShellError(PolaritonError):
    """Raised when a lattice cutoff encloses no sites"""
    pass


class NormalizationError(PolaritonError):
    """Raised when a direction vector is not a unit vector"""
    pass


class AnisotropyError(PolaritonError):
    """Raised when transverse structure-factor eigenvalues are not degenerate"""

    def __init__(self, message, eigenvalues=()):
        super().__init__(message)
        self.eigenvalues = tuple(eigenvalues)


class ConvergenceError(PolaritonError):
    """Raised when a series does not reach its tolerance within the iteration cap"""

    def __init__(self, message, partial=None, error_bound=None):
        super().__init__(message)
        self.partial = partial
        self.error_bound = error_bound


class AlgebraViolationError(PolaritonError):
    """Raised when an operator identity fails"""

    def __init__(self, message, relation='', report=None):
        super().__init__(message)
        self.relation = relation
        self.report = report


class DomainError(PolaritonError):
    """Raised when an argument lies outside the domain of an operation"""
    pass


class SizeError(PolaritonError):
    """Raised when a truncated operator space would be too large"""
    pass


class ShapeError(PolaritonError):
    """Raised when matrix dimensions disagree with the mode labels"""
    pass


class MalformedFormError(PolaritonError):
    """Raised when a quadratic form has non-Hermitian A or asymmetric B"""
    pass


class SoftModeError(PolaritonError):
    """Raised when a renormalized frequency becomes imaginary"""
    pass


class PhaseDomainError(PolaritonError):
    """Raised when a phase-specific formula is used in the wrong phase"""
    pass


class StabilityError(PolaritonError):
    """Raised when an operation needs a dynamically stable form"""
    pass


class BracketingError(PolaritonError):
    """Raised when bracketed root search finds the wrong number of roots"""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class MeasurementParseError(ConfigurationError):
    """Raised when a measurement file row cannot be parsed"""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class MeasurementValidationError(ConfigurationError):
    """Raised when a measurement row holds non-physical values"""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line


class EmptyDatasetError(ConfigurationError):
    """Raised when a measurement file holds no rows"""
    pass


class NoDataError(PolaritonError):
    """Raised when there is nothing to render"""
    pass


def command_exception_handler(exc, command_name):
    """
    Map an exception raised inside a command onto a CommandError with the
    matching exit code. Unknown exceptions are re-raised unchanged.
    """
    if isinstance(exc, CommandError):
        return exc

    if isinstance(exc, (ConfigurationError, ValidationError)):
        detail = exc.detail if isinstance(exc, ValidationError) else str(exc)
        logger.warning(f"Configuration error in {command_name}: {exc.__class__.__name__} - {detail}")
        return CommandError(f"{exc.__class__.__name__}: {detail}", returncode=CONFIG_EXIT_CODE)

    if isinstance(exc, PolaritonError):
        logger.error(f"Numeric failure in {command_name}: {exc.__class__.__name__} - {exc}", exc_info=True)
        return CommandError(f"{exc.__class__.__name__}: {exc}", returncode=NUMERIC_EXIT_CODE)

    raise exc
