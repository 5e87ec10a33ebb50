"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration/validation problems
exit 2, numerical failures exit 3, I/O problems exit 4.
"""


class SpinSenseError(Exception):
    """Base class for all package errors."""


class ValidationError(SpinSenseError, ValueError):
    """Invalid argument, state, or configuration value."""


class DimensionMismatchError(ValidationError):
    """Operands live in different Hilbert spaces."""


class DegenerateCatError(ValidationError):
    """Cat state requested with z = 0, which collapses to a single branch."""


class OracleScaleError(ValidationError):
    """Brute-force oracle requested beyond its hard qubit cap."""


class NoMeanSpinError(SpinSenseError):
    """Mean spin vector vanishes; mean-spin-based estimators are undefined."""


class UnsupportedConfigurationError(SpinSenseError):
    """Physically ambiguous configuration the package refuses to guess at."""


class NumericalError(SpinSenseError):
    """A numerical procedure failed (bracket failure, ill-conditioned fit, ...)."""


class InsufficientDataError(NumericalError):
    """Not enough valid points for the requested fit."""


class SelectivityWarning(UserWarning):
    """Drive too strong for the selective-pulse approximation to hold."""
