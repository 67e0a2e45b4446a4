"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: validation problems
exit 1, numerical convergence problems exit 2.
"""


class AbtofError(Exception):
    """Base class for all package errors."""


class ValidationError(AbtofError):
    """Invalid input data or configuration (CLI exit code 1)."""


class GeometryError(ValidationError):
    """Geometry violates a precondition, e.g. a contour cutting the solenoid."""


class SingularityError(ValidationError):
    """Field or force requested too close to a source point."""


class ConvergenceError(AbtofError):
    """A quadrature failed to reach the requested tolerance (CLI exit code 2)."""


class WindowError(ConvergenceError):
    """A time-integration window is too small for the requested tolerance."""


class ConfigError(ValidationError):
    """Run configuration file is malformed or contains unknown keys."""
