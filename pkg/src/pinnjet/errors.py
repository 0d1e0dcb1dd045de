"""Exception types shared across the package.

Each class marks one failure category so callers can react precisely:
configuration problems abort setup, numeric problems abort one run but
not its siblings, accuracy problems flag an oracle that cannot be trusted.
"""


class PinnjetError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(PinnjetError, ValueError):
    """Invalid configuration value (order, dimension, bounds, layer size)."""


class ShapeError(PinnjetError, ValueError):
    """Operands with mismatched jet order/dims or array shapes."""


class NumericError(PinnjetError, ArithmeticError):
    """NaN/Inf produced during evaluation, backward pass, or an update step."""


class DomainError(PinnjetError, ValueError):
    """Point outside the problem domain or off the required manifold."""


class AccuracyError(PinnjetError, ArithmeticError):
    """A reference oracle failed its own convergence check."""


class SolverError(PinnjetError, ArithmeticError):
    """An iterative reference solver diverged or stalled."""


class MetricError(PinnjetError, ValueError):
    """Undefined metric (e.g., zero reference norm)."""


class UsageError(PinnjetError, ValueError):
    """Malformed CLI invocation or experiment config file."""
