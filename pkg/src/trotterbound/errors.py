"""Exception types shared across the package.

The CLI maps these onto process exit codes: config problems exit 2,
numerical-health problems (including reference convergence failures)
exit 3, capacity overruns exit 4.
"""


class TrotterBoundError(Exception):
    """Base class for package errors."""


class ConfigError(TrotterBoundError):
    """Invalid experiment configuration or config file."""


class CapacityError(TrotterBoundError):
    """Requested system size exceeds the supported cap for an operation."""


class NumericalHealthError(TrotterBoundError):
    """A numerical invariant was violated (norm drift, overlap overshoot, ...)."""


class ConvergenceError(NumericalHealthError):
    """An iterative refinement failed to converge within its budget."""
