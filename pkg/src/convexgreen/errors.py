"""Exception types shared across the package."""


class ConvexGreenError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(ConvexGreenError, ValueError):
    """Bad shapes, dimension mismatches, out-of-range parameters."""


class SolverError(ConvexGreenError, RuntimeError):
    """The dense LP routine failed to reach a verdict."""


class DegenerateBodyError(ConvexGreenError, ValueError):
    """A body lacks the non-degeneracy a construction needs."""


class UnsupportedConfigurationError(ConvexGreenError, ValueError):
    """No closed form (or exact path) is available for this configuration."""


class ResourceError(ConvexGreenError, RuntimeError):
    """An enumeration or expansion exceeded its configured budget."""


class QuadratureError(ConvexGreenError, RuntimeError):
    """Gram matrix numerically singular for the requested node count."""

    def __init__(self, message, required_nodes=None):
        super().__init__(message)
        self.required_nodes = required_nodes


class NoWitnessError(ConvexGreenError, ValueError):
    """A counterexample construction does not apply to the given input."""


class NotApplicableError(ConvexGreenError, ValueError):
    """A theorem's hypothesis fails, so no witness exists (e.g. simplex S)."""
