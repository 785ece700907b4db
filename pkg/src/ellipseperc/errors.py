"""Exception types shared across the package."""


class EllipsePercError(Exception):
    """Base class."""


class ValidationError(EllipsePercError, ValueError):
    """A precondition on user input was violated."""


class DomainError(ValidationError):
    """Argument outside the domain of a mathematical operation."""


class ModelError(EllipsePercError, RuntimeError):
    """The model cannot be simulated as requested."""


class InfiniteIntensity(ModelError):
    """Expected number of grains hitting a bounded window is infinite."""


class RejectionStall(ModelError):
    """A rejection sampler fell below its acceptance floor."""


class QuadratureError(ModelError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ResourceLimit(ModelError):
    """Requested computation exceeds a configured budget."""
