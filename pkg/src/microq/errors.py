"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2, model
definition or state-space problems exit 3, iterative solvers that fail to
converge exit 4.
"""


class MicroqError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(MicroqError):
    """Invalid, missing, or contradictory configuration input."""


class ModelDefinitionError(MicroqError):
    """A reaction network is self-inconsistent (bad propensity, bad effect)."""


class BoundsViolationError(ModelDefinitionError):
    """A channel fired where its effect leaves the state box.

    A channel whose effect would violate a component bound must have zero
    propensity there; firing anyway means the model definition is wrong.
    """


class StateSpaceTooLargeError(MicroqError):
    """Enumeration or dense integration was asked for too many states."""


class ReducibleChainError(MicroqError):
    """The enumerated chain is not irreducible, so no unique stationary law."""

    def __init__(self, message, blocks=None):
        super().__init__(message)
        self.blocks = blocks or []


class ConvergenceError(MicroqError):
    """An iterative solver hit its sweep cap without meeting tolerance."""

    def __init__(self, message, last_value=None):
        super().__init__(message)
        self.last_value = last_value
