"""Exception types shared across the package."""


class PilotGuardError(Exception):
    """Base class for all package errors."""


class ParameterError(PilotGuardError, ValueError):
    """An argument violates a documented precondition."""


class NotPSDError(PilotGuardError):
    """A matrix required to be positive semidefinite is not.

    Carries the index of the Cholesky pivot that went negative, so callers
    can report which variable (or which correlation setting) broke
    semidefiniteness.
    """

    def __init__(self, message, pivot_index):
        super().__init__(message)
        self.pivot_index = pivot_index


class SingularError(PilotGuardError):
    """A matrix inversion was rejected as numerically singular."""


class AlphaInfeasibleError(PilotGuardError):
    """The power-matching scale of the correlated attack has no real value.

    Raised when the target gram trace is below the attack-free part of the
    induced channel's second moment, which would require an imaginary scale.
    """


class InsufficientEntropyError(PilotGuardError):
    """The guard-band quantizer kept no samples, so no key bits exist."""


class ConfigError(PilotGuardError, ValueError):
    """An experiment configuration field is invalid. Carries the field name."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
