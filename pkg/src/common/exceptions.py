class LabError(Exception):
    """Base class for every error raised by the lab's numerical code."""


class DomainError(LabError, ValueError):
    """An argument lies outside the domain of the operation."""


class PreconditionError(LabError):
    """The inputs are well-formed but violate a stated precondition."""


class SingularSystemError(LabError):
    """The assembled linear system is singular."""


class NonConvergenceError(LabError):
    """
    An iterative solve stopped without reaching its tolerance. Carries the
    final residual and, for nonlinear solves, the residual history.
    """

    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = list(history or [])


class MaximumPrincipleError(LabError):
    """The discrete maximum principle diagnostic failed where it is required."""

    def __init__(self, message='MP hypothesis violated', report=None):
        super().__init__(message)
        self.report = report


class ConfigurationError(LabError):
    """An experiment config is invalid; raised before any solve starts."""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = errors or {}
