"""Exception hierarchy shared by all modules."""


class LrisingError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(LrisingError, ValueError):
    """Invalid model or sweep parameters."""


class DomainError(LrisingError, ValueError):
    """Argument outside the domain of a formula."""


class UndefinedSqueezingError(DomainError):
    """The mean spin along the parallel axis vanishes."""


class DegenerateInputError(DomainError):
    """Input data carry no usable signal (e.g. all correlators vanish)."""


class CapacityError(LrisingError):
    """Problem size exceeds what the requested method supports."""


class ContractError(LrisingError):
    """A caller passed an object that violates an operation's precondition."""


class ConvergenceError(LrisingError):
    """An iterative solver stopped before reaching its tolerance."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class FitError(LrisingError):
    """A least-squares fit failed; ``data`` keeps the raw inputs."""

    def __init__(self, message, data=None):
        super().__init__(message)
        self.data = data
