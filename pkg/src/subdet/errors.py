"""Exception hierarchy shared by all solvers."""


class SubdetError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SubdetError, ValueError):
    """Bad input: malformed matrix, subset, config or generator spec."""


class InvalidSubsetError(ValidationError):
    pass


class InstanceTooLargeError(ValidationError):
    pass


class InsufficientDataError(ValidationError):
    pass


class InvalidKernelError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class NumericalError(SubdetError, ArithmeticError):
    """A computation broke down on otherwise well-formed input."""


class NotPositiveDefiniteError(NumericalError):
    """Triangular factorization hit a non-positive pivot.

    ``pivot`` is the 0-based index of the failing pivot.
    """

    def __init__(self, pivot, value=None):
        self.pivot = pivot
        self.value = value
        msg = f"matrix is not positive definite (pivot {pivot}"
        if value is not None:
            msg += f" = {value:.3g}"
        super().__init__(msg + ")")


class ObjectiveUndefinedError(NotPositiveDefiniteError):
    """The objective matrix for a subset is singular or indefinite."""


class HeuristicInapplicableError(NumericalError):
    pass


class NumericalFailure(NumericalError):
    pass
