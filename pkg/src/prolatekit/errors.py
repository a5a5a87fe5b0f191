"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit-code contract: parameter/validation
problems exit 2, tolerance breaches exit 3, declared-unsupported
parameter combinations exit 4.
"""


class ProlateKitError(Exception):
    """Base class for all package errors."""


class ParameterError(ProlateKitError, ValueError):
    """An argument is outside its documented range."""


class DataError(ProlateKitError, ValueError):
    """Input data is malformed (non-finite entries, wrong shape, ...)."""


class ValidationError(ProlateKitError, ValueError):
    """A user-supplied object fails a structural check (e.g. a basis that
    does not span a standard subspace); carries the failing diagnostic."""


class ConditioningError(ProlateKitError, ArithmeticError):
    """A factorization failed or a matrix is too ill-conditioned to trust."""


class DegenerateSpectrumError(ProlateKitError, ArithmeticError):
    """A modular operator has spectrum at 1, where the cutting-projection
    formula has a pole (non-factorial direction)."""


class UnsupportedError(ProlateKitError, NotImplementedError):
    """A parameter combination that is declared out of scope."""


class ToleranceFailure(ProlateKitError):
    """A certificate exceeded its stated tolerance.

    ``checks`` lists the failing check names so reports can name them.
    """

    def __init__(self, message, checks=()):
        super().__init__(message)
        self.checks = list(checks)
