"""Exception and warning types raised across the package."""


class TPKError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(TPKError, ValueError):
    pass


class NonOrthonormalBasis(TPKError, ValueError):
    pass


class CertificateFailure(TPKError, ArithmeticError):
    """A computed object failed its numerical certificate.

    Usually means two tolerances in a pipeline disagree about a
    near-degenerate direction.
    """


class InvalidForm(TPKError, ValueError):
    pass


class NoConvergence(TPKError, RuntimeError):
    """Raised when an iterative schedule is exhausted.

    The partial result is kept on the exception so callers can still
    inspect it.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NotPositive(TPKError, ValueError):
    pass


class BadGrid(TPKError, ValueError):
    pass


class GridMismatch(TPKError, ValueError):
    pass


class InvalidSpec(TPKError, ValueError):
    pass


class UnknownSuite(TPKError, KeyError):
    pass


class SchemaError(TPKError, ValueError):
    pass


class DegenerateGenericPart(UserWarning):
    """The generic part H5 (+) H6 of a Halmos decomposition is empty."""


class IoError(TPKError, OSError):
    """An input or output file could not be read, parsed or written."""
