"""Exception hierarchy shared by the library and mapped to CLI exit codes."""


class SNSSError(Exception):
    """Base class for all package errors."""


class ConfigError(SNSSError, ValueError):
    """Invalid run configuration or command-line option (exit code 2)."""


class DataError(SNSSError, ValueError):
    """Malformed or unusable input data (exit code 3)."""


class EmptyBlockError(DataError):
    """A partition block required by an estimator is empty or too small."""

    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block


class NumericError(SNSSError, ArithmeticError):
    """Numerical failure such as a non-SPD matrix (exit code 4)."""


class NotPositiveDefiniteError(NumericError):
    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
