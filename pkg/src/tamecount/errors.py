"""Exception types raised across the package."""


class TameCountError(Exception):
    """Base class for package errors."""


class InvalidGroupError(TameCountError, ValueError):
    pass


class InvalidWeightError(TameCountError, ValueError):
    pass


class CoprimalityError(TameCountError, ValueError):
    pass


class ParameterError(TameCountError, ValueError):
    pass


class DivergenceError(TameCountError, ArithmeticError):
    pass


class SingularFactorError(TameCountError, ArithmeticError):
    pass


class InvalidPartitionError(TameCountError, ValueError):
    pass


class ConfigError(TameCountError, ValueError):
    """Bad user configuration (maps to CLI exit status 1)."""
