"""Exception types shared by all modules."""


class BrlabError(Exception):
    """Base class for library errors."""


class ConfigError(BrlabError, ValueError):
    """Invalid model, grid or quadrature configuration."""


class DomainError(BrlabError, ValueError):
    """Parameter outside the mathematical domain of an operation."""


class ArgumentError(BrlabError, ValueError):
    """Invalid argument (wrong exponent, empty grid, bad support...)."""


class DataError(BrlabError, ValueError):
    """Input data unusable for the requested estimate."""


class NumericError(BrlabError, ArithmeticError):
    """Non-finite values or failed numerical convergence."""


class ResourceError(BrlabError, RuntimeError):
    """A configured memory or work budget would be exceeded."""
