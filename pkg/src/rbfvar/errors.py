"""Exception types raised by rbfvar."""


class RbfVarError(Exception):
    """Base class for all rbfvar errors."""


class DomainError(RbfVarError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConfigurationError(RbfVarError, ValueError):
    """An experiment or problem is configured inconsistently."""


class NumericError(RbfVarError, ArithmeticError):
    """A numerical routine failed (non-finite data, bracket failure, ...)."""
