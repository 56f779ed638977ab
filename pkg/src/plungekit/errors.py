class PlungeError(Exception):
    """Base class for all errors raised by plungekit."""


class InputError(PlungeError, ValueError):
    """Malformed, missing or invariant-violating input data or configuration."""


class NumericalError(PlungeError, ArithmeticError):
    """A numerical routine failed to meet its accuracy or convergence contract."""
