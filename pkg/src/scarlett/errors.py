"""Exception types shared across modules; the CLI maps them to exit codes."""


class ScarlettError(Exception):
    exit_code = 1


class ConfigError(ScarlettError, ValueError):
    exit_code = 2


class CapacityError(ScarlettError, MemoryError):
    """A basis or matrix would exceed the configured size limit."""

    exit_code = 3


class ConvergenceError(ScarlettError, ArithmeticError):
    exit_code = 4


class StateNotFoundError(ScarlettError, KeyError):
    pass
