"""Exception types. Each carries the process exit code the CLI uses for it."""


class EmergeError(Exception):
    exit_code = 1


class ModelError(EmergeError, ValueError):
    """A model definition is invalid."""

    exit_code = 10

    def __init__(self, message, *, line=None, field=None):
        self.detail = message
        self.line = line
        self.field = field
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field is not None:
            prefix.append(f"field '{field}'")
        if prefix:
            message = f"{', '.join(prefix)}: {message}"
        super().__init__(message)


class ParseError(ModelError):
    exit_code = 10


class RangeError(ModelError):
    exit_code = 11


class DuplicateLocationError(ModelError):
    exit_code = 12


class CoprimeError(ModelError):
    exit_code = 13


class CapacityError(EmergeError):
    """A dense or exhaustive computation would exceed its configured budget."""

    exit_code = 20


class ToleranceError(EmergeError):
    """A numerical check exceeded its tolerance."""

    exit_code = 30


class InfeasibleDiagonalError(ToleranceError):
    """No switch program puts every diagonal entry within half a grid step."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class SimultaneousFiringWarning(UserWarning):
    """Several switch terms acted on one trajectory in a single step.

    The result then depends on the declared order of the switch list.
    """
