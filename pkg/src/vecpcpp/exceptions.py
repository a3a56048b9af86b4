"""Exception types shared across the package."""


class FieldMismatchError(ValueError):
    """Operands live in different fields."""


class ShapeError(ValueError):
    """Vector or matrix dimensions do not line up."""


class CapExceededError(RuntimeError):
    """An exhaustive computation would exceed its configured size cap."""


class NotASolutionError(ValueError):
    """An assignment was required to satisfy an instance but does not."""


class DimacsParseError(ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
