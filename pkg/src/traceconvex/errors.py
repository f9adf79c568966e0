"""Exception hierarchy shared by every layer of the package."""


class TraceConvexError(Exception):
    pass


class InputError(TraceConvexError, ValueError):
    pass


class ParseError(InputError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ResourceError(TraceConvexError):
    pass


class NumericalError(TraceConvexError, ArithmeticError):
    pass


class NotPSD(NumericalError):
    def __init__(self, eigenvalue):
        super().__init__(f"matrix is not positive semidefinite (eigenvalue {eigenvalue!r})")
        self.eigenvalue = eigenvalue


class NotNonnegative(TraceConvexError):
    """A polynomial takes a negative value; ``witness`` is a point where it does."""

    def __init__(self, witness, value, message=None):
        super().__init__(message or f"polynomial is negative at x = {witness} (value {value})")
        self.witness = witness
        self.value = value


class NotNonnegativeOnInterval(NotNonnegative):
    pass


class NotConvex(TraceConvexError):
    def __init__(self, witness, value, message=None):
        super().__init__(message or f"not convex: p''({witness}) = {value} < 0")
        self.witness = witness
        self.value = value


class NotConvexOnInterval(NotConvex):
    pass


class InternalError(TraceConvexError, AssertionError):
    pass
