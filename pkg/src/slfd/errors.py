"""Exception types shared across the package."""


class SlfdError(Exception):
    """Base class for all solver errors."""


class InvalidParameter(SlfdError):
    """A structural parameter (mesh size, node count, config value) is out of range."""


class NonConvergence(SlfdError):
    """An internal series failed to reach tolerance within its iteration cap."""


class DimensionMismatch(SlfdError):
    """Sample arrays are not dimensioned to the grid that consumes them."""


class EvaluationError(SlfdError):
    """A potential evaluated non-finite at a required abscissa."""


class SingularTransfer(SlfdError):
    """Wronskian denominator collapsed during the transfer recurrence."""


class BracketFailure(SlfdError):
    """The eigenvalue scan found fewer sign changes than requested."""

    def __init__(self, found: int, needed: int, cap: float):
        super().__init__(
            f"found {found} sign changes, needed {needed}, scanning up to "
            f"lambda = {cap:g}; retry with a finer scan step"
        )
        self.found = found
        self.needed = needed
        self.cap = cap


class NormDegenerate(SlfdError):
    """An assembled eigenfunction has numerically vanishing L2 norm."""


class DomainError(SlfdError):
    """Evaluation requested outside the open interval (-1, 1)."""


class ExprSyntaxError(SlfdError):
    """Malformed expression text; carries the byte offset and what was expected."""

    def __init__(self, offset: int, expected: str):
        super().__init__(f"syntax error at offset {offset}: expected {expected}")
        self.offset = offset
        self.expected = expected


class UnknownIdentifier(SlfdError):
    """An identifier other than `x` or a supported function name."""

    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} at offset {offset}")
        self.name = name
        self.offset = offset


class NonFiniteValue(SlfdError):
    """An expression produced a non-finite value at some point x."""

    def __init__(self, x: float, subexpression: str):
        super().__init__(f"non-finite value at x = {x!r} in {subexpression!r}")
        self.x = x
        self.subexpression = subexpression


class StagnationWarning(UserWarning):
    """Correction norms grew for several consecutive ranks (series may diverge)."""
