"""Exception hierarchy shared across the package."""


class ReachError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(ReachError, ValueError):
    pass


class InvalidInterval(ReachError, ValueError):
    pass


class EmptyIntersection(ReachError):
    """Two enclosures of the same quantity do not overlap.

    Both operands are supposed to contain the true reachable set, so this
    always signals a soundness bug rather than a legitimate outcome.
    """


class UnknownActivation(ReachError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ShapeViolation(ReachError, ValueError):
    pass


class DerivativeMismatch(ReachError, ValueError):
    pass


class SchemaError(ReachError, ValueError):
    pass


class ShapeMismatch(SchemaError):
    pass


class MissingPairs(ReachError, ValueError):
    pass
