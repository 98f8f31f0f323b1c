"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An argument violates a documented precondition."""


class OrderingError(ValueError):
    """A digraph's ordering is not a bijection or an edge points old -> young."""


class FeasibilityError(ValueError):
    """An explicit construction would exceed the configured size cap."""

    def __init__(self, message, predicted):
        super().__init__(message)
        self.predicted = predicted


class AssumptionError(ValueError):
    """A union of two witness copies violates the assumptions of the union analysis."""


class BudgetExceeded(RuntimeError):
    """A search ran out of its node budget before finishing.

    ``partial`` holds whatever was accumulated so far; it is not a valid answer.
    """

    def __init__(self, message, partial=None, nodes=0):
        super().__init__(message)
        self.partial = partial
        self.nodes = nodes
