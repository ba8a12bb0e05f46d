"""Exception types raised across twistlab.

The CLI maps ``UsageError`` to exit status 2 and every other ``TwistlabError``
to exit status 3.
"""


class TwistlabError(Exception):
    """Base class; ``kind`` is the machine-readable tag written by the CLI."""

    kind = "error"


class UsageError(TwistlabError):
    kind = "usage"


class FormNotAvailable(TwistlabError):
    kind = "form-not-available"


class EmptyTableError(TwistlabError):
    kind = "empty-table"


class CoverageError(TwistlabError):
    """An eigenvalue (or other) table is too short for the requested range."""

    kind = "coverage"

    def __init__(self, needed: int, have: int, what: str = "eigenvalue table"):
        super().__init__(f"{what} covers n <= {have}; need limit >= {needed}")
        self.needed = needed
        self.have = have


class InvariantViolation(TwistlabError):
    kind = "invariant-violation"


class QuadratureFailure(TwistlabError):
    kind = "quadrature-failure"

    def __init__(self, message: str, estimate: complex, error: float):
        super().__init__(f"{message} (best estimate {estimate!r}, error {error:.3e})")
        self.estimate = estimate
        self.error = error


class EnumerationBudgetExceeded(TwistlabError):
    kind = "enumeration-budget"

    def __init__(self, budget: int, visited: int, partial: float):
        super().__init__(
            f"enumeration budget {budget} exceeded after visiting {visited} nodes"
        )
        self.budget = budget
        self.visited = visited
        self.partial = partial


class BudgetError(TwistlabError):
    """A requested size exceeds the documented desk-scale budget."""

    kind = "budget"
