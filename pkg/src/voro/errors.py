"""Shared exception types."""


class DimensionMismatch(ValueError):
    pass


class NotPositiveDefinite(ValueError):
    pass


class NotWellRounded(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    """An iterative procedure hit its cap without reaching a verdict."""


class Undecided(RuntimeError):
    """A backtracking search tripped its node cap; exhaustiveness forfeited."""


class IncompleteInput(ValueError):
    """An enumeration step was fed layers not marked complete."""


class DifferentialSanityFailed(RuntimeError):
    """d o d != 0 on input to a homology computation."""
