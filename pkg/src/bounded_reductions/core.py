"""Exception types and result sentinels shared by every module."""

from __future__ import annotations


class ReductionError(Exception):
    """Base class for every error raised by this package."""


class ProblemMismatch(ReductionError):
    """An instance or arrow was used with the wrong problem id."""


class ChainMismatch(ReductionError):
    """Two arrows cannot be composed because the first target is not the second source."""


class UnregisteredProblem(ReductionError):
    pass


class InvalidMachine(ReductionError):
    pass


class IllegalConfiguration(ReductionError):
    pass


class InvalidInstance(ReductionError):
    """An instance violates its type invariants or a reduction precondition."""


class IndexOutOfRange(ReductionError):
    pass


class BudgetExceeded(ReductionError):
    """A search exhausted its node budget before reaching a verdict."""


class _Sentinel:
    __slots__ = ()
    _name = "sentinel"

    def __repr__(self) -> str:
        return self._name

    def __bool__(self) -> bool:
        return False

    def __reduce__(self):
        return self._name


class NotFoundWithinHorizon(_Sentinel):
    """No accepting bound exists up to the horizon. Says nothing about larger bounds."""

    _name = "NOT_FOUND"


class ExceedsHorizon(_Sentinel):
    """Some computation path is still running at the horizon."""

    _name = "EXCEEDS_HORIZON"


NOT_FOUND = NotFoundWithinHorizon()
EXCEEDS_HORIZON = ExceedsHorizon()


class Budget:
    """Counts search nodes and raises once the limit is passed."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int | None = None):
        self.limit = limit
        self.used = 0

    def tick(self, amount: int = 1) -> None:
        self.used += amount
        if self.limit is not None and self.used > self.limit:
            raise BudgetExceeded(f"search budget of {self.limit} nodes exhausted")


def as_budget(budget: Budget | int | None) -> Budget:
    if isinstance(budget, Budget):
        return budget
    return Budget(budget)
