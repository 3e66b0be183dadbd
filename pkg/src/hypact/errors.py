"""Exception hierarchy shared by every module.

The CLI maps :class:`ContractError` (and its subclasses) to exit code 2 and
:class:`BudgetError` to exit code 3.
"""

from __future__ import annotations


class HypactError(Exception):
    """Base class for all library errors."""

    kind = "error"


class ContractError(HypactError):
    """A precondition of an operation does not hold."""

    kind = "contract"


class StructuralError(ContractError):
    """Inputs are malformed or mutually incompatible (e.g. mixed groups)."""

    kind = "structural"


class RankError(ContractError):
    """A matrix that must be invertible is singular."""

    kind = "rank"

    def __init__(self, message: str, dependent_index: int | None = None):
        super().__init__(message)
        self.dependent_index = dependent_index


class BudgetError(HypactError):
    """A configured resource budget was exhausted.

    ``partial`` carries whatever was established before the budget ran out,
    e.g. the last complete ball radius or a lower bound on a word length.
    """

    kind = "budget"

    def __init__(self, message: str, partial: dict | None = None):
        super().__init__(message)
        self.partial = partial
