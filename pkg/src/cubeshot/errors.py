"""Shared exception types.

The CLI maps these onto its exit-code taxonomy: input-domain errors exit
with 2, budget and capacity errors with 3.
"""


class InputDomainError(ValueError):
    """An argument lies outside the documented domain of an operation."""


class BudgetError(RuntimeError):
    """A computation would exceed its configured search or size budget."""


class CapacityError(RuntimeError):
    """A greedy construction could not reach its requested size."""
