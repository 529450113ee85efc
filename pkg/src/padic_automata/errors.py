"""Exceptions and resource budgets shared across modules."""

from __future__ import annotations

import os


class BudgetExceeded(RuntimeError):
    pass


class StateBudgetExceeded(BudgetExceeded):
    pass


class OrbitBudgetExceeded(BudgetExceeded):
    pass


class NotRepresentable(ValueError):
    """No digit tuple has the requested value."""


class InvalidDenominator(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


class PreconditionViolated(ValueError):
    pass


class ZeroPolynomial(ValueError):
    pass


class InvariantViolation(AssertionError):
    """An internal identity failed (e.g. a division by p^j was not exact)."""


_DEFAULTS = {
    "PADIC_STATE_BUDGET": 5_000_000,
    "PADIC_MONOMIAL_BUDGET": 2_000_000,
    "PADIC_ORBIT_BUDGET": 1_000_000,
}


def budget(name: str) -> int:
    """Read a budget from the environment, falling back to the default."""
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return _DEFAULTS[name]
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{name} must be positive")
    return value


def state_budget() -> int:
    return budget("PADIC_STATE_BUDGET")


def monomial_budget() -> int:
    return budget("PADIC_MONOMIAL_BUDGET")


def orbit_budget() -> int:
    return budget("PADIC_ORBIT_BUDGET")
