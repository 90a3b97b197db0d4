"""Memory and enumeration budgets with fail-fast size arithmetic."""

from __future__ import annotations

import os

DEFAULT_BUDGET_MIB = 2048
BUDGET_ENV_VAR = "PRS_LAB_BUDGET_MIB"

DEFAULT_ENUMERATION_LIMIT = 1 << 20

_BYTES_PER_COMPLEX = 16
_MIB = 1 << 20


class BudgetError(MemoryError):
    """An operation would exceed the configured memory or enumeration budget."""


def budget_mib(override: int | None = None) -> int:
    """Resolve the active budget: explicit override, else env var, else default."""
    if override is not None:
        return int(override)
    env = os.environ.get(BUDGET_ENV_VAR)
    if env is not None:
        return int(env)
    return DEFAULT_BUDGET_MIB


def check_complex_array(entries: int, what: str, override: int | None = None) -> None:
    """Fail fast if `entries` complex128 values would not fit in the budget."""
    limit = budget_mib(override)
    required = entries * _BYTES_PER_COMPLEX
    if required > limit * _MIB:
        raise BudgetError(
            f"{what} requires {required / _MIB:.1f} MiB "
            f"({entries} complex entries) but the budget is {limit} MiB"
        )


def check_enumeration(count: int, what: str, limit: int | None = None) -> None:
    """Fail fast if an enumeration of `count` items exceeds the cap."""
    cap = DEFAULT_ENUMERATION_LIMIT if limit is None else limit
    if count > cap:
        raise BudgetError(
            f"{what} would enumerate {count} items; the enumeration budget is {cap}"
        )
