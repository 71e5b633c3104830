"""Engine limits and evaluation budgets.

All exhaustive machinery in this package is desk-scale by design: exact
enumeration is only attempted within the caps below, and exceeding a cap
raises rather than approximating.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import BudgetExceeded


@dataclass(frozen=True)
class Limits:
    """Structural caps. Exceeding one raises LimitExceeded, never truncates."""

    max_width: int = 16          # bit vector width
    max_list_len: int = 64
    max_nat: int = 1 << 16       # exclusive bound on any nat type
    max_tape: int = 24           # tape length for exhaustive enumeration
    state_pair_budget: int = 10_000   # oracle-equivalence reachability


DEFAULT_LIMITS = Limits()


@dataclass
class Budget:
    """Mutable work meter for one evaluation call.

    ``work`` counts weighted support entries touched; crossing ``limit``
    aborts with BudgetExceeded so callers never wait on a blowup.
    """

    limit: int = 5_000_000
    work: int = field(default=0)

    def charge(self, amount: int = 1) -> None:
        self.work += amount
        if self.work > self.limit:
            raise BudgetExceeded(f"evaluation budget of {self.limit} work units exceeded")

    def fork(self) -> "Budget":
        """Sub-budget sharing this meter (same object; purely for readability)."""
        return self


def fresh_budget(limit: int | None = None) -> Budget:
    return Budget(limit=limit if limit is not None else Budget.limit)
