"""Walk-step accounting."""

from __future__ import annotations

from dataclasses import dataclass, field


class BudgetExhausted(RuntimeError):
    """A charge would push a capped ledger past its budget; nothing was charged."""


@dataclass
class CostLedger:
    """Counts applications of the controlled walk operator, per phase.

    With ``budget`` set, :meth:`charge` refuses (and raises) any charge that
    would overshoot it, so a capped run never spends more than its budget.
    """

    phases: dict = field(default_factory=dict)
    budget: int | None = None

    @property
    def total(self) -> int:
        return sum(self.phases.values())

    def remaining(self) -> float:
        return float("inf") if self.budget is None else self.budget - self.total

    def charge(self, phase: str, steps: int) -> None:
        steps = int(steps)
        if steps < 0:
            raise ValueError("cannot charge a negative number of steps")
        if steps > self.remaining():
            raise BudgetExhausted(
                f"{phase}: {steps} steps requested, {self.remaining()} left of {self.budget}"
            )
        self.phases[phase] = self.phases.get(phase, 0) + steps

    def merge(self, other: "CostLedger") -> None:
        for phase, n in other.phases.items():
            self.charge(phase, n)

    def as_dict(self) -> dict:
        return {"total": self.total, "phases": dict(sorted(self.phases.items()))}
