"""Run budgets: wall-clock seconds, or deterministic rollout/flip counts."""

from __future__ import annotations

import time
from dataclasses import dataclass

MODES = {"s": "seconds", "r": "rollouts", "f": "flips"}


@dataclass(frozen=True)
class Budget:
    mode: str = "seconds"
    amount: float = 300.0

    def __post_init__(self):
        if self.mode not in MODES.values():
            raise ValueError(f"unknown budget mode {self.mode!r}")
        if self.amount < 0:
            raise ValueError("budget must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "Budget":
        """``300s`` (seconds), ``5000r`` (rollouts) or ``2000000f`` (flips)."""
        text = text.strip()
        if len(text) < 2 or text[-1] not in MODES:
            raise ValueError(f"bad budget {text!r}; use <secs>s, <count>r or <count>f")
        mode = MODES[text[-1]]
        try:
            amount = float(text[:-1]) if mode == "seconds" else int(text[:-1])
        except ValueError:
            raise ValueError(f"bad budget {text!r}") from None
        return cls(mode, amount)

    @property
    def deterministic(self) -> bool:
        return self.mode != "seconds"

    def __str__(self):
        suffix = {v: k for k, v in MODES.items()}[self.mode]
        return f"{self.amount:g}{suffix}"


class Meter:
    """Tracks consumption against a :class:`Budget`.

    Every leaf evaluation costs one rollout. In flip mode it costs its flips
    plus ``eval_cost`` flip-equivalents for scoring a full assignment
    (callers pass the variable count), so searches whose leaves need no
    flips still pay for their work and terminate. Nothing counts as
    exhausted before the first evaluation.
    """

    def __init__(self, budget: Budget, eval_cost: int = 1):
        if eval_cost < 1:
            raise ValueError("eval_cost must be >= 1")
        self.budget = budget
        self.eval_cost = eval_cost
        self.t0 = time.perf_counter()
        self.rollouts = 0
        self.flips = 0
        self.work = 0

    def elapsed(self) -> float:
        return time.perf_counter() - self.t0

    def charge(self, flips: int = 0) -> None:
        self.rollouts += 1
        self.flips += flips
        self.work += flips + self.eval_cost

    def exhausted(self) -> bool:
        if self.rollouts == 0:
            return False
        b = self.budget
        if b.mode == "seconds":
            return self.elapsed() >= b.amount
        if b.mode == "rollouts":
            return self.rollouts >= b.amount
        return self.work >= b.amount

    def flip_cap(self) -> int | None:
        if self.budget.mode != "flips":
            return None
        return max(0, int(self.budget.amount) - self.work)
