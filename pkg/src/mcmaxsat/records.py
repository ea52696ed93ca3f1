"""Result rows and the fixed CSV schemas."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

RESULT_HEADER = ("instance,method,rollout,level,seed,budget_mode,budget,best_unsat,"
                 "time_to_best_s,total_flips,total_steps")
CHECKPOINT_HEADER = "instance,method,rollout,level,seed,elapsed_s,best_unsat"


@dataclass
class RunRecord:
    instance_id: str
    method: str
    rollout: str
    level: int
    seed: int
    budget_mode: str
    budget: float
    best_unsat: int | None
    time_to_best_seconds: float
    total_flips: int
    total_steps: int
    checkpoints: list[tuple[float, int]] = field(default_factory=list)
    group: str = ""
    error: str = ""
    assignment: np.ndarray | None = field(default=None, repr=False, compare=False)

    def csv_row(self) -> str:
        best = "" if self.best_unsat is None else str(self.best_unsat)
        if self.error:
            best = "ERROR:" + self.error.replace(",", ";").replace("\n", " ")
        return (f"{self.instance_id},{self.method},{self.rollout},{self.level},{self.seed},"
                f"{self.budget_mode},{self.budget:g},{best},{self.time_to_best_seconds:.6f},"
                f"{self.total_flips},{self.total_steps}")

    def checkpoint_rows(self) -> list[str]:
        key = f"{self.instance_id},{self.method},{self.rollout},{self.level},{self.seed}"
        return [f"{key},{t:.6f},{u}" for t, u in self.checkpoints]


def densify(history: list[tuple[float, int]], end: float) -> list[tuple[float, int]]:
    """Improvement history plus one best-so-far sample per elapsed second."""
    if not history:
        return []
    pts = list(history)
    times = [t for t, _ in history]
    for s in range(1, int(math.floor(end)) + 1):
        i = np.searchsorted(times, s, side="right") - 1
        if i >= 0:
            pts.append((float(s), history[i][1]))
    pts.sort(key=lambda p: (p[0], -p[1]))
    return pts
