"""WalkSat and Novelty with dynamic flip budgets and global-best initialisation."""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from .assignment import Assignment, EvalState
from .formula import Formula


class NoFlippableVariable(RuntimeError):
    """Raised by :func:`free_variables` when a clause has only frozen variables."""


@dataclass(frozen=True)
class FlipBudget:
    """Fixed flip limit, or ``round(weight * u ** exponent)`` for ``u`` free variables."""

    mode: str = "dynamic"
    flips: int = 0
    weight: float = 2.0
    exponent: float = 1.0

    def __post_init__(self):
        if self.mode not in ("fixed", "dynamic"):
            raise ValueError(f"unknown flip budget mode {self.mode!r}")
        if self.mode == "fixed" and self.flips < 0:
            raise ValueError("fixed flip limit must be >= 0")
        if self.mode == "dynamic" and (self.weight <= 0 or self.exponent <= 0):
            raise ValueError("dynamic weight and exponent must be positive")

    @classmethod
    def fixed(cls, flips: int) -> "FlipBudget":
        return cls("fixed", flips=int(flips))

    @classmethod
    def dynamic(cls, weight: float = 2.0, exponent: float = 1.0) -> "FlipBudget":
        return cls("dynamic", weight=float(weight), exponent=float(exponent))

    @classmethod
    def parse(cls, text: str) -> "FlipBudget":
        """Parse ``fixed:<F>`` or ``dynamic:<W>[:<E>]``."""
        parts = text.split(":")
        try:
            if parts[0] == "fixed" and len(parts) == 2:
                return cls.fixed(int(parts[1]))
            if parts[0] == "dynamic" and len(parts) in (2, 3):
                return cls.dynamic(float(parts[1]), float(parts[2]) if len(parts) == 3 else 1.0)
        except ValueError:
            pass
        raise ValueError(f"bad flip budget {text!r}; use fixed:<F> or dynamic:<W>[:<E>]")

    def __str__(self):
        if self.mode == "fixed":
            return f"fixed:{self.flips}"
        return f"dynamic:{self.weight:g}:{self.exponent:g}"


def resolve_flip_budget(b: FlipBudget, u: int) -> int:
    if u < 0:
        raise ValueError("u must be >= 0")
    if b.mode == "fixed":
        return b.flips
    # half-up rounding
    return int(math.floor(b.weight * u ** b.exponent + 0.5))


@dataclass(frozen=True)
class SlsConfig:
    epsilon1: float = 0.1
    epsilon2: float = 0.5
    epsilon_init: float = 0.1
    flip_budget: FlipBudget = field(default_factory=FlipBudget.dynamic)
    return_best_ever: bool = True
    init_from_global_best: bool = True

    def __post_init__(self):
        for name in ("epsilon1", "epsilon2", "epsilon_init"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")


class GlobalBest:
    """Best complete assignment seen during a run; only ever improves.

    Safe to share between threads: :meth:`offer` is an atomic
    compare-and-improve and :meth:`snapshot` returns a consistent pair.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._values: np.ndarray | None = None
        self.num_unsat: int | None = None
        self.found_at: float | None = None
        self.update_count = 0
        self.history: list[tuple[float, int]] = []
        self._t0 = time.perf_counter()

    def restart_clock(self) -> None:
        self._t0 = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self._t0

    @property
    def assignment(self) -> Assignment | None:
        with self._lock:
            return None if self._values is None else Assignment(self._values.copy())

    @property
    def values(self) -> np.ndarray | None:
        """Read-only view of the best values (no copy)."""
        return self._values

    def offer(self, values: np.ndarray, num_unsat: int) -> bool:
        num_unsat = int(num_unsat)
        with self._lock:
            if self.num_unsat is not None and num_unsat >= self.num_unsat:
                return False
            v = np.array(values, dtype=np.int8)
            v.flags.writeable = False
            self._values = v
            self.num_unsat = num_unsat
            self.found_at = self.elapsed()
            self.update_count += 1
            self.history.append((self.found_at, num_unsat))
            return True

    def snapshot(self) -> tuple[Assignment | None, int | None]:
        with self._lock:
            if self._values is None:
                return None, None
            return Assignment(self._values.copy()), self.num_unsat

    def __repr__(self):
        return f"GlobalBest(num_unsat={self.num_unsat}, updates={self.update_count})"


class SlsResult(NamedTuple):
    best_unsat: int
    assignment: Assignment
    flips: int
    trace: tuple[np.ndarray, np.ndarray] | None = None


def init_assignment(f: Formula, frozen_prefix: Assignment, global_best: GlobalBest | None,
                    cfg: SlsConfig, rng: np.random.Generator) -> Assignment:
    """Complete ``frozen_prefix``: free variables copy the global best with
    probability ``1 - epsilon_init`` and are uniformly random otherwise."""
    values = frozen_prefix.values.copy()
    free = values < 0
    nfree = int(np.count_nonzero(free))
    if nfree == 0:
        return Assignment(values)
    rand = rng.integers(0, 2, size=nfree, dtype=np.int8)
    gvals = global_best.values if global_best is not None else None
    if cfg.init_from_global_best and gvals is not None:
        keep = rng.random(nfree) >= cfg.epsilon_init
        rand = np.where(keep, gvals[free], rand).astype(np.int8)
    values[free] = rand
    return Assignment(values)


def free_variables(state: EvalState, clause: int) -> list[int]:
    """Free variables (1-based, distinct, ascending) of ``clause``."""
    f = state.formula
    vs = {int(f.lit_var[j]) for j in range(f.clause_ptr[clause], f.clause_ptr[clause + 1])
          if not state.frozen[f.lit_var[j]]}
    if not vs:
        raise NoFlippableVariable(f"clause {clause} has only frozen variables")
    return sorted(v + 1 for v in vs)


def _run(f: Formula, frozen_prefix: Assignment, global_best: GlobalBest | None, cfg: SlsConfig,
         rng, novelty: bool, flip_cap: int | None, trace: bool) -> SlsResult:
    rng = np.random.default_rng(rng)
    frozen = frozen_prefix.values >= 0
    u = f.num_variables - int(np.count_nonzero(frozen))
    limit = resolve_flip_budget(cfg.flip_budget, u)
    if flip_cap is not None:
        limit = max(0, min(limit, int(flip_cap)))
    start = init_assignment(f, frozen_prefix, global_best, cfg, rng)
    st = EvalState(f, start.values, frozen)
    best_values = np.empty_like(st.values)
    tv = np.empty(limit if trace else 0, dtype=np.int64)
    tk = np.empty(limit if trace else 0, dtype=np.int8)
    best, flips, final = K.local_search(
        st.values, st.sat_count, st.unsat_list, st.unsat_pos, st.num_unsat, st.frozen,
        f.clause_ptr, f.lit_var, f.var_ptr, f.var_clause, f.var_delta,
        limit, cfg.epsilon1, cfg.epsilon2, novelty, cfg.return_best_ever, rng,
        best_values, tv, tk)
    if global_best is not None:
        global_best.offer(best_values, best)
    tr = (tv[:flips] + 1, tk[:flips]) if trace else None
    return SlsResult(int(best), Assignment(best_values), int(flips), tr)


def walksat(f: Formula, frozen_prefix: Assignment, global_best: GlobalBest | None, cfg: SlsConfig,
            rng, *, flip_cap: int | None = None, trace: bool = False) -> SlsResult:
    """Run WalkSat over the variables left free by ``frozen_prefix``.

    The flip limit comes from ``cfg.flip_budget`` with ``u`` = number of
    free variables, clipped to ``flip_cap`` when given. With ``trace`` the
    result carries the flipped variables (1-based) and the branch codes
    from :mod:`mcmaxsat._kernels` (0 noise, 1 greedy, 2 second-best).
    """
    return _run(f, frozen_prefix, global_best, cfg, rng, False, flip_cap, trace)


def novelty(f: Formula, frozen_prefix: Assignment, global_best: GlobalBest | None, cfg: SlsConfig,
            rng, *, flip_cap: int | None = None, trace: bool = False) -> SlsResult:
    """Like :func:`walksat`, but avoids re-flipping the last flipped variable:
    when the greedy pick equals it, the clause's second-best variable is
    flipped instead with probability ``1 - epsilon2``."""
    return _run(f, frozen_prefix, global_best, cfg, rng, True, flip_cap, trace)
