"""Playout policies that complete a partial assignment.

Random and the occurrence-count heuristics H1-H3 are cheap; the SLS kinds
delegate to :mod:`mcmaxsat.sls`. :func:`play` runs any policy, scores the
completion and reports it to the run's :class:`~mcmaxsat.sls.GlobalBest`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .assignment import Assignment, count_unsat
from .formula import Formula
from .sls import GlobalBest, SlsConfig, novelty, walksat

KINDS = ("random", "h1", "h2", "h3", "walksat", "novelty")
SLS_KINDS = ("walksat", "novelty")


@dataclass(frozen=True)
class RolloutPolicy:
    kind: str = "walksat"
    sls: SlsConfig | None = None
    invert_polarity_rule: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown rollout kind {self.kind!r}")
        if self.kind in SLS_KINDS and self.sls is None:
            object.__setattr__(self, "sls", SlsConfig())
        if self.kind not in SLS_KINDS and self.sls is not None:
            raise ValueError(f"{self.kind} rollouts take no SLS configuration")

    @property
    def is_sls(self) -> bool:
        return self.kind in SLS_KINDS


def rollout_random(f: Formula, prefix: Assignment, rng) -> Assignment:
    rng = np.random.default_rng(rng)
    values = prefix.values.copy()
    free = values < 0
    values[free] = rng.integers(0, 2, size=int(np.count_nonzero(free)), dtype=np.int8)
    return Assignment(values)


def polarity(f: Formula, invert_polarity_rule: bool = False) -> np.ndarray:
    """Value each heuristic gives every variable (0-based array of 0/1).

    As printed, a variable whose positive literal occurs more often than its
    negative one is set to 0, anything else to 1. The inverted rule sets it
    to 1 in that case and to 0 otherwise.
    """
    more_pos = f.pos_count > f.neg_count
    if invert_polarity_rule:
        return more_pos.astype(np.int8)
    return (~more_pos).astype(np.int8)


def heuristic_order(f: Formula, prefix: Assignment, kind: str) -> list[int]:
    """Free variables (1-based) in the order the heuristic assigns them.

    h1: index order; h2: total occurrences descending; h3: occurrences of
    the more frequent literal descending. Ties go to the lower index.
    """
    free = np.flatnonzero(prefix.values < 0)
    if kind == "h1":
        key = np.zeros(len(free), dtype=np.int64)
    elif kind == "h2":
        key = (f.pos_count + f.neg_count)[free]
    elif kind == "h3":
        key = np.maximum(f.pos_count, f.neg_count)[free]
    else:
        raise ValueError(f"not a heuristic: {kind!r}")
    order = np.lexsort((free, -key))
    return (free[order] + 1).tolist()


def _rollout_h(f: Formula, prefix: Assignment, kind: str, invert_polarity_rule: bool) -> Assignment:
    values = prefix.values.copy()
    pol = polarity(f, invert_polarity_rule)
    idx = np.asarray(heuristic_order(f, prefix, kind), dtype=np.int64) - 1
    # counts are static, so each value depends only on its variable
    values[idx] = pol[idx]
    return Assignment(values)


def rollout_h1(f: Formula, prefix: Assignment, invert_polarity_rule: bool = False) -> Assignment:
    return _rollout_h(f, prefix, "h1", invert_polarity_rule)


def rollout_h2(f: Formula, prefix: Assignment, invert_polarity_rule: bool = False) -> Assignment:
    return _rollout_h(f, prefix, "h2", invert_polarity_rule)


def rollout_h3(f: Formula, prefix: Assignment, invert_polarity_rule: bool = False) -> Assignment:
    return _rollout_h(f, prefix, "h3", invert_polarity_rule)


class Outcome(NamedTuple):
    num_unsat: int
    values: np.ndarray
    flips: int


def play(policy: RolloutPolicy, f: Formula, prefix: Assignment, global_best: GlobalBest | None,
         rng, flip_cap: int | None = None) -> Outcome:
    """Complete ``prefix`` with ``policy`` and score it.

    For SLS kinds the score is the best state the local search visited (or
    its final state, per the config).
    """
    if policy.kind == "walksat" or policy.kind == "novelty":
        run = walksat if policy.kind == "walksat" else novelty
        res = run(f, prefix, global_best, policy.sls, rng, flip_cap=flip_cap)
        return Outcome(res.best_unsat, res.assignment.values, res.flips)
    if policy.kind == "random":
        a = rollout_random(f, prefix, rng)
    else:
        a = _rollout_h(f, prefix, policy.kind, policy.invert_polarity_rule)
    unsat = count_unsat(f, a.values)
    if global_best is not None:
        global_best.offer(a.values, unsat)
    return Outcome(unsat, a.values, 0)
