"""Monte Carlo search drivers over variable-by-variable assignment.

A state assigns variables 1..d; its two moves assign variable d+1 false
(action 0) or true (action 1). Leaves are scored by a rollout policy and
mapped to a reward in [0, 1]. Four drivers share one :class:`GlobalBest`:

* :func:`uctmax` - one UCT tree grown from the root for the whole budget.
* :func:`nmcts` - a fresh UCT search per decision, committing the best
  action each time (nested MCTS, level 1).
* :func:`nmcs_driver` / :func:`znmcs_driver` - repeated nested Monte Carlo
  search at level 1 or 2, and its zero-move sampling variant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assignment import Assignment, count_unsat
from .budget import Budget, Meter
from .formula import Formula
from .records import RunRecord, densify
from .rollout import RolloutPolicy, play
from .sls import GlobalBest

METHODS = ("uctmax", "nmcts", "nmcs", "znmcs")


@dataclass(frozen=True)
class McConfig:
    exploration_c: float = 1.0
    simulations_per_step: int = 100
    nmcs_level: int = 1
    znmcs_samples: int = 10
    rollout: RolloutPolicy = field(default_factory=RolloutPolicy)
    budget: Budget = field(default_factory=Budget)
    squared_reward: bool = True

    def __post_init__(self):
        if self.exploration_c < 0:
            raise ValueError("exploration_c must be >= 0")
        if self.simulations_per_step < 1:
            raise ValueError("simulations_per_step must be >= 1")
        if self.nmcs_level not in (1, 2):
            raise ValueError("only nesting levels 1 and 2 are supported")
        if self.znmcs_samples < 1:
            raise ValueError("znmcs_samples must be >= 1")


@dataclass
class SearchState:
    formula: Formula
    prefix: np.ndarray
    depth: int

    @classmethod
    def root(cls, f: Formula) -> "SearchState":
        return cls(f, np.full(f.num_variables, -1, dtype=np.int8), 0)

    @property
    def is_terminal(self) -> bool:
        return self.depth == self.formula.num_variables

    def legal_moves(self) -> tuple[int, ...]:
        return () if self.is_terminal else (0, 1)

    def child(self, action: int) -> "SearchState":
        if self.is_terminal:
            raise ValueError("terminal state has no moves")
        p = self.prefix.copy()
        p[self.depth] = action
        return SearchState(self.formula, p, self.depth + 1)


class SearchNode:
    """UCT statistics for one tree state.

    ``visits`` counts every simulation through the node, its expansion
    included, so ``visits == 1 + sum(N)``.
    """

    __slots__ = ("Q", "N", "children", "visits")

    def __init__(self):
        self.Q = [0.0, 0.0]
        self.N = [0, 0]
        self.children: list[SearchNode | None] = [None, None]
        self.visits = 0

    def update(self, action: int, value: float) -> None:
        n = self.N[action]
        self.Q[action] = (n * self.Q[action] + value) / (n + 1)
        self.N[action] = n + 1


def reward(f: Formula, unsat: int, squared: bool = True) -> float:
    m = f.num_clauses
    if m == 0:
        return 1.0
    base = (m - unsat) / m
    return base * base if squared else base


def uct_value(q: float, n_a: int, total: int, c: float) -> float:
    log_total = math.log(total) if total > 0 else 0.0
    return q + c * math.sqrt(log_total / (n_a + 1))


def uct_select(node: SearchNode, c: float) -> int:
    """Action maximising the UCT value; action 0 (false) wins ties."""
    u0 = uct_value(node.Q[0], node.N[0], node.visits, c)
    u1 = uct_value(node.Q[1], node.N[1], node.visits, c)
    return 1 if u1 > u0 else 0


def normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    s = q.sum()
    if s <= 0:
        return np.full(len(q), 1.0 / len(q))
    return q / s


class _Search:
    """Per-run context: formula, config, shared best, rng and budget meter."""

    def __init__(self, f: Formula, cfg: McConfig, global_best: GlobalBest, rng, meter: Meter):
        self.f = f
        self.n = f.num_variables
        self.cfg = cfg
        self.gb = global_best
        self.rng = rng
        self.meter = meter

    def score_complete(self, values: np.ndarray) -> float:
        unsat = count_unsat(self.f, values)
        self.gb.offer(values, unsat)
        self.meter.charge(0)
        return reward(self.f, unsat, self.cfg.squared_reward)

    def rollout(self, values: np.ndarray) -> tuple[float, np.ndarray]:
        """Complete a prefix (unassigned entries are -1) with the rollout policy."""
        out = play(self.cfg.rollout, self.f, Assignment(values), self.gb, self.rng,
                   flip_cap=self.meter.flip_cap())
        self.meter.charge(out.flips)
        return reward(self.f, out.num_unsat, self.cfg.squared_reward), out.values

    def simulate(self, prefix: np.ndarray, depth: int, node: SearchNode) -> float:
        values = prefix.copy()
        d = depth
        path = []
        while True:
            if node.visits == 0:
                v, _ = self.rollout(values)
                node.visits = 1
                break
            a = uct_select(node, self.cfg.exploration_c)
            path.append((node, a))
            values[d] = a
            d += 1
            if d == self.n:
                v = self.score_complete(values)
                break
            child = node.children[a]
            if child is None:
                child = node.children[a] = SearchNode()
            node = child
        for nd, a in path:
            nd.update(a, v)
            nd.visits += 1
        return v

    def mcts(self, state: SearchState, simulations: int | None,
             node: SearchNode | None = None) -> tuple[np.ndarray, SearchNode]:
        node = node if node is not None else SearchNode()
        done = 0
        while simulations is None or done < simulations:
            self.simulate(state.prefix, state.depth, node)
            done += 1
            if self.meter.exhausted():
                break
        return normalize(node.Q), node

    def nested(self, prefix: np.ndarray, depth: int, level: int, zero: bool,
               trace: list | None) -> tuple[float, list[int]]:
        values = prefix.copy()
        d = depth
        if d == self.n:
            return self.score_complete(values), []
        best_score = -math.inf
        best_seq = np.empty(0, dtype=np.int8)
        chosen: list[int] = []
        while d < self.n:
            high = -math.inf
            high_seq = None
            if zero:
                for _ in range(self.cfg.znmcs_samples):
                    if self.meter.exhausted():
                        break
                    if level == 1:
                        score, full = self.rollout(values)
                        seq = full[d:]
                    else:
                        score, seq = self.nested(values, d, level - 1, True, None)
                        seq = np.asarray(seq, dtype=np.int8)
                    if score > high:
                        high, high_seq = score, seq
            else:
                for m in (0, 1):
                    if self.meter.exhausted():
                        break
                    values[d] = m
                    if d + 1 == self.n:
                        score, seq = self.score_complete(values), np.empty(0, dtype=np.int8)
                    elif level == 1:
                        score, full = self.rollout(values)
                        seq = full[d + 1:]
                    else:
                        score, sub = self.nested(values, d + 1, level - 1, False, None)
                        seq = np.asarray(sub, dtype=np.int8)
                    if score > high:
                        high = score
                        high_seq = np.concatenate((np.array([m], dtype=np.int8), seq))
                values[d] = -1
            if high > best_score and high_seq is not None and len(high_seq) == self.n - d:
                best_score = high
                best_seq = high_seq
            if len(best_seq) == 0:
                # budget ran out before anything was evaluated here
                break
            move = int(best_seq[0])
            best_seq = best_seq[1:]
            values[d] = move
            d += 1
            chosen.append(move)
            if trace is not None:
                trace.append(best_score)
        if d == self.n:
            self.gb.offer(values, count_unsat(self.f, values))
        return best_score, chosen


def _setup(f, cfg, global_best, rng, meter=None):
    gb = global_best if global_best is not None else GlobalBest()
    rng_obj = np.random.default_rng(rng)
    return _Search(f, cfg, gb, rng_obj, meter or Meter(cfg.budget, max(f.num_variables, 1)))


def mcts_search(root: SearchState, cfg: McConfig, global_best: GlobalBest | None = None, rng=None,
                *, meter: Meter | None = None, simulations: int | None = None,
                until_budget: bool = False,
                node: SearchNode | None = None) -> tuple[np.ndarray, SearchNode]:
    """Grow a UCT tree at ``root`` and return ``(normalised Q, root node)``.

    Runs ``simulations`` (default ``cfg.simulations_per_step``) simulations,
    or keeps going until the budget runs out with ``until_budget``. Stops
    early when the budget is exhausted; partial statistics are returned.
    """
    if root.is_terminal:
        raise ValueError("root state is terminal")
    ctx = _setup(root.formula, cfg, global_best, rng, meter)
    sims = None if until_budget else (simulations or cfg.simulations_per_step)
    return ctx.mcts(root, sims, node)


def nmcs(state: SearchState, level: int, cfg: McConfig, global_best: GlobalBest | None = None,
         rng=None, *, meter: Meter | None = None, trace: list | None = None) -> tuple[float, list[int]]:
    """Nested Monte Carlo search from ``state``.

    At each step every move is scored (level 1: one rollout from the child;
    level 2: a level-1 search from it). The best sequence found so far is
    followed whenever no move beats it. Returns ``(best score, moves
    played from state)``. ``trace`` collects the best score per step.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    ctx = _setup(state.formula, cfg, global_best, rng, meter)
    return ctx.nested(state.prefix, state.depth, level, False, trace)


def znmcs(state: SearchState, level: int, cfg: McConfig, global_best: GlobalBest | None = None,
          rng=None, *, meter: Meter | None = None, trace: list | None = None) -> tuple[float, list[int]]:
    """Zero nested Monte Carlo search: like :func:`nmcs` but each step draws
    ``cfg.znmcs_samples`` estimates at the current state instead of one per
    child, and adopts the first move of the best sampled sequence."""
    if level < 1:
        raise ValueError("level must be >= 1")
    ctx = _setup(state.formula, cfg, global_best, rng, meter)
    return ctx.nested(state.prefix, state.depth, level, True, trace)


def _record(method: str, ctx: _Search, level: int, seed, instance_id: str) -> RunRecord:
    gb = ctx.gb
    end = gb.elapsed()
    return RunRecord(
        instance_id=instance_id, method=method, rollout=ctx.cfg.rollout.kind, level=level,
        seed=seed if isinstance(seed, (int, np.integer)) else -1,
        budget_mode=ctx.cfg.budget.mode, budget=ctx.cfg.budget.amount,
        best_unsat=gb.num_unsat, time_to_best_seconds=gb.found_at or 0.0,
        total_flips=ctx.meter.flips, total_steps=ctx.meter.rollouts,
        checkpoints=densify(gb.history, end), assignment=gb.values,
    )


def _degenerate(ctx: _Search) -> bool:
    if ctx.n == 0:
        ctx.score_complete(np.empty(0, dtype=np.int8))
        return True
    return False


def uctmax(f: Formula, cfg: McConfig, global_best: GlobalBest | None = None, rng=None,
           *, instance_id: str = "") -> RunRecord:
    """One UCT tree from the empty assignment, grown until the budget runs out."""
    ctx = _setup(f, cfg, global_best, rng)
    if not _degenerate(ctx):
        ctx.mcts(SearchState.root(f), None)
    return _record("uctmax", ctx, 1, rng, instance_id)


def nmcts(f: Formula, cfg: McConfig, global_best: GlobalBest | None = None, rng=None,
          *, instance_id: str = "", trace: list | None = None) -> RunRecord:
    """Nested MCTS: a fresh UCT search per decision, then commit the action
    with the larger normalised Q (false on ties). Restarts from the root,
    keeping the global best, until the budget is spent. ``trace`` receives
    ``(pass, depth)`` after every commit."""
    ctx = _setup(f, cfg, global_best, rng)
    if not _degenerate(ctx):
        npass = 0
        while True:
            state = SearchState.root(f)
            while not state.is_terminal:
                policy, _ = ctx.mcts(state, cfg.simulations_per_step)
                state = state.child(1 if policy[1] > policy[0] else 0)
                if trace is not None:
                    trace.append((npass, state.depth))
                if ctx.meter.exhausted():
                    break
            if state.is_terminal:
                ctx.gb.offer(state.prefix, count_unsat(f, state.prefix))
            if ctx.meter.exhausted():
                break
            npass += 1
    return _record("nmcts", ctx, 1, rng, instance_id)


def _nested_driver(method: str, zero: bool, f, cfg, global_best, rng, instance_id):
    ctx = _setup(f, cfg, global_best, rng)
    if not _degenerate(ctx):
        root = SearchState.root(f)
        while True:
            ctx.nested(root.prefix, 0, cfg.nmcs_level, zero, None)
            if ctx.meter.exhausted():
                break
    return _record(method, ctx, cfg.nmcs_level, rng, instance_id)


def nmcs_driver(f: Formula, cfg: McConfig, global_best: GlobalBest | None = None, rng=None,
                *, instance_id: str = "") -> RunRecord:
    """Repeat level-``cfg.nmcs_level`` NMCS from the root until the budget is spent."""
    return _nested_driver("nmcs", False, f, cfg, global_best, rng, instance_id)


def znmcs_driver(f: Formula, cfg: McConfig, global_best: GlobalBest | None = None, rng=None,
                 *, instance_id: str = "") -> RunRecord:
    return _nested_driver("znmcs", True, f, cfg, global_best, rng, instance_id)


DRIVERS = {"uctmax": uctmax, "nmcts": nmcts, "nmcs": nmcs_driver, "znmcs": znmcs_driver}


def run_method(method: str, f: Formula, cfg: McConfig, global_best: GlobalBest | None = None,
               rng=None, *, instance_id: str = "") -> RunRecord:
    try:
        driver = DRIVERS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}") from None
    return driver(f, cfg, global_best, rng, instance_id=instance_id)
