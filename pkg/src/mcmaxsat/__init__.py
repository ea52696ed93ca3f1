"""Anytime MaxSAT: nested Monte Carlo search with local-search rollouts."""

from .assignment import Assignment, EvalState, bonus, count_unsat, evaluate_full, flip
from .budget import Budget, Meter
from .formula import Clause, Formula, Literal, emit_dimacs, parse_dimacs, read_dimacs, write_dimacs
from .montecarlo import (
    McConfig, SearchNode, SearchState, mcts_search, nmcs, nmcs_driver, nmcts, reward, run_method,
    uct_select, uctmax, znmcs, znmcs_driver,
)
from .records import RunRecord
from .rollout import RolloutPolicy, rollout_h1, rollout_h2, rollout_h3, rollout_random
from .sls import FlipBudget, GlobalBest, SlsConfig, init_assignment, novelty, resolve_flip_budget, walksat

__version__ = "0.1.0"
