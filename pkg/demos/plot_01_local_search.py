"""
Local search on a random 3-CNF
==============================

Generate a small formula, compute its exact optimum by enumeration, and
watch WalkSat and Novelty approach it.
"""

import numpy as np

from mcmaxsat import Assignment, FlipBudget, GlobalBest, SlsConfig, novelty, walksat
from mcmaxsat.bench import exact_oracle, generate_instance

f = generate_instance(18, 110, 3, seed=4)
opt, witness = exact_oracle(f)
print(f"{f.num_variables} vars, {f.num_clauses} clauses, optimum unsat = {opt}")

# %%
# A single call starts from a random assignment (no global best yet) and
# flips until its flip limit. It reports the best state it visited.

cfg = SlsConfig(flip_budget=FlipBudget.fixed(500))
for engine in (walksat, novelty):
    res = engine(f, Assignment.empty(f.num_variables), None, cfg, rng=0)
    print(f"{engine.__name__:8s} best={res.best_unsat} after {res.flips} flips")

# %%
# Repeated calls sharing a GlobalBest restart near the incumbent
# (epsilon-greedy, 10% of variables re-randomised).

gb = GlobalBest()
rng = np.random.default_rng(1)
for i in range(20):
    walksat(f, Assignment.empty(f.num_variables), gb, cfg, rng)
print("history (elapsed s, unsat):", [(round(t, 4), u) for t, u in gb.history])
print("reached optimum:", gb.num_unsat == opt)
