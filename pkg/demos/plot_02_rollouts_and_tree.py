"""
Rollout policies inside NMCTS
=============================

Compare the six leaf estimators under one rollout budget on a 70-variable
instance. SLS rollouts dominate; heuristics beat uniform random.
"""

from mcmaxsat import Budget, RolloutPolicy
from mcmaxsat.bench import generate_instance
from mcmaxsat.montecarlo import McConfig, SearchState, mcts_search, nmcts

f = generate_instance(70, 700, 3, seed=7000)

for kind in ("random", "h1", "h2", "h3", "walksat", "novelty"):
    policy = RolloutPolicy(kind, invert_polarity_rule=True)
    cfg = McConfig(rollout=policy, budget=Budget("rollouts", 1500))
    rec = nmcts(f, cfg, rng=3)
    print(f"{kind:8s} best_unsat={rec.best_unsat:3d}  flips={rec.total_flips}")

# %%
# One search step: the root policy is the normalised mean reward of the
# two actions (x1 := false, x1 := true).

policy, root = mcts_search(SearchState.root(f), McConfig(), rng=0, simulations=100)
print("policy", policy.round(4), "visits", root.N, "Q", [round(q, 4) for q in root.Q])
