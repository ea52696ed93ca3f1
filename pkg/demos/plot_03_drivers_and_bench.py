"""
Four drivers, one harness
=========================

Run UCTMAX, NMCTS, NMCS and ZNMCS over a tiny suite with a deterministic flip
budget, write the CSVs, and summarise.
"""

import tempfile
from pathlib import Path

import numpy as np

from mcmaxsat import Budget
from mcmaxsat.bench import (
    ExperimentSpec, aggregate, anytime_curve, format_summary, generate_instance, run_experiment,
)

suite = [(f"rnd{i}", generate_instance(60, 600, 2, 500 + i)) for i in range(2)]
spec = ExperimentSpec(instances=suite, methods=["uctmax", "nmcts", "nmcs", "znmcs"],
                      rollouts=["walksat"], levels=[1], repetitions=2,
                      budget=Budget("flips", 200_000))

out = Path(tempfile.mkdtemp())
records = run_experiment(spec, out / "results.csv", out / "checkpoints.csv")
print((out / "results.csv").read_text())
print(format_summary(aggregate(records)))

# %%
# Anytime curve: mean best-so-far over the NMCTS runs on a common grid.
grid = np.linspace(0, max(r.time_to_best_seconds for r in records), 6)
curve = anytime_curve([r for r in records if r.method == "nmcts"], grid)
print("t     ", grid.round(3))
print("unsat ", curve.round(2))
