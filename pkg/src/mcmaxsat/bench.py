"""Experiment harness: random instances, an exact oracle for small ones,
seeded multi-repetition runs with incremental CSV output, and summaries.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .assignment import Assignment
from .budget import Budget
from .formula import Formula, read_dimacs
from .montecarlo import METHODS, McConfig, run_method
from .records import CHECKPOINT_HEADER, RESULT_HEADER, RunRecord
from .rollout import KINDS, RolloutPolicy
from .sls import FlipBudget, SlsConfig

log = logging.getLogger(__name__)

ORACLE_MAX_VARS = 24


class InvalidShape(ValueError):
    pass


class TooLarge(ValueError):
    pass


def generate_instance(n_vars: int, n_clauses: int, k: int, seed) -> Formula:
    """Uniform random k-CNF: each clause draws k distinct variables and
    negates each with probability 1/2."""
    if k < 1 or k > n_vars:
        raise InvalidShape(f"clause width {k} impossible with {n_vars} variables")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(n_clauses):
        vs = rng.choice(n_vars, size=k, replace=False) + 1
        signs = rng.integers(0, 2, size=k)
        clauses.append(tuple(int(v) if s else -int(v) for v, s in zip(vs, signs)))
    return Formula(n_vars, clauses)


def exact_oracle(f: Formula, max_vars: int = ORACLE_MAX_VARS) -> tuple[int, Assignment]:
    """Minimum number of falsified clauses by enumerating all 2^n assignments.

    Assignment number ``i`` gives variable ``v`` the value of bit ``v-1``
    of ``i``. The first minimiser in that order is returned.
    """
    n = f.num_variables
    if n > max_vars:
        raise TooLarge(f"{n} variables exceeds the enumeration bound {max_vars}")
    chunk = 1 << min(n, 18)
    best, best_idx = f.num_clauses + 1, 0
    shifts = np.arange(n, dtype=np.uint32)
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, start + chunk, dtype=np.uint32)
        bits = ((idx[:, None] >> shifts) & 1).astype(bool)
        unsat = np.zeros(chunk, dtype=np.int32)
        for c in f.clauses:
            sat = np.zeros(chunk, dtype=bool)
            for lit in c.literals:
                col = bits[:, abs(lit) - 1]
                sat |= col if lit > 0 else ~col
            unsat += ~sat
        i = int(np.argmin(unsat))
        if unsat[i] < best:
            best, best_idx = int(unsat[i]), start + i
    values = np.array([(best_idx >> v) & 1 for v in range(n)], dtype=np.int8)
    return (best if f.num_clauses else 0), Assignment(values)


def run_seed(instance_id: str, method: str, repetition: int) -> int:
    h = hashlib.sha256(f"{instance_id}|{method}|{repetition}".encode()).digest()
    return int.from_bytes(h[:4], "little")


@dataclass
class ExperimentSpec:
    """A grid of (instance x method x rollout x level x repetition) runs.

    ``levels`` only applies to ``nmcs``/``znmcs``; ``uctmax`` and ``nmcts``
    are always run once per cell at level 1.
    """

    instances: list[tuple[str, Formula]]
    methods: Sequence[str] = ("nmcts",)
    rollouts: Sequence[str] = ("walksat",)
    levels: Sequence[int] = (1,)
    repetitions: int = 10
    budget: Budget = field(default_factory=lambda: Budget("seconds", 300))
    flips: FlipBudget = field(default_factory=FlipBudget.dynamic)
    eps_init: float = 0.1
    eps1: float = 0.1
    eps2: float = 0.5
    simulations: int = 100
    samples: int = 10
    c: float = 1.0
    global_init: bool = True
    best_ever: bool = True
    invert_polarity: bool = False
    squared_reward: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        for r in self.rollouts:
            if r not in KINDS:
                raise ValueError(f"unknown rollout {r!r}")

    @classmethod
    def from_grid(cls, grid: dict, instances: list[tuple[str, Formula]]) -> "ExperimentSpec":
        """Build from a grid mapping such as a parsed JSON grid file."""
        g = dict(grid)
        kw = {}
        for key in ("methods", "rollouts", "levels"):
            if key in g:
                kw[key] = list(g.pop(key))
        if "budget" in g:
            b = g.pop("budget")
            kw["budget"] = Budget.parse(b) if isinstance(b, str) else Budget("seconds", float(b))
        if "flips" in g:
            kw["flips"] = FlipBudget.parse(g.pop("flips"))
        simple = {"repetitions", "eps_init", "eps1", "eps2", "simulations", "samples", "c",
                  "global_init", "best_ever", "invert_polarity", "squared_reward", "workers"}
        unknown = set(g) - simple
        if unknown:
            raise ValueError(f"unknown grid keys: {sorted(unknown)}")
        kw.update(g)
        return cls(instances=instances, **kw)

    def config(self, rollout: str, level: int) -> McConfig:
        sls = None
        if rollout in ("walksat", "novelty"):
            sls = SlsConfig(epsilon1=self.eps1, epsilon2=self.eps2, epsilon_init=self.eps_init,
                            flip_budget=self.flips, return_best_ever=self.best_ever,
                            init_from_global_best=self.global_init)
        policy = RolloutPolicy(rollout, sls, self.invert_polarity)
        return McConfig(exploration_c=self.c, simulations_per_step=self.simulations,
                        nmcs_level=level, znmcs_samples=self.samples, rollout=policy,
                        budget=self.budget, squared_reward=self.squared_reward)

    def cells(self) -> list[tuple[str, str, str, int, int]]:
        out = []
        for iid, _ in self.instances:
            for method in self.methods:
                levels = self.levels if method in ("nmcs", "znmcs") else (1,)
                for rollout in self.rollouts:
                    for level in levels:
                        for rep in range(self.repetitions):
                            out.append((iid, method, rollout, level, rep))
        return out


def load_suite(directory: str | Path) -> list[tuple[str, Formula]]:
    """All ``*.cnf`` files in a directory, sorted by name; id = file stem."""
    paths = sorted(Path(directory).glob("*.cnf"))
    return [(p.stem, read_dimacs(p)) for p in paths]


def _run_cell(spec: ExperimentSpec, formulas: dict, cell) -> RunRecord:
    iid, method, rollout, level, rep = cell
    seed = run_seed(iid, method, rep)
    f = formulas[iid]
    try:
        rec = run_method(method, f, spec.config(rollout, level), rng=seed, instance_id=iid)
    except Exception as exc:  # recorded, never aborts the grid
        log.exception("run %s failed", cell)
        rec = RunRecord(iid, method, rollout, level, seed, spec.budget.mode, spec.budget.amount,
                        None, 0.0, 0, 0, error=f"{type(exc).__name__}: {exc}")
    rec.group = f"v{f.num_variables}"
    rec.assignment = None
    return rec


def _pool_job(args):
    return _run_cell(*args)


def run_experiment(spec: ExperimentSpec, results_csv: str | Path | None = None,
                   checkpoints_csv: str | Path | None = None) -> list[RunRecord]:
    """Execute every grid cell; rows are appended to the CSVs as runs finish."""
    formulas = dict(spec.instances)
    cells = spec.cells()
    res_fh = ck_fh = None
    if results_csv is not None:
        res_fh = open(results_csv, "w")
        res_fh.write(RESULT_HEADER + "\n")
    if checkpoints_csv is not None:
        ck_fh = open(checkpoints_csv, "w")
        ck_fh.write(CHECKPOINT_HEADER + "\n")
    records = []
    try:
        if spec.workers > 1:
            pool = ProcessPoolExecutor(max_workers=spec.workers)
            results = pool.map(_pool_job, [(spec, formulas, c) for c in cells])
        else:
            pool = None
            results = (_run_cell(spec, formulas, c) for c in cells)
        for rec in results:
            records.append(rec)
            if res_fh:
                res_fh.write(rec.csv_row() + "\n")
                res_fh.flush()
            if ck_fh:
                for row in rec.checkpoint_rows():
                    ck_fh.write(row + "\n")
                ck_fh.flush()
        if pool is not None:
            pool.shutdown()
    finally:
        for fh in (res_fh, ck_fh):
            if fh:
                fh.close()
    return records


def read_results_csv(path_or_text: str | Path) -> list[RunRecord]:
    p = Path(path_or_text) if not str(path_or_text).startswith("instance,") else None
    text = p.read_text() if p is not None else str(path_or_text)
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        bu = r["best_unsat"]
        err = bu[6:] if bu.startswith("ERROR:") else ""
        rows.append(RunRecord(
            instance_id=r["instance"], method=r["method"], rollout=r["rollout"],
            level=int(r["level"]), seed=int(r["seed"]), budget_mode=r["budget_mode"],
            budget=float(r["budget"]), best_unsat=None if err or not bu else int(bu),
            time_to_best_seconds=float(r["time_to_best_s"]), total_flips=int(r["total_flips"]),
            total_steps=int(r["total_steps"]), error=err))
    return rows


@dataclass(frozen=True)
class SummaryRow:
    group: str
    method: str
    rollout: str
    level: int
    runs: int
    mean: float
    std: float
    min: int


SUMMARY_HEADER = "group,method,rollout,level,runs,mean,std,min"


def aggregate(records: Iterable[RunRecord]) -> list[SummaryRow]:
    """Mean, population standard deviation and minimum of ``best_unsat`` per
    (group, method, rollout, level). Error rows are skipped; a record with no
    group is grouped by its instance id."""
    buckets: dict[tuple, list[int]] = {}
    for r in records:
        if r.error or r.best_unsat is None:
            continue
        key = (r.group or r.instance_id, r.method, r.rollout, r.level)
        buckets.setdefault(key, []).append(r.best_unsat)
    if not buckets:
        raise ValueError("no successful records to aggregate")
    return [SummaryRow(*key, len(v), statistics.fmean(v), statistics.pstdev(v), min(v))
            for key, v in sorted(buckets.items())]


def format_summary(rows: Iterable[SummaryRow]) -> str:
    lines = [SUMMARY_HEADER]
    lines += [f"{r.group},{r.method},{r.rollout},{r.level},{r.runs},{r.mean:.4f},{r.std:.4f},{r.min}"
              for r in rows]
    return "\n".join(lines) + "\n"


def step_value(checkpoints: Sequence[tuple[float, int]], t: float) -> float:
    """Best-so-far at time ``t``; before the first checkpoint, its value."""
    if not checkpoints:
        return math.nan
    times = [c[0] for c in checkpoints]
    i = int(np.searchsorted(times, t, side="right")) - 1
    return float(checkpoints[max(i, 0)][1])


def anytime_curve(records: Iterable[RunRecord], grid: Sequence[float]) -> np.ndarray:
    """Pointwise mean over records of the best-so-far curve on ``grid``."""
    curves = [[step_value(r.checkpoints, t) for t in grid] for r in records if r.checkpoints]
    if not curves:
        raise ValueError("no checkpoint data")
    return np.mean(np.array(curves), axis=0)


def load_grid(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def with_overrides(spec: ExperimentSpec, **kw) -> ExperimentSpec:
    return replace(spec, **kw)
