"""Acceptance criteria, one test per criterion.

Each test appends a PASS/FAIL line to ``RESULTS``; the lines are printed as
they complete and again in the pytest terminal summary. Budgets are count
budgets so every outcome is reproducible (see README, "Acceptance").
"""

import math
import subprocess
import sys
import threading

import numpy as np
import pytest

from mcmaxsat import (
    Assignment, Budget, FlipBudget, GlobalBest, RolloutPolicy, SlsConfig, emit_dimacs,
    evaluate_full, novelty, parse_dimacs, resolve_flip_budget, walksat,
)
from mcmaxsat.bench import exact_oracle, generate_instance, run_seed
from mcmaxsat.formula import write_dimacs
from mcmaxsat.montecarlo import (
    McConfig, SearchNode, SearchState, nmcs, nmcts, run_method, uct_select, uctmax, znmcs,
)
from mcmaxsat.records import densify

from conftest import brute_unsat, random_formula

pytestmark = pytest.mark.acceptance

RESULTS: list[str] = []

# count budgets (flip mode charges flips plus one n-flip evaluation per leaf)
C1_FLIPS = 200_000
C2_ROLLOUTS = 3_000
C345_FLIPS = 2_000_000


def report(capsys, n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    with capsys.disabled():
        print("\n" + line)
    return ok


def test_criterion_1_oracle_equivalence(capsys):
    insts = [generate_instance(16, 80, 3, 1600 + i) for i in range(30)]
    optima = [exact_oracle(f)[0] for f in insts]
    hits = {}
    for method in ("uctmax", "nmcts", "nmcs", "znmcs"):
        for rollout in ("walksat", "novelty"):
            cfg = McConfig(rollout=RolloutPolicy(rollout), budget=Budget("flips", C1_FLIPS))
            n = 0
            for i, (f, opt) in enumerate(zip(insts, optima)):
                rec = run_method(method, f, cfg, rng=run_seed(f"c1_{i}", method, 0))
                assert rec.best_unsat >= opt
                n += rec.best_unsat == opt
            hits[f"{method}/{rollout}"] = n
    worst = min(hits.values())
    detail = "optimum hits of 30 per cell: " + ", ".join(f"{k}={v}" for k, v in hits.items())
    assert report(capsys, 1, worst >= 27, detail)


def test_criterion_2_rollout_ordering(capsys):
    insts = [generate_instance(70, 700, 3, 7000 + i) for i in range(5)]
    means = {}
    for kind in ("random", "h1", "h2", "h3", "walksat", "novelty"):
        # majority-satisfying polarity; the literal rule is anti-greedy (ledger)
        policy = RolloutPolicy(kind, invert_polarity_rule=True)
        cfg = McConfig(rollout=policy, budget=Budget("rollouts", C2_ROLLOUTS))
        res = [nmcts(f, cfg, rng=run_seed(f"c2_{i}", kind, rep)).best_unsat
               for i, f in enumerate(insts) for rep in range(3)]
        means[kind] = float(np.mean(res))
    heur = [means[k] for k in ("h1", "h2", "h3")]
    sls = [means["walksat"], means["novelty"]]
    ok = (all(means["random"] > h for h in heur)
          and all(h > s for h in heur for s in sls)
          and all(means["random"] >= 1.2 * s for s in sls))
    detail = "means " + ", ".join(f"{k}={v:.2f}" for k, v in means.items())
    assert report(capsys, 2, ok, detail)


@pytest.fixture(scope="module")
def suite140():
    """Per-instance mean best_unsat for the four NMCTS/UCTMAX variants
    shared by criteria 3-5 (same seeds for every variant)."""
    insts = [generate_instance(140, 1400, 2, 14000 + i) for i in range(10)]

    def cfg(flips, eps=0.1):
        sls = SlsConfig(flip_budget=flips, epsilon_init=eps)
        return McConfig(rollout=RolloutPolicy("walksat", sls), budget=Budget("flips", C345_FLIPS))

    variants = {
        "uctmax_fixed": (uctmax, cfg(FlipBudget.fixed(2000))),
        "nmcts_fixed": (nmcts, cfg(FlipBudget.fixed(2000))),
        "nmcts_dynamic": (nmcts, cfg(FlipBudget.dynamic(2))),
        "nmcts_dynamic_eps1": (nmcts, cfg(FlipBudget.dynamic(2), 1.0)),
    }
    table = {name: [] for name in variants}
    for i, f in enumerate(insts):
        for name, (driver, c) in variants.items():
            runs = [driver(f, c, rng=run_seed(f"c3_{i}", "walksat", rep)).best_unsat
                    for rep in range(3)]
            table[name].append(float(np.mean(runs)))
    return {k: np.array(v) for k, v in table.items()}


def _wins(a, b, strict):
    return int(np.sum(a < b if strict else a <= b))


def test_criterion_3_nmcts_beats_uctmax(capsys, suite140):
    w = _wins(suite140["nmcts_fixed"], suite140["uctmax_fixed"], strict=True)
    detail = (f"NMCTS < UCTMAX on {w}/10 (means {suite140['nmcts_fixed'].mean():.2f} "
              f"vs {suite140['uctmax_fixed'].mean():.2f})")
    assert report(capsys, 3, w >= 7, detail)


def test_criterion_4_dynamic_flips(capsys, suite140):
    w = _wins(suite140["nmcts_dynamic"], suite140["nmcts_fixed"], strict=False)
    detail = (f"Dynamic(2) <= Fixed(2000) on {w}/10 (means {suite140['nmcts_dynamic'].mean():.2f} "
              f"vs {suite140['nmcts_fixed'].mean():.2f})")
    assert report(capsys, 4, w >= 7, detail)


def test_criterion_5_epsilon_greedy_init(capsys, suite140):
    w = _wins(suite140["nmcts_dynamic"], suite140["nmcts_dynamic_eps1"], strict=False)
    detail = (f"eps 0.1 <= eps 1.0 on {w}/10 (means {suite140['nmcts_dynamic'].mean():.2f} "
              f"vs {suite140['nmcts_dynamic_eps1'].mean():.2f})")
    assert report(capsys, 5, w >= 7, detail)


def _invariants():
    rng = np.random.default_rng(606)
    failed = []

    # incremental state vs recount over 10,000 random flips
    f = random_formula(30, 150, 4, 1)
    st = evaluate_full(f, rng.integers(0, 2, 30).astype(np.int8))
    for i, v in enumerate(rng.integers(1, 31, 10_000)):
        st.flip(int(v))
        if i % 97 == 0 or i == 9_999:
            fresh = evaluate_full(f, st.values)
            if not (np.array_equal(fresh.sat_count, st.sat_count)
                    and st.num_unsat == fresh.num_unsat == brute_unsat(f, st.values)):
                failed.append("incremental-vs-recount")
                break

    # bonus equals the observed delta, and flips are involutions
    g = generate_instance(25, 110, 3, 2)
    for _ in range(100):
        s = evaluate_full(g, rng.integers(0, 2, 25).astype(np.int8))
        for v in range(1, 26):
            before = s.copy()
            b = s.bonus(v)
            s.flip(v)
            if before.num_unsat - s.num_unsat != b:
                failed.append("bonus")
            s.flip(v)
            if not s.same_as(before):
                failed.append("involution")
    # GlobalBest monotone under interleaved threads
    h = generate_instance(50, 300, 3, 3)
    gb = GlobalBest()

    def worker(k):
        r = np.random.default_rng(k)
        for i in range(20):
            (walksat if (i + k) % 2 else novelty)(
                h, Assignment.empty(50), gb, SlsConfig(flip_budget=FlipBudget.fixed(150)), r)

    ts = [threading.Thread(target=worker, args=(k,)) for k in range(4)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    hist = [u for _, u in gb.history]
    if not all(a > b for a, b in zip(hist, hist[1:])) or brute_unsat(h, gb.values) != gb.num_unsat:
        failed.append("global-best")

    # uct_select vs direct argmax
    for _ in range(1000):
        node = SearchNode()
        node.Q = rng.random(2).tolist()
        node.N = rng.integers(0, 40, 2).tolist()
        node.visits = 1 + sum(node.N)
        c = float(rng.uniform(0, 3))
        u = [node.Q[a] + c * math.sqrt(math.log(node.visits) / (node.N[a] + 1)) for a in (0, 1)]
        if uct_select(node, c) != (1 if u[1] > u[0] else 0):
            failed.append("uct")
            break

    # nested bestScore monotone
    q = generate_instance(14, 70, 3, 4)
    for fn in (nmcs, znmcs):
        for level in (1, 2):
            trace = []
            fn(SearchState.root(q), level,
               McConfig(budget=Budget("rollouts", 10**6), znmcs_samples=3), None, level,
               trace=trace)
            if not all(a <= b for a, b in zip(trace, trace[1:])):
                failed.append(f"{fn.__name__}-monotone")

    if resolve_flip_budget(FlipBudget.dynamic(2, 1), 70) != 140:
        failed.append("resolve-flip-budget")

    # checkpoint curves non-increasing
    for method in ("uctmax", "nmcts", "nmcs", "znmcs"):
        rec = run_method(method, h, McConfig(budget=Budget("flips", 50_000)), rng=5)
        us = [u for _, u in rec.checkpoints]
        dense = [u for _, u in densify(gb.history, 7.5)]
        if us != sorted(us, reverse=True) or dense != sorted(dense, reverse=True):
            failed.append("checkpoints")

    # DIMACS roundtrip on 200 generated instances
    for i in range(200):
        f = (random_formula(1 + i % 20, 1 + i % 37, 5, i) if i % 2
             else generate_instance(3 + i % 30, i % 50, 3, i))
        if parse_dimacs(emit_dimacs(f)) != f:
            failed.append("roundtrip")
            break
    return failed


def test_criterion_6_invariant_suite(capsys):
    failed = _invariants()
    detail = "all invariants hold" if not failed else "failed: " + ", ".join(sorted(set(failed)))
    assert report(capsys, 6, not failed, detail)


def test_criterion_7_cli_determinism(capsys, tmp_path):
    inst = tmp_path / "c7.cnf"
    write_dimacs(generate_instance(60, 400, 3, 77), inst)
    cmd = [sys.executable, "-m", "mcmaxsat", "solve", "--instance", str(inst), "--method", "nmcts",
           "--rollout", "novelty", "--budget", "100000f", "--seed", "11"]
    values = []
    for _ in range(5):
        out = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
        values.append(out.strip().split(",")[7])
    detail = f"best_unsat over 5 runs: {values}"
    assert report(capsys, 7, len(set(values)) == 1, detail)
