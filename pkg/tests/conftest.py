import itertools
import random
import sys

import numpy as np
import pytest

from mcmaxsat import Formula
from mcmaxsat.bench import generate_instance


def brute_unsat(f: Formula, values) -> int:
    """Clause-by-clause count of falsified clauses, independent of the kernels."""
    bad = 0
    for c in f.clauses:
        if not any((values[abs(l) - 1] == 1) == (l > 0) for l in c.literals):
            bad += 1
    return bad


def brute_optimum(f: Formula) -> int:
    n = f.num_variables
    return min(brute_unsat(f, bits) for bits in itertools.product((0, 1), repeat=n))


def random_formula(n, m, k_max, seed, allow_dupes=True):
    """Random CNF with mixed clause widths, duplicates and tautologies."""
    r = random.Random(seed)
    clauses = []
    for _ in range(m):
        k = r.randint(1, k_max)
        if allow_dupes:
            lits = [r.choice((1, -1)) * r.randint(1, n) for _ in range(k)]
        else:
            lits = [r.choice((1, -1)) * v for v in r.sample(range(1, n + 1), min(k, n))]
        clauses.append(lits)
    return Formula(n, clauses)


@pytest.fixture
def f3sat():
    return generate_instance(10, 40, 3, 1234)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
