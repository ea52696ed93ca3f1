import pytest
from hypothesis import given, settings, strategies as st

from mcmaxsat import Formula, Literal, emit_dimacs, parse_dimacs
from mcmaxsat.bench import generate_instance
from mcmaxsat.formula import (
    ClauseCountMismatch, EmptyClause, LiteralOutOfRange, MalformedHeader, UnterminatedClause,
)

from conftest import random_formula


def test_parse_basic():
    f = parse_dimacs("p cnf 2 2\n1 2 0\n-1 0\n")
    assert f.num_variables == 2
    assert [c.literals for c in f.clauses] == [(1, 2), (-1,)]


def test_parse_single_literal_counts():
    f = parse_dimacs("p cnf 1 1\n1 0\n")
    assert f.pos_count[0] == 1 and f.neg_count[0] == 0


def test_parse_comments_multiline_and_percent():
    text = "c hello\nc world\np cnf 3 2\n1 -2\n 3 0 -1\n0\n%\n0\n"
    f = parse_dimacs(text)
    assert [c.literals for c in f.clauses] == [(1, -2, 3), (-1,)]


@pytest.mark.parametrize("text, err", [
    ("1 2 0\n", MalformedHeader),
    ("p cnf x 2\n", MalformedHeader),
    ("p sat 2 1\n1 0\n", MalformedHeader),
    ("", MalformedHeader),
    ("p cnf 2 1\n1 3 0\n", LiteralOutOfRange),
    ("p cnf 2 1\n1 2\n", UnterminatedClause),
    ("p cnf 2 2\n1 2 0\n", ClauseCountMismatch),
    ("p cnf 2 1\n0\n", EmptyClause),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_dimacs(text)


def test_emit():
    f = Formula(2, [(1, 2), (-1,)])
    assert emit_dimacs(f) == "p cnf 2 2\n1 2 0\n-1 0\n"
    assert emit_dimacs(Formula(0, [])) == "p cnf 0 0\n"


def test_duplicates_and_tautologies_are_kept_and_flagged():
    f = parse_dimacs("p cnf 2 2\n1 1 2 0\n1 -1 0\n")
    assert f.clauses[0].literals == (1, 1, 2)
    assert f.clauses[0].has_duplicates and f.clauses[1].is_tautology
    assert f.pos_count[0] == 3 and f.neg_count[0] == 1
    assert len(f.validate()) == 2


def _rebuilt_index(f):
    idx = {}
    for v in range(1, f.num_variables + 1):
        for lit in (v, -v):
            idx[lit] = tuple(i for i, c in enumerate(f.clauses) if lit in c.literals)
    return idx


def test_occurrence_index_rebuild_equals_stored():
    f = generate_instance(10, 40, 3, 7)
    assert f.occurrence_index == _rebuilt_index(f)


@pytest.mark.parametrize("seed", range(5))
def test_counts_match_fresh_scan(seed):
    f = random_formula(8, 30, 4, seed)
    for v in range(1, 9):
        pos = sum(c.literals.count(v) for c in f.clauses)
        neg = sum(c.literals.count(-v) for c in f.clauses)
        assert (f.pos_count[v - 1], f.neg_count[v - 1]) == (pos, neg)
    assert f.occurrence_index == _rebuilt_index(f)


def test_literal_type():
    lit = Literal.from_int(-3)
    assert lit == Literal(3, False) and int(lit) == -3 and int(-lit) == 3


@st.composite
def formulas(draw):
    n = draw(st.integers(0, 12))
    if n == 0:
        return Formula(0, [])
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from((v, -v)))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=5), max_size=20))
    return Formula(n, clauses)


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_roundtrip_property(f):
    g = parse_dimacs(emit_dimacs(f))
    assert g == f
    assert emit_dimacs(g) == emit_dimacs(f)
