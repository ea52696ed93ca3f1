"""CNF formulas: DIMACS parsing/emission and the occurrence indices solvers share.

Literals are DIMACS-style signed integers (``3`` is x3, ``-3`` is not x3).
Variables are numbered from 1 on the outside; every array attribute of
:class:`Formula` is indexed from 0 (``pos_count[0]`` belongs to x1).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class DimacsError(ValueError):
    """Base class for malformed DIMACS input."""


class MalformedHeader(DimacsError):
    pass


class LiteralOutOfRange(DimacsError):
    pass


class UnterminatedClause(DimacsError):
    pass


class ClauseCountMismatch(DimacsError):
    pass


class EmptyClause(DimacsError):
    pass


class Literal(NamedTuple):
    variable: int
    positive: bool

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is not a literal")
        return cls(abs(lit), lit > 0)

    def __int__(self) -> int:
        return self.variable if self.positive else -self.variable

    def __neg__(self) -> "Literal":
        return Literal(self.variable, not self.positive)


@dataclass(frozen=True)
class Clause:
    """A disjunction of literals, kept in file order (duplicates included)."""

    literals: tuple[int, ...]

    def __post_init__(self):
        if not self.literals:
            raise EmptyClause("clause has no literals")
        if any(lit == 0 for lit in self.literals):
            raise ValueError("0 is not a literal")

    def __len__(self) -> int:
        return len(self.literals)

    def __iter__(self):
        return iter(self.literals)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(abs(lit) for lit in self.literals)

    @property
    def has_duplicates(self) -> bool:
        return len(set(self.literals)) != len(self.literals)

    @property
    def is_tautology(self) -> bool:
        lits = set(self.literals)
        return any(-lit in lits for lit in lits)


class Formula:
    """Immutable CNF instance with per-literal and per-variable occurrence data.

    Besides the clause list, the constructor builds flat arrays for the
    numba kernels:

    ``clause_ptr``/``lit_var``/``lit_sign``
        CSR layout of the clauses: literal ``j`` of clause ``c`` lives at
        ``clause_ptr[c] <= j < clause_ptr[c+1]``, 0-based variable and a
        1/0 polarity.
    ``var_ptr``/``var_clause``/``var_delta``
        For each variable, the distinct clauses it occurs in and the net
        change ``pos_mult - neg_mult`` in the clause's true-literal count
        when the variable goes from false to true.
    """

    def __init__(self, num_variables: int, clauses: Iterable[Clause | Sequence[int]]):
        if num_variables < 0:
            raise ValueError("num_variables must be non-negative")
        cl = tuple(c if isinstance(c, Clause) else Clause(tuple(int(x) for x in c)) for c in clauses)
        for c in cl:
            for lit in c.literals:
                if abs(lit) > num_variables:
                    raise LiteralOutOfRange(f"literal {lit} exceeds {num_variables} variables")
        self._n = num_variables
        self._clauses = cl
        self._build_arrays()

    def _build_arrays(self) -> None:
        n, m = self._n, len(self._clauses)
        sizes = np.fromiter((len(c) for c in self._clauses), dtype=np.int64, count=m)
        self.clause_ptr = np.zeros(m + 1, dtype=np.int64)
        np.cumsum(sizes, out=self.clause_ptr[1:])
        flat = np.fromiter((lit for c in self._clauses for lit in c.literals), dtype=np.int64,
                           count=int(self.clause_ptr[-1]))
        self.lit_var = (np.abs(flat) - 1).astype(np.int64)
        self.lit_sign = (flat > 0).astype(np.int8)
        self.pos_count = np.bincount(self.lit_var[flat > 0], minlength=n).astype(np.int64)
        self.neg_count = np.bincount(self.lit_var[flat < 0], minlength=n).astype(np.int64)

        occ: dict[int, list[int]] = {}
        per_var: list[dict[int, int]] = [dict() for _ in range(n)]
        for ci, c in enumerate(self._clauses):
            for lit in c.literals:
                lst = occ.setdefault(lit, [])
                if not lst or lst[-1] != ci:
                    lst.append(ci)
                d = per_var[abs(lit) - 1]
                d[ci] = d.get(ci, 0) + (1 if lit > 0 else -1)
        self._occ = {lit: tuple(v) for lit, v in occ.items()}

        counts = np.fromiter((len(d) for d in per_var), dtype=np.int64, count=n)
        self.var_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.var_ptr[1:])
        total = int(self.var_ptr[-1])
        self.var_clause = np.fromiter((ci for d in per_var for ci in d), dtype=np.int64, count=total)
        self.var_delta = np.fromiter((dv for d in per_var for dv in d.values()), dtype=np.int64,
                                     count=total)
        for arr in (self.clause_ptr, self.lit_var, self.lit_sign, self.pos_count, self.neg_count,
                    self.var_ptr, self.var_clause, self.var_delta):
            arr.flags.writeable = False

    @property
    def num_variables(self) -> int:
        return self._n

    @property
    def num_clauses(self) -> int:
        return len(self._clauses)

    @property
    def clauses(self) -> tuple[Clause, ...]:
        return self._clauses

    def occurrences(self, lit: int) -> tuple[int, ...]:
        """Indices of the clauses containing ``lit``, ascending, each listed once."""
        if lit == 0 or abs(lit) > self._n:
            raise LiteralOutOfRange(f"literal {lit} out of range")
        return self._occ.get(lit, ())

    @property
    def occurrence_index(self) -> dict[int, tuple[int, ...]]:
        return {lit: self.occurrences(lit) for v in range(1, self._n + 1) for lit in (v, -v)}

    def validate(self) -> list[str]:
        """Return human-readable warnings (duplicate literals, tautologies)."""
        issues = []
        for i, c in enumerate(self._clauses):
            if c.has_duplicates:
                issues.append(f"clause {i}: duplicate literal")
            if c.is_tautology:
                issues.append(f"clause {i}: tautology")
        return issues

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return self._n == other._n and self._clauses == other._clauses

    def __hash__(self):
        return hash((self._n, self._clauses))

    def __repr__(self):
        return f"Formula(num_variables={self._n}, num_clauses={self.num_clauses})"


def parse_dimacs(text: str | Iterable[str]) -> Formula:
    """Parse DIMACS CNF text (a string or an iterable of lines).

    Clauses may span lines. A line holding only ``%`` ends the clause
    section, as in the old SATLIB files.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    header: tuple[int, int] | None = None
    clauses: list[tuple[int, ...]] = []
    pending: list[int] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line == "%":
            break
        if line.startswith("p"):
            if header is not None:
                raise MalformedHeader(f"line {lineno}: second header")
            fields = line.split()
            if len(fields) != 4 or fields[0] != "p" or fields[1] != "cnf":
                raise MalformedHeader(f"line {lineno}: expected 'p cnf <vars> <clauses>'")
            try:
                nv, nc = int(fields[2]), int(fields[3])
            except ValueError:
                raise MalformedHeader(f"line {lineno}: non-integer counts") from None
            if nv < 0 or nc < 0:
                raise MalformedHeader(f"line {lineno}: negative counts")
            header = (nv, nc)
            continue
        if header is None:
            raise MalformedHeader(f"line {lineno}: clause data before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad token {tok!r}") from None
            if lit == 0:
                if not pending:
                    raise EmptyClause(f"line {lineno}: empty clause")
                clauses.append(tuple(pending))
                pending = []
            elif abs(lit) > header[0]:
                raise LiteralOutOfRange(f"line {lineno}: literal {lit} exceeds {header[0]} variables")
            else:
                pending.append(lit)
    if header is None:
        raise MalformedHeader("missing 'p cnf' header")
    if pending:
        raise UnterminatedClause(f"clause {pending} not terminated by 0")
    if len(clauses) != header[1]:
        raise ClauseCountMismatch(f"header declares {header[1]} clauses, found {len(clauses)}")
    return Formula(header[0], clauses)


def emit_dimacs(f: Formula) -> str:
    out = [f"p cnf {f.num_variables} {f.num_clauses}\n"]
    out.extend(" ".join(map(str, c.literals)) + " 0\n" for c in f.clauses)
    return "".join(out)


def read_dimacs(path: str | Path) -> Formula:
    with open(path) as fh:
        return parse_dimacs(fh)


def write_dimacs(f: Formula, path: str | Path) -> None:
    Path(path).write_text(emit_dimacs(f))
