"""Truth assignments and incrementally maintained clause counts.

An :class:`EvalState` keeps, for a complete assignment, the number of true
literals per clause and the set of falsified clauses, so flipping a
variable costs time proportional to its occurrences.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from . import _kernels as K
from .formula import Formula

UNASSIGNED = -1


class UnassignedVariable(ValueError):
    pass


class FrozenVariable(ValueError):
    pass


class Assignment:
    """Per-variable values in an int8 array: 1 true, 0 false, -1 unassigned.

    ``values[i]`` is the value of variable ``i + 1``.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = np.asarray(values, dtype=np.int8)

    @classmethod
    def empty(cls, n: int) -> "Assignment":
        return cls(np.full(n, UNASSIGNED, dtype=np.int8))

    @classmethod
    def from_mapping(cls, n: int, mapping: Mapping[int, bool]) -> "Assignment":
        a = cls.empty(n)
        for v, val in mapping.items():
            a[v] = val
        return a

    @classmethod
    def from_literals(cls, n: int, lits: Iterable[int]) -> "Assignment":
        a = cls.empty(n)
        for lit in lits:
            a[abs(lit)] = lit > 0
        return a

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, v: int) -> bool | None:
        x = self.values[v - 1]
        return None if x < 0 else bool(x)

    def __setitem__(self, v: int, val: bool | None) -> None:
        self.values[v - 1] = UNASSIGNED if val is None else int(bool(val))

    @property
    def num_assigned(self) -> int:
        return int(np.count_nonzero(self.values >= 0))

    @property
    def is_complete(self) -> bool:
        return bool(np.all(self.values >= 0))

    def copy(self) -> "Assignment":
        return Assignment(self.values.copy())

    def to_literals(self) -> list[int]:
        return [(i + 1) if x == 1 else -(i + 1) for i, x in enumerate(self.values) if x >= 0]

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"Assignment({self.to_literals()})"


class EvalState:
    """A complete assignment over ``formula`` plus its clause bookkeeping.

    ``frozen`` marks variables owned by a search-tree prefix; they are never
    flipped. Mutating methods work in place.
    """

    def __init__(self, formula: Formula, values: np.ndarray, frozen: np.ndarray | None = None):
        if values.shape != (formula.num_variables,):
            raise ValueError("assignment length does not match formula")
        if np.any(values < 0):
            missing = int(np.flatnonzero(values < 0)[0]) + 1
            raise UnassignedVariable(f"variable {missing} is unassigned")
        self.formula = formula
        self.values = np.array(values, dtype=np.int8)
        if frozen is None:
            frozen = np.zeros(formula.num_variables, dtype=np.bool_)
        self.frozen = np.asarray(frozen, dtype=np.bool_)
        self.sat_count = K.count_sat(formula.clause_ptr, formula.lit_var, formula.lit_sign, self.values)
        self.unsat_list, self.unsat_pos, self.num_unsat = K.build_unsat(self.sat_count)

    @property
    def assignment(self) -> Assignment:
        return Assignment(self.values.copy())

    @property
    def num_sat(self) -> int:
        return self.formula.num_clauses - self.num_unsat

    def unsat_clauses(self) -> np.ndarray:
        return np.sort(self.unsat_list[: self.num_unsat])

    def _check(self, v: int) -> int:
        if not 1 <= v <= self.formula.num_variables:
            raise IndexError(f"variable {v} out of range")
        i = v - 1
        if self.frozen[i]:
            raise FrozenVariable(f"variable {v} is frozen")
        return i

    def flip(self, v: int) -> "EvalState":
        i = self._check(v)
        f = self.formula
        self.num_unsat = int(K.flip_var(i, self.values, self.sat_count, self.unsat_list, self.unsat_pos,
                                        self.num_unsat, f.var_ptr, f.var_clause, f.var_delta))
        return self

    def bonus(self, v: int) -> int:
        i = self._check(v)
        f = self.formula
        return int(K.var_bonus(i, self.values, self.sat_count, f.var_ptr, f.var_clause, f.var_delta))

    def copy(self) -> "EvalState":
        new = EvalState.__new__(EvalState)
        new.formula = self.formula
        new.values = self.values.copy()
        new.frozen = self.frozen.copy()
        new.sat_count = self.sat_count.copy()
        new.unsat_list = self.unsat_list.copy()
        new.unsat_pos = self.unsat_pos.copy()
        new.num_unsat = self.num_unsat
        return new

    def same_as(self, other: "EvalState") -> bool:
        """Equal values, counts and falsified-clause set (list order ignored)."""
        return (np.array_equal(self.values, other.values)
                and np.array_equal(self.sat_count, other.sat_count)
                and self.num_unsat == other.num_unsat
                and np.array_equal(self.unsat_clauses(), other.unsat_clauses())
                and np.array_equal(self.frozen, other.frozen))


def evaluate_full(f: Formula, a: Assignment | np.ndarray, frozen=None) -> EvalState:
    values = a.values if isinstance(a, Assignment) else np.asarray(a, dtype=np.int8)
    return EvalState(f, values, frozen)


def flip(state: EvalState, v: int) -> EvalState:
    return state.flip(v)


def bonus(state: EvalState, v: int) -> int:
    return state.bonus(v)


def count_unsat(f: Formula, values: np.ndarray) -> int:
    """Number of clauses falsified by a complete 0/1 value array."""
    sat = K.count_sat(f.clause_ptr, f.lit_var, f.lit_sign, values)
    return int(np.count_nonzero(sat == 0))
