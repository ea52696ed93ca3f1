"""Numba kernels for clause bookkeeping and the local-search inner loop.

State layout shared by every kernel:

values      int8[n]   0/1 truth values (-1 never reaches these kernels)
sat_count   int64[m]  number of true literal occurrences per clause
unsat_list  int64[m]  first ``num_unsat`` entries are the falsified clauses
unsat_pos   int64[m]  position of a clause in ``unsat_list`` or -1
"""

import numpy as np
from numba import njit

# trace codes for instrumented runs
NOISE, GREEDY, SECOND = 0, 1, 2


@njit(cache=True)
def count_sat(clause_ptr, lit_var, lit_sign, values):
    m = clause_ptr.shape[0] - 1
    sat = np.zeros(m, dtype=np.int64)
    for c in range(m):
        s = 0
        for j in range(clause_ptr[c], clause_ptr[c + 1]):
            if values[lit_var[j]] == lit_sign[j]:
                s += 1
        sat[c] = s
    return sat


@njit(cache=True)
def build_unsat(sat_count):
    m = sat_count.shape[0]
    unsat_list = np.empty(m, dtype=np.int64)
    unsat_pos = np.full(m, -1, dtype=np.int64)
    k = 0
    for c in range(m):
        if sat_count[c] == 0:
            unsat_list[k] = c
            unsat_pos[c] = k
            k += 1
    return unsat_list, unsat_pos, k


@njit(cache=True)
def flip_var(v, values, sat_count, unsat_list, unsat_pos, num_unsat, var_ptr, var_clause, var_delta):
    """Negate ``values[v]`` and return the new number of falsified clauses."""
    if values[v] == 1:
        values[v] = 0
        sign = -1
    else:
        values[v] = 1
        sign = 1
    for j in range(var_ptr[v], var_ptr[v + 1]):
        d = sign * var_delta[j]
        if d == 0:
            continue
        c = var_clause[j]
        old = sat_count[c]
        new = old + d
        sat_count[c] = new
        if old == 0:
            # becomes satisfied: swap-remove from the unsat list
            p = unsat_pos[c]
            last = unsat_list[num_unsat - 1]
            unsat_list[p] = last
            unsat_pos[last] = p
            unsat_pos[c] = -1
            num_unsat -= 1
        elif new == 0:
            unsat_list[num_unsat] = c
            unsat_pos[c] = num_unsat
            num_unsat += 1
    return num_unsat


@njit(cache=True)
def var_bonus(v, values, sat_count, var_ptr, var_clause, var_delta):
    """make(v) - break(v) for flipping ``v``; state is not modified."""
    sign = -1 if values[v] == 1 else 1
    b = 0
    for j in range(var_ptr[v], var_ptr[v + 1]):
        old = sat_count[var_clause[j]]
        # d == 0 only for clauses holding both v and -v, which are never falsified
        b += (old == 0) - (old + sign * var_delta[j] == 0)
    return b


@njit(cache=True)
def _has_free_unsat(num_unsat, unsat_list, frozen, clause_ptr, lit_var):
    for i in range(num_unsat):
        c = unsat_list[i]
        for j in range(clause_ptr[c], clause_ptr[c + 1]):
            if not frozen[lit_var[j]]:
                return True
    return False


@njit(cache=True)
def local_search(values, sat_count, unsat_list, unsat_pos, num_unsat, frozen,
                 clause_ptr, lit_var, var_ptr, var_clause, var_delta,
                 max_flips, eps1, eps2, novelty, track_best, rng,
                 best_values, trace_var, trace_kind):
    """WalkSat / Novelty loop over an initialised state.

    Each iteration picks a uniformly random falsified clause. With
    probability ``eps1`` a random free variable of it is flipped; otherwise
    the free variable with the highest bonus (lowest index on ties). With
    ``novelty`` set, if that variable was the last one flipped, the
    second-best is taken instead with probability ``1 - eps2``.

    ``best_values`` receives the best assignment visited when
    ``track_best`` is set, else the final one. Trace arrays of length
    ``max_flips`` record each flip (pass empty arrays to disable).

    Returns ``(best_unsat, flips, final_unsat)``.
    """
    n = values.shape[0]
    maxlen = 0
    for c in range(clause_ptr.shape[0] - 1):
        if clause_ptr[c + 1] - clause_ptr[c] > maxlen:
            maxlen = clause_ptr[c + 1] - clause_ptr[c]
    cand = np.empty(maxlen, dtype=np.int64)
    tracing = trace_var.shape[0] > 0

    best = num_unsat
    for i in range(n):
        best_values[i] = values[i]
    last = -1
    flips = 0
    it = 0
    while it < max_flips and num_unsat > 0:
        it += 1
        c = unsat_list[int(rng.random() * num_unsat)]
        k = 0
        for j in range(clause_ptr[c], clause_ptr[c + 1]):
            v = lit_var[j]
            if frozen[v]:
                continue
            seen = False
            for q in range(k):
                if cand[q] == v:
                    seen = True
                    break
            if not seen:
                cand[k] = v
                k += 1
        if k == 0:
            if not _has_free_unsat(num_unsat, unsat_list, frozen, clause_ptr, lit_var):
                break
            continue

        if rng.random() < eps1:
            v = cand[int(rng.random() * k)]
            kind = NOISE
        else:
            v1 = -1
            b1 = 0
            v2 = -1
            b2 = 0
            for q in range(k):
                v = cand[q]
                b = var_bonus(v, values, sat_count, var_ptr, var_clause, var_delta)
                if v1 < 0 or b > b1 or (b == b1 and v < v1):
                    v2 = v1
                    b2 = b1
                    v1 = v
                    b1 = b
                elif v2 < 0 or b > b2 or (b == b2 and v < v2):
                    v2 = v
                    b2 = b
            v = v1
            kind = GREEDY
            if novelty and v1 == last and v2 >= 0:
                # no draw when the outcome is certain, so eps2 = 1 replays walksat
                if eps2 <= 0.0 or (eps2 < 1.0 and rng.random() < 1.0 - eps2):
                    v = v2
                    kind = SECOND

        if tracing:
            trace_var[flips] = v
            trace_kind[flips] = kind
        num_unsat = flip_var(v, values, sat_count, unsat_list, unsat_pos, num_unsat,
                             var_ptr, var_clause, var_delta)
        last = v
        flips += 1
        if track_best and num_unsat < best:
            best = num_unsat
            for i in range(n):
                best_values[i] = values[i]

    if not track_best:
        best = num_unsat
        for i in range(n):
            best_values[i] = values[i]
    return best, flips, num_unsat
