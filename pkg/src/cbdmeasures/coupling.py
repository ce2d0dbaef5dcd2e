"""Deterministic couplings, incidence matrices and probability vectors.

Column ``j`` of every incidence matrix is the deterministic assignment in
which global variable ``i`` (see :attr:`SystemFormat.variables`) takes value
``(j >> i) & 1``, i.e. variable 0 is the least significant bit.

Reduced rows come in three blocks:

* ``l``: the empty event, then each single variable in global order;
* ``b``: per context, every subset of at least two of its contents, ordered by
  size and then lexicographically by position in the context's list;
* ``c``: per content, every pair of contexts measuring it (positions in the
  connection, lexicographic). Higher-order connection marginals are never
  materialized; pairs and one-marginals pin the multimaximal coupling.

Complete rows list, per context, its ``2**n_c`` outcome patterns and then, per
content measured in two or more contexts, the ``2**m_q`` patterns of its
connection, both in pattern order. A one-variable connection would only repeat
a bunch marginal, so it gets no block.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import SystemTooLarge
from .system import (
    bunch_marginal,
    multimaximal_distribution,
    multimaximal_marginal,
    pattern_bits,
)

DEFAULT_MAX_VARS = 24


def max_vars():
    """The variable cap, overridable through ``CBD_MAX_VARS``."""
    env = os.environ.get("CBD_MAX_VARS")
    if env:
        return int(env)
    return DEFAULT_MAX_VARS


def check_size(fmt, cap=None):
    cap = max_vars() if cap is None else cap
    if fmt.n_vars > cap:
        raise SystemTooLarge(f"system has {fmt.n_vars} variables; the cap is {cap} "
                             f"(2**N columns are stored densely)")


@dataclass(frozen=True)
class OutcomeIndexing:
    format: object

    @property
    def column_count(self):
        return 2 ** self.format.n_vars

    def assignment(self, j):
        """``{(context, content): value}`` for column ``j``."""
        return {v: (j >> i) & 1 for i, v in enumerate(self.format.variables)}

    def column(self, assignment):
        j = 0
        for i, v in enumerate(self.format.variables):
            if assignment[v]:
                j |= 1 << i
        return j

    def value_table(self):
        """Array ``V[i, j]`` = value of variable ``i`` in column ``j``."""
        n = self.format.n_vars
        cols = np.arange(2 ** n, dtype=np.int64)
        return ((cols[None, :] >> np.arange(n, dtype=np.int64)[:, None]) & 1).astype(np.uint8)


@dataclass(frozen=True)
class RowEvent:
    """One row label: a block name, the variables involved and, for complete
    rows, the values those variables must take."""

    block: str       # "l", "b", "c" (reduced) or "bunch", "connection" (complete)
    owner: object    # context or content the row belongs to (None for the empty event)
    variables: tuple  # global variable indices
    values: tuple | None = None

    def pairs(self, fmt):
        return tuple(fmt.variables[i] for i in self.variables)


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    kind: str            # "reduced" | "complete"
    format: object
    rows: tuple          # RowEvent per row
    matrix: np.ndarray   # uint8, rows x 2**N
    blocks: dict         # block name -> slice (reduced) or owner -> slice (complete)

    @property
    def shape(self):
        return self.matrix.shape


def _reduced_rows(fmt):
    vi = fmt.var_index
    l_rows = [RowEvent("l", None, ())]
    l_rows += [RowEvent("l", v[0], (i,)) for i, v in enumerate(fmt.variables)]
    b_rows = []
    for c, measured in zip(fmt.contexts, fmt.incidence):
        for k in range(2, len(measured) + 1):
            for combo in itertools.combinations(range(len(measured)), k):
                b_rows.append(RowEvent("b", c, tuple(vi[(c, measured[p])] for p in combo)))
    c_rows = []
    for q in fmt.contents:
        conn = fmt.connection(q)
        for a, b in itertools.combinations(range(len(conn)), 2):
            c_rows.append(RowEvent("c", q, (vi[(conn[a], q)], vi[(conn[b], q)])))
    return l_rows, b_rows, c_rows


@lru_cache(maxsize=32)
def _reduced(fmt):
    l_rows, b_rows, c_rows = _reduced_rows(fmt)
    rows = tuple(l_rows + b_rows + c_rows)
    V = OutcomeIndexing(fmt).value_table()
    M = np.empty((len(rows), 2 ** fmt.n_vars), dtype=np.uint8)
    for r, ev in enumerate(rows):
        if ev.variables:
            M[r] = np.logical_and.reduce(V[list(ev.variables)], axis=0)
        else:
            M[r] = 1
    M.setflags(write=False)
    nl, nb = len(l_rows), len(b_rows)
    blocks = {"l": slice(0, nl), "b": slice(nl, nl + nb), "c": slice(nl + nb, len(rows))}
    return IncidenceMatrix("reduced", fmt, rows, M, blocks)


def build_reduced_matrix(fmt, cap=None):
    """The reduced Boolean matrix ``M = (M_l; M_b; M_c)`` of a format."""
    check_size(fmt, cap)
    return _reduced(fmt)


@lru_cache(maxsize=32)
def _complete(fmt):
    vi = fmt.var_index
    V = OutcomeIndexing(fmt).value_table()
    rows = []
    mats = []
    blocks = {}
    start = 0
    groups = [("bunch", c, tuple(vi[(c, q)] for q in measured))
              for c, measured in zip(fmt.contexts, fmt.incidence)]
    groups += [("connection", q, tuple(vi[(c, q)] for c in fmt.connection(q)))
               for q in fmt.contents if fmt.connection_size(q) > 1]
    for block, owner, var_ids in groups:
        n = len(var_ids)
        # pattern index of each column restricted to these variables
        code = np.zeros(V.shape[1], dtype=np.int64)
        for k, i in enumerate(var_ids):
            code |= V[i].astype(np.int64) << (n - 1 - k)
        for t in range(2 ** n):
            rows.append(RowEvent(block, owner, var_ids, pattern_bits(t, n)))
        mats.append((code[None, :] == np.arange(2 ** n)[:, None]).astype(np.uint8))
        blocks[(block, owner)] = slice(start, start + 2 ** n)
        start += 2 ** n
    M = np.vstack(mats)
    M.setflags(write=False)
    return IncidenceMatrix("complete", fmt, tuple(rows), M, blocks)


def build_complete_matrix(fmt, cap=None):
    """The complete Boolean matrix ``M(.)`` over bunch and connection patterns."""
    check_size(fmt, cap)
    return _complete(fmt)


@dataclass(frozen=True)
class ReducedVector:
    p_l: tuple
    p_b: tuple
    p_c: tuple

    @property
    def full(self):
        return self.p_l + self.p_b + self.p_c

    @property
    def K(self):
        return len(self.p_b)


@dataclass(frozen=True)
class CompleteVector:
    p_bunch: tuple       # per context, the bunch pmf
    p_connection: tuple  # per content with m_q > 1, the multimaximal pmf

    @property
    def full(self):
        return tuple(p for block in self.p_bunch + self.p_connection for p in block)


def reduced_vector(system):
    """``p* = (p_l, p_b, p_c)`` in the row order of :func:`build_reduced_matrix`."""
    fmt = system.format
    one = Fraction(1) if system.exact else 1.0
    l_rows, b_rows, c_rows = _reduced_rows(fmt)
    p_l = [one] + [bunch_marginal(system, c, (q,)) for c, q in fmt.variables]
    p_b = [bunch_marginal(system, ev.owner, [fmt.variables[i][1] for i in ev.variables])
           for ev in b_rows]
    p_c = [multimaximal_marginal(system, ev.owner, [fmt.variables[i][0] for i in ev.variables])
           for ev in c_rows]
    return ReducedVector(tuple(p_l), tuple(p_b), tuple(p_c))


def complete_vector(system):
    """``p(.) = (p(b), p(c))``: bunch pmfs, then multimaximal connection pmfs."""
    fmt = system.format
    bunches = tuple(tuple(pmf) for pmf in system.bunches)
    conns = tuple(multimaximal_distribution(system, q).pmf_vector() for q in fmt.contents
                  if fmt.connection_size(q) > 1)
    return CompleteVector(bunches, conns)
