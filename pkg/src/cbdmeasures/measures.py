"""Degree-of-contextuality and degree-of-noncontextuality measures.

Every measure is one or more linear programs over the reduced matrix
``M = (M_l; M_b; M_c)`` or the complete matrix ``M(.)``:

* ``cnt1``  -- L1 distance from the multimaximal connection vector ``p_c*`` to
  the connection vectors compatible with the observed bunches;
* ``cnt2``  -- L1 distance from the observed bunch vector ``p_b*`` to the bunch
  vectors compatible with the multimaximal connections;
* ``cnt3``  -- minimal total variation of a signed coupling, minus 1;
* ``cntf``  -- 1 minus the largest mass of a subnormalized coupling dominated by
  the complete probability vector (bunches plus multimaximal connections);
* ``ncnt2`` -- for noncontextual systems, the smallest single-coordinate move
  of ``p_b*`` that reaches the boundary of the noncontextuality polytope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import lp
from .coupling import (
    OutcomeIndexing,
    build_complete_matrix,
    build_reduced_matrix,
    complete_vector,
    reduced_vector,
)
from .errors import (
    InfeasibleBunches,
    MeasureUndefined,
    NumericBreakdown,
    SystemIsContextual,
)

MEASURES = ("cnt1", "cnt2", "cnt3", "cntf", "ncnt2")

# float results closer than this to the contextual/noncontextual boundary are
# re-decided in rational mode
BOUNDARY_TOL = 1e-6


@dataclass(frozen=True)
class MeasureReport:
    measure: str
    value: object
    contextual: bool
    mode: str
    objective: object = None
    witness: tuple = ()
    details: dict = field(default_factory=dict)


def resolve_mode(system, mode=None):
    if mode is None:
        return "rational" if system.exact else "float"
    if mode not in lp.MODES:
        raise ValueError(f"mode must be one of {lp.MODES}, not {mode!r}")
    return mode


def _cast(system, mode):
    return system.to_exact() if mode == "rational" else system.to_float()


def _zero(mode):
    return Fraction(0) if mode == "rational" else 0.0


def _solve(problem, mode):
    """Solve, falling back to rational arithmetic if the float run is unsound."""
    if mode == "float":
        try:
            sol = lp.solve(problem, "float")
            if sol.certified:
                return sol
        except NumericBreakdown:
            pass
        return lp.solve(problem, "rational")
    return lp.solve(problem, "rational")


def _reduced_data(system, mode):
    s = _cast(system, mode)
    M = build_reduced_matrix(s.format)
    p = reduced_vector(s)
    return M, p


def _block(M, name):
    return M.matrix[M.blocks[name]].astype(np.int64)


def _zeros(rows, cols):
    return np.zeros((rows, cols), dtype=np.int64)


def _live_columns(M, p, skip_c=()):
    """Columns that may carry mass while the ``l`` rows and the ``c`` rows
    (except those in ``skip_c``) are held at their values in ``p``.

    Any joint value of a single variable or of a connection pair whose
    implied probability is exactly 0 rules out every column showing it.
    Multimaximal pairs always have one such discordant pattern.
    """
    fmt = M.format
    V = OutcomeIndexing(fmt).value_table().astype(bool)
    live = np.ones(V.shape[1], dtype=bool)
    p_l = p.p_l[1:]
    for i, v in enumerate(p_l):
        if v == 0:
            live &= ~V[i]
        elif v == 1:
            live &= V[i]
    c_rows = M.rows[M.blocks["c"]]
    for r, (ev, both) in enumerate(zip(c_rows, p.p_c)):
        if r in skip_c:
            continue
        a, b = ev.variables
        masses = {(1, 1): both, (1, 0): p_l[a] - both, (0, 1): p_l[b] - both,
                  (0, 0): 1 - p_l[a] - p_l[b] + both}
        for (va, vb), mass in masses.items():
            if mass == 0:
                live &= ~((V[a] == va) & (V[b] == vb))
    return np.nonzero(live)[0]


def _expand(x, cols, n, mode):
    full = [_zero(mode)] * n
    for j, v in zip(cols, x):
        full[j] = v
    return tuple(full)


def _feasibility_problem(system, mode):
    M, p = _reduced_data(system, mode)
    cols = _live_columns(M, p)
    if len(cols) == 0:
        return None
    A = M.matrix[:, cols]
    return lp.LpProblem(np.zeros(len(cols), dtype=np.int64), A_eq=A, b_eq=list(p.full))


def _is_contextual_with(system, mode):
    problem = _feasibility_problem(system, mode)
    return problem is None or not bool(lp.feasible(problem, mode))


def is_contextual(system, mode=None):
    """True iff no nonnegative coupling vector reproduces the reduced vector."""
    mode = resolve_mode(system, mode)
    if mode == "rational":
        return _is_contextual_with(system, "rational")
    problem = _feasibility_problem(system, "float")
    if problem is None:
        return True
    try:
        sol = lp.solve(problem, "float")
    except NumericBreakdown:
        return _is_contextual_with(system, "rational")
    if sol.phase_one_value is None or sol.phase_one_value <= BOUNDARY_TOL:
        return _is_contextual_with(system, "rational")
    return True


def _flag(system, value, mode):
    """Contextual flag for a measure value, exact near zero."""
    if mode == "rational":
        return value > 0
    if value > BOUNDARY_TOL:
        return True
    return is_contextual(system, "float")


def _finish(system, name, value, mode, **kw):
    contextual = bool(_flag(system, value, mode))
    if not contextual and mode == "float":
        value = 0.0
    return MeasureReport(name, value, contextual, mode, **kw)


def cnt1(system, mode=None):
    """Maximize ``1 . M_c x`` over couplings matching ``p_l*`` and ``p_b*``;
    the measure is ``1 . p_c*`` minus that optimum."""
    mode = resolve_mode(system, mode)
    M, p = _reduced_data(system, mode)
    Ml, Mb, Mc = _block(M, "l"), _block(M, "b"), _block(M, "c")
    c = Mc.sum(axis=0).astype(np.int64)
    problem = lp.LpProblem(c, A_eq=np.vstack([Ml, Mb]), b_eq=list(p.p_l + p.p_b), sense="max")
    sol = _solve(problem, mode)
    if not sol.optimal:
        raise InfeasibleBunches(f"bunch constraints are {sol.status}")
    used = sol.mode
    total = sum(p.p_c, _zero(mode))
    value = total - sol.value
    if used == "rational" and mode == "float":
        value = float(value)
    return _finish(system, "cnt1", value, mode, objective=sol.value, witness=sol.x,
                   details={"solver_mode": used, "pivots": sol.pivots})


def cnt1_direct(system, mode=None):
    """CNT1 as the direct minimum of ``||p_c* - M_c x||_1``, no monotonicity used."""
    mode = resolve_mode(system, mode)
    M, p = _reduced_data(system, mode)
    Ml, Mb, Mc = _block(M, "l"), _block(M, "b"), _block(M, "c")
    n, k = M.shape[1], Mc.shape[0]
    eye = np.eye(k, dtype=np.int64)
    A_le = np.vstack([np.hstack([Mc, -eye]), np.hstack([-Mc, -eye])])
    b_le = list(p.p_c) + [-v for v in p.p_c]
    A_eq = np.hstack([np.vstack([Ml, Mb]), _zeros(Ml.shape[0] + Mb.shape[0], k)])
    c = np.concatenate([np.zeros(n, dtype=np.int64), np.ones(k, dtype=np.int64)])
    sol = _solve(lp.LpProblem(c, A_eq=A_eq, b_eq=list(p.p_l + p.p_b), A_le=A_le, b_le=b_le), mode)
    if not sol.optimal:
        raise InfeasibleBunches(f"bunch constraints are {sol.status}")
    value = sol.value if mode == "rational" else float(sol.value)
    return _finish(system, "cnt1", value, mode, objective=sol.value, witness=sol.x[:n],
                   details={"d": sol.x[n:]})


def cnt2(system, mode=None):
    """Minimize ``1 . d`` subject to ``-d <= p_b* - M_b x <= d`` with the
    low-order and connection rows held at ``p_l*`` and ``p_c*``."""
    mode = resolve_mode(system, mode)
    M, p = _reduced_data(system, mode)
    cols = _live_columns(M, p)
    if len(cols) == 0:
        raise InfeasibleBunches("multimaximal connections admit no coupling")
    Ml, Mb, Mc = (_block(M, b)[:, cols] for b in ("l", "b", "c"))
    n, k = len(cols), Mb.shape[0]
    eye = np.eye(k, dtype=np.int64)
    A_le = np.vstack([np.hstack([Mb, -eye]), np.hstack([-Mb, -eye])])
    b_le = list(p.p_b) + [-v for v in p.p_b]
    A_eq = np.hstack([np.vstack([Ml, Mc]), _zeros(Ml.shape[0] + Mc.shape[0], k)])
    c = np.concatenate([np.zeros(n, dtype=np.int64), np.ones(k, dtype=np.int64)])
    problem = lp.LpProblem(c, A_eq=A_eq, b_eq=list(p.p_l + p.p_c), A_le=A_le, b_le=b_le)
    sol = _solve(problem, mode)
    if not sol.optimal:
        raise InfeasibleBunches(f"multimaximal connections admit no coupling ({sol.status})")
    value = sol.value if mode == "rational" else float(sol.value)
    x = _expand(sol.x[:n], cols, M.shape[1], mode)
    return _finish(system, "cnt2", value, mode, objective=sol.value, witness=x,
                   details={"d": sol.x[n:], "solver_mode": sol.mode, "pivots": sol.pivots})


def cnt3(system, mode=None):
    """Minimize the negative mass ``1 . y-`` of a signed coupling ``y+ - y-``
    with ``M (y+ - y-) = p*``; the measure is ``1 . |y+ - y-| - 1``."""
    mode = resolve_mode(system, mode)
    M, p = _reduced_data(system, mode)
    A = M.matrix.astype(np.int64)
    n = A.shape[1]
    c = np.concatenate([np.zeros(n, dtype=np.int64), np.ones(n, dtype=np.int64)])
    problem = lp.LpProblem(c, A_eq=np.hstack([A, -A]), b_eq=list(p.full))
    sol = _solve(problem, mode)
    if not sol.optimal:
        raise InfeasibleBunches(f"signed coupling LP is {sol.status}")
    y = [a - b for a, b in zip(sol.x[:n], sol.x[n:])]
    one = 1 if mode == "rational" else 1.0
    value = sum((abs(v) for v in y), _zero(mode)) - one
    negative = sum(sol.x[n:], _zero(mode))
    if mode == "float":
        value, negative = float(value), float(negative)
    return _finish(system, "cnt3", value, mode, objective=sol.value, witness=tuple(y),
                   details={"twice_negative_mass": 2 * negative, "solver_mode": sol.mode})


def cntf(system, mode=None):
    """Maximize ``1 . z`` subject to ``M(.) z <= p(.)*``, ``1 . z <= 1``;
    the measure is 1 minus that optimum."""
    mode = resolve_mode(system, mode)
    s = _cast(system, mode)
    Mc = build_complete_matrix(s.format)
    pc = complete_vector(s)
    n = Mc.shape[1]
    A_le = np.vstack([Mc.matrix, np.ones((1, n), dtype=np.uint8)])
    b_le = list(pc.full) + [1]
    problem = lp.LpProblem(np.ones(n, dtype=np.int64), A_le=A_le, b_le=b_le, sense="max")
    sol = _solve(problem, mode)
    value = 1 - sol.value
    if mode == "float":
        value = float(value)
    return _finish(system, "cntf", value, mode, objective=sol.value, witness=sol.x,
                   details={"solver_mode": sol.mode})


def _single_coordinate_push(problem_rows, p, n, i, sign, mode):
    """Largest ``d`` with ``M_b x = p_b* + sign * d * e_i`` still feasible."""
    Ml, Mb, Mc = problem_rows
    e = _zeros(Mb.shape[0], 1)
    e[i, 0] = -sign
    A_eq = np.vstack([
        np.hstack([Ml, _zeros(Ml.shape[0], 1)]),
        np.hstack([Mb, e]),
        np.hstack([Mc, _zeros(Mc.shape[0], 1)]),
    ])
    c = np.zeros(n + 1, dtype=np.int64)
    c[n] = 1
    sol = _solve(lp.LpProblem(c, A_eq=A_eq, b_eq=list(p), sense="max"), mode)
    if not sol.optimal:
        raise InfeasibleBunches(f"single-coordinate LP is {sol.status}")
    return sol.value if mode == "rational" else float(sol.value)


def ncnt2(system, mode=None):
    """Degree of noncontextuality: min over bunch coordinates i and directions
    of the largest move of coordinate i alone that keeps ``p_b`` compatible.

    Raises :class:`SystemIsContextual` for contextual systems and
    :class:`MeasureUndefined` for formats without bunch coordinates.
    """
    mode = resolve_mode(system, mode)
    if is_contextual(system, mode):
        raise SystemIsContextual("NCNT2 is defined for noncontextual systems only")
    M, p = _reduced_data(system, mode)
    Ml, Mb, Mc = _block(M, "l"), _block(M, "b"), _block(M, "c")
    K = Mb.shape[0]
    if K == 0:
        raise MeasureUndefined("no context measures two or more contents; "
                               "the bunch vector has no coordinates")
    cols = _live_columns(M, p)
    Ml, Mb, Mc = Ml[:, cols], Mb[:, cols], Mc[:, cols]
    n = len(cols)
    rhs = p.p_l + p.p_b + p.p_c
    d_plus, d_minus = [], []
    for i in range(K):
        d_plus.append(_single_coordinate_push((Ml, Mb, Mc), rhs, n, i, +1, mode))
        d_minus.append(_single_coordinate_push((Ml, Mb, Mc), rhs, n, i, -1, mode))
    per_coord = [min(a, b) for a, b in zip(d_plus, d_minus)]
    value = min(per_coord)
    arg = per_coord.index(value)
    tol = 0 if mode == "rational" else lp.REPORT_TOL
    empty_interior = all(v <= tol for v in d_plus + d_minus)
    return MeasureReport("ncnt2", value, False, mode, objective=value,
                         details={"d_plus": tuple(d_plus), "d_minus": tuple(d_minus),
                                  "coordinate": arg, "empty_interior": empty_interior,
                                  "rows": [M.rows[M.blocks["b"].start + i] for i in range(K)]})


def ncnt1_probe(system, mode=None):
    """Largest single-coordinate increase of ``p_c*`` that stays feasible.

    Connection 2-marginals of multimaximal couplings are already maximal, so
    this is 0 for every noncontextual system.
    """
    mode = resolve_mode(system, mode)
    if is_contextual(system, mode):
        raise SystemIsContextual("the probe is defined for noncontextual systems only")
    M, p = _reduced_data(system, mode)
    Ml, Mb, Mc = _block(M, "l"), _block(M, "b"), _block(M, "c")
    best = _zero(mode)
    rhs = p.p_l + p.p_b + p.p_c
    for i in range(Mc.shape[0]):
        cols = _live_columns(M, p, skip_c=(i,))
        n = len(cols)
        e = _zeros(Mc.shape[0], 1)
        e[i, 0] = -1
        A_eq = np.vstack([
            np.hstack([np.vstack([Ml, Mb])[:, cols], _zeros(Ml.shape[0] + Mb.shape[0], 1)]),
            np.hstack([Mc[:, cols], e]),
        ])
        c = np.zeros(n + 1, dtype=np.int64)
        c[n] = 1
        sol = _solve(lp.LpProblem(c, A_eq=A_eq, b_eq=list(rhs), sense="max"), mode)
        if not sol.optimal:
            raise InfeasibleBunches(f"probe LP is {sol.status}")
        v = sol.value if mode == "rational" else float(sol.value)
        best = max(best, v)
    return best


_DISPATCH = {"cnt1": cnt1, "cnt2": cnt2, "cnt3": cnt3, "cntf": cntf, "ncnt2": ncnt2}


def measure(system, name, mode=None):
    """Compute one measure by name."""
    try:
        fn = _DISPATCH[name]
    except KeyError:
        raise ValueError(f"unknown measure {name!r}; choose from {', '.join(MEASURES)}") from None
    return fn(system, mode)
