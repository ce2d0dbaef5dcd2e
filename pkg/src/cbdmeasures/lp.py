"""Dense revised primal simplex with Bland's rule.

Two arithmetic modes share one code path:

* ``"float"``: numpy float64 with feasibility/optimality tolerance 1e-9 and a
  final certification pass that re-checks every constraint.
* ``"rational"``: exact arithmetic over gmpy2 ``mpq``. When the constraint
  matrix is integral (the case for every incidence-matrix LP in this package),
  pricing is done fraction-free in int64, so only the m x m basis inverse
  carries rationals.

Problems are stated in the natural form

    optimize  c . x
    s.t.      A_eq x == b_eq
              A_le x <= b_le
              lower <= x <= upper

and converted internally to ``min c . x, A x = b, x >= 0`` with slack and
artificial columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np
from gmpy2 import mpq

from .errors import DimensionMismatch, NumericBreakdown

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
REPORT_TOL = 1e-7

MODES = ("float", "rational")

_INT64_SAFE = 2**62
_REFACTOR_EVERY = 50
_PIVOT_FLOOR = 1e-11


def _as_matrix(a, n, name):
    if a is None:
        return np.zeros((0, n), dtype=np.int64)
    a = np.asarray(a)
    if a.dtype == bool:
        a = a.astype(np.int64)
    if a.ndim == 1 and a.size == 0:
        a = a.reshape(0, n)
    if a.ndim != 2 or a.shape[1] != n:
        raise DimensionMismatch(f"{name} has shape {a.shape}, expected (*, {n})")
    return a


def _as_vector(v, length, name):
    if v is None:
        v = []
    v = np.asarray(v, dtype=object if _has_exact(v) else None)
    if v.ndim != 1 or v.shape[0] != length:
        raise DimensionMismatch(f"{name} has length {v.shape}, expected {length}")
    return v


def _has_exact(seq):
    if isinstance(seq, np.ndarray):
        return seq.dtype == object
    return any(isinstance(s, (Fraction, type(mpq()))) for s in seq)


def _check_finite(arr, name):
    if arr.dtype.kind == "f":
        ok = np.isfinite(arr).all()
    elif arr.dtype == object:
        ok = all(not (isinstance(v, float) and not math.isfinite(v)) for v in arr.flat)
    else:
        ok = True
    if not ok:
        raise ValueError(f"{name} contains non-finite entries")


@dataclass(frozen=True, eq=False)
class LpProblem:
    """A linear program in natural form.

    ``lower`` defaults to 0 for every variable; an entry of ``None`` makes the
    variable free below. ``upper`` defaults to no bound.
    """

    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_le: np.ndarray | None = None
    b_le: np.ndarray | None = None
    lower: tuple | None = None
    upper: tuple | None = None
    sense: str = "min"

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', not {self.sense!r}")
        c = _as_vector(self.c, len(self.c), "c")
        n = c.shape[0]
        A_eq = _as_matrix(self.A_eq, n, "A_eq")
        A_le = _as_matrix(self.A_le, n, "A_le")
        b_eq = _as_vector(self.b_eq, A_eq.shape[0], "b_eq")
        b_le = _as_vector(self.b_le, A_le.shape[0], "b_le")
        lower = tuple(self.lower) if self.lower is not None else (0,) * n
        upper = tuple(self.upper) if self.upper is not None else (None,) * n
        if len(lower) != n or len(upper) != n:
            raise DimensionMismatch("bounds must have one entry per variable")
        for name, arr in (("c", c), ("A_eq", A_eq), ("b_eq", b_eq),
                          ("A_le", A_le), ("b_le", b_le)):
            _check_finite(arr, name)
        for set_ in (("c", c), ("A_eq", A_eq), ("b_eq", b_eq), ("A_le", A_le),
                     ("b_le", b_le), ("lower", lower), ("upper", upper)):
            object.__setattr__(self, *set_)

    @property
    def n_vars(self):
        return self.c.shape[0]


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: object = None
    x: tuple = ()
    mode: str = "float"
    certified: bool = True
    pivots: int = 0
    basis: tuple = ()
    phase_one_value: object = None
    first_feasible_value: object = None
    details: dict = field(default_factory=dict)

    @property
    def optimal(self):
        return self.status == "optimal"


# ---------------------------------------------------------------------------
# arithmetic helpers


def _to_mpq(v):
    if isinstance(v, type(mpq())):
        return v
    if isinstance(v, Rational):
        return mpq(int(v.numerator), int(v.denominator))
    if isinstance(v, (float, np.floating)):
        return mpq(float(v))
    if isinstance(v, (int, np.integer)):
        return mpq(int(v))
    raise TypeError(f"cannot convert {v!r} to a rational")


def _to_fraction(v):
    return Fraction(int(v.numerator), int(v.denominator))


def _is_integral_matrix(a):
    if a.dtype.kind in "iub":
        return True
    if a.dtype.kind == "f":
        return bool(np.all(np.mod(a, 1) == 0)) and (a.size == 0 or np.abs(a).max() < 2**52)
    return all(_to_mpq(v).denominator == 1 for v in a.flat)


class _Field:
    """Arithmetic for one solver mode."""

    def __init__(self, mode):
        self.mode = mode
        self.exact = mode == "rational"
        self.eps = 0 if self.exact else FEAS_TOL

    def vector(self, values):
        if self.exact:
            return np.array([_to_mpq(v) for v in values], dtype=object)
        return np.array([float(v) for v in values], dtype=np.float64)

    def zeros(self, n):
        if self.exact:
            out = np.empty(n, dtype=object)
            out[:] = [mpq(0)] * n
            return out
        return np.zeros(n)

    def identity(self, m):
        if self.exact:
            out = np.empty((m, m), dtype=object)
            out[:] = mpq(0)
            for i in range(m):
                out[i, i] = mpq(1)
            return out
        return np.eye(m)

    def export(self, v):
        return _to_fraction(v) if self.exact else float(v)


# ---------------------------------------------------------------------------
# standard form


@dataclass
class _Standard:
    A: np.ndarray          # m x n_total (int64 / float64 / object mpq)
    b: np.ndarray          # field vector, >= 0
    c: np.ndarray          # field vector over all columns (phase two costs)
    n_struct: int
    n_slack: int
    n_art: int
    basis: list
    columns: list          # per structural column: (original var, sign)
    integral: bool


def _standardize(problem, fld):
    n = problem.n_vars
    lower = problem.lower
    upper = problem.upper

    # structural columns: x_j = lower_j + x'_j, or x_j = x+ - x- when free below
    columns = []
    for j in range(n):
        if lower[j] is None:
            columns.append((j, 1))
            columns.append((j, -1))
        else:
            columns.append((j, 1))
    col_src = np.array([j for j, _ in columns], dtype=np.int64)
    col_sign = np.array([s for _, s in columns], dtype=np.int64)

    def expand(A):
        if A.shape[0] == 0:
            return np.zeros((0, len(columns)), dtype=A.dtype if A.dtype != bool else np.int64)
        out = A[:, col_src]
        if (col_sign < 0).any():
            out = out * col_sign if out.dtype != object else out * col_sign.astype(object)
        return out

    A_eq = expand(problem.A_eq)
    A_le = expand(problem.A_le)
    b_eq = fld.vector(problem.b_eq)
    b_le = fld.vector(problem.b_le)

    shift = [lower[j] if lower[j] is not None else 0 for j in range(n)]
    if any(s != 0 for s in shift):
        sv = fld.vector(shift)
        b_eq = b_eq - _matvec(problem.A_eq, sv, fld)
        b_le = b_le - _matvec(problem.A_le, sv, fld)

    # upper bounds become extra <= rows over the structural columns
    ub_rows = []
    ub_rhs = []
    for j in range(n):
        if upper[j] is None:
            continue
        row = np.zeros(len(columns), dtype=np.int64)
        for k, (src, sign) in enumerate(columns):
            if src == j:
                row[k] = sign
        ub_rows.append(row)
        ub_rhs.append(_to_mpq(upper[j]) - _to_mpq(shift[j]) if fld.exact
                      else float(upper[j]) - float(shift[j]))
    if ub_rows:
        A_le = _vstack([A_le, np.array(ub_rows)])
        b_le = np.concatenate([b_le, fld.vector(ub_rhs)])

    m_eq, m_le = A_eq.shape[0], A_le.shape[0]
    m = m_eq + m_le
    n_struct = len(columns)

    A_struct = _vstack([A_eq, A_le]) if m else np.zeros((0, n_struct), dtype=np.int64)
    b = np.concatenate([b_eq, b_le]) if m else fld.zeros(0)
    integral = _is_integral_matrix(A_struct)
    if fld.exact:
        if integral:
            A_struct = np.array(A_struct.tolist(), dtype=object).astype(np.int64) \
                if A_struct.dtype == object else A_struct.astype(np.int64)
        else:
            A_struct = np.vectorize(_to_mpq, otypes=[object])(A_struct) if A_struct.size \
                else A_struct.astype(object)
    else:
        A_struct = np.array(A_struct, dtype=np.float64) if A_struct.dtype != object \
            else np.array([[float(v) for v in row] for row in A_struct]).reshape(A_struct.shape)

    slack = np.zeros((m, m_le), dtype=A_struct.dtype)
    for k in range(m_le):
        slack[m_eq + k, k] = 1

    negative = [i for i in range(m) if b[i] < 0]
    if negative:
        A_struct = A_struct.copy()
        for i in negative:
            A_struct[i] = -A_struct[i]
            slack[i] = -slack[i]
            b[i] = -b[i]

    basis = [None] * m
    for k in range(m_le):
        i = m_eq + k
        if slack[i, k] == 1:
            basis[i] = n_struct + k
    art_rows = [i for i in range(m) if basis[i] is None]
    art = np.zeros((m, len(art_rows)), dtype=A_struct.dtype)
    for k, i in enumerate(art_rows):
        art[i, k] = 1
        basis[i] = n_struct + m_le + k

    A = np.hstack([A_struct, slack, art]) if m else np.zeros((0, n_struct), dtype=A_struct.dtype)
    if fld.exact and not integral:
        A = A.astype(object)
        A[:] = np.vectorize(_to_mpq, otypes=[object])(A) if A.size else A

    c_struct = [problem.c[j] * s for j, s in columns]
    if problem.sense == "max":
        c_struct = [-v for v in c_struct]
    c_full = np.concatenate([fld.vector(c_struct), fld.zeros(m_le + len(art_rows))])
    return _Standard(A, b, c_full, n_struct, m_le, len(art_rows), basis, columns, integral)


def _vstack(blocks):
    blocks = [b for b in blocks if b.shape[0]]
    if not blocks:
        return np.zeros((0, 0), dtype=np.int64)
    if any(b.dtype == object for b in blocks):
        blocks = [b.astype(object) for b in blocks]
    return np.vstack(blocks)


def _matvec(A, v, fld):
    if A.shape[0] == 0:
        return fld.zeros(0)
    if fld.exact:
        return np.array([sum((_to_mpq(a) * x for a, x in zip(row, v) if a != 0), mpq(0))
                         for row in A], dtype=object)
    return np.asarray(A, dtype=np.float64) @ v


# ---------------------------------------------------------------------------
# the simplex engine


class _Engine:
    def __init__(self, std, fld, trace=None):
        self.std = std
        self.fld = fld
        self.A = std.A
        self.m = len(std.b)
        self.n = std.A.shape[1]
        self.b = std.b
        self.basis = list(std.basis)
        self.Binv = fld.identity(self.m)
        self.xB = std.b.copy()
        self.pivots = 0
        self.since_refactor = 0
        self.trace = trace
        self.in_basis = np.zeros(self.n, dtype=bool)
        self.in_basis[self.basis] = True
        self._A_obj = None
        self._colmax = 1
        if self.std.integral and self.n and self.m:
            self._colmax = max(int(np.abs(self.A).sum(axis=0).max()), 1)

    # v . A_j for all columns j, returned as (values, scale) with v.A_j = values_j / scale
    def _dot_columns(self, v):
        if not self.fld.exact:
            return self.A.T @ v, 1
        if not self.std.integral:
            return self.A.T.dot(v), 1
        den = 1
        for x in v:
            d = int(x.denominator)
            if d != 1:
                den = den * d // math.gcd(den, d)
        ints = [int(x * den) for x in v]
        bound = max((abs(i) for i in ints), default=0)
        if bound * self._colmax < _INT64_SAFE:
            return self.A.T @ np.array(ints, dtype=np.int64), den
        if self._A_obj is None:
            self._A_obj = self.A.astype(object)
        return self._A_obj.T.dot(np.array(ints, dtype=object)), den

    def _column(self, j):
        col = self.A[:, j]
        nz = np.nonzero(col)[0]
        if self.fld.exact:
            if len(nz) == 0:
                return self.fld.zeros(self.m)
            vals = np.array([int(v) if self.std.integral else v for v in col[nz]], dtype=object)
            return self.Binv[:, nz].dot(vals)
        return self.Binv[:, nz] @ col[nz]

    def _prepare_cost(self, cost):
        """Scaled integer costs for fraction-free pricing: cost = cint / cden."""
        self._cost = cost
        if self.fld.exact and self.std.integral:
            den = 1
            for v in cost:
                d = int(v.denominator)
                if d != 1:
                    den = den * d // math.gcd(den, d)
            cint = [int(v * den) for v in cost]
            self._cden = den
            self._cmax = max((abs(v) for v in cint), default=0)
            self._cint = (np.array(cint, dtype=np.int64) if self._cmax < _INT64_SAFE
                          else np.array(cint, dtype=object))

    def _entering(self, allowed):
        """Bland: the lowest-index nonbasic column with negative reduced cost."""
        cost = self._cost
        if self.m:
            pi = cost[self.basis].dot(self.Binv) if self.fld.exact else cost[self.basis] @ self.Binv
        else:
            pi = self.fld.zeros(0)
        t, scale = self._dot_columns(pi)
        if self.fld.exact:
            if self.std.integral:
                # reduced_j < 0  <=>  cint_j * scale < t_j * cden
                cden = self._cden
                tmax = int(np.abs(t).max()) if len(t) and t.dtype != object else None
                if (self._cint.dtype != object and self._cmax * scale < _INT64_SAFE
                        and tmax is not None and tmax * cden < _INT64_SAFE):
                    neg = self._cint * scale < t * cden
                else:
                    lhs = self._cint.astype(object) * scale
                    rhs = np.asarray(t, dtype=object) * cden
                    neg = np.array([a < b_ for a, b_ in zip(lhs, rhs)], dtype=bool)
            else:
                neg = np.array([c - x < 0 for c, x in zip(cost, t)], dtype=bool)
        else:
            neg = (cost - t) < -OPT_TOL
        cand = np.nonzero(neg & allowed & ~self.in_basis)[0]
        return int(cand[0]) if len(cand) else None

    def _leaving(self, alpha):
        eps = self.fld.eps
        best = None
        best_ratio = None
        for i in range(self.m):
            a = alpha[i]
            if a > eps:
                r = self.xB[i] / a
                if best is None:
                    best, best_ratio = i, r
                    continue
                if self.fld.exact:
                    better = r < best_ratio or (r == best_ratio and self.basis[i] < self.basis[best])
                else:
                    better = r < best_ratio - 1e-12 or (
                        abs(r - best_ratio) <= 1e-12 and self.basis[i] < self.basis[best])
                if better:
                    best, best_ratio = i, r
        return best

    def pivot(self, r, q, alpha):
        piv = alpha[r]
        if not self.fld.exact and abs(piv) < _PIVOT_FLOOR:
            raise NumericBreakdown(f"pivot element {piv:.3e} below floor")
        if self.fld.exact:
            row = self.Binv[r] / piv
            xr = self.xB[r] / piv
            for i in range(self.m):
                a = alpha[i]
                if i != r and a != 0:
                    self.Binv[i] = self.Binv[i] - row * a
                    self.xB[i] = self.xB[i] - xr * a
            self.Binv[r] = row
            self.xB[r] = xr
        else:
            row = self.Binv[r] / piv
            xr = self.xB[r] / piv
            self.Binv -= np.outer(alpha, row)
            self.xB -= alpha * xr
            self.Binv[r] = row
            self.xB[r] = xr
        leaving = self.basis[r]
        self.in_basis[leaving] = False
        self.in_basis[q] = True
        self.basis[r] = q
        self.pivots += 1
        self.since_refactor += 1
        if not self.fld.exact and self.since_refactor >= _REFACTOR_EVERY:
            self.refactor()
        if self.trace is not None:
            self.trace.write(f"pivot {self.pivots}: enter {q} leave {leaving} row {r}\n")
            self.dump()

    def refactor(self):
        B = np.asarray(self.A[:, self.basis], dtype=np.float64)
        try:
            Binv = np.linalg.inv(B)
        except np.linalg.LinAlgError as exc:
            raise NumericBreakdown("singular basis on refactorization") from exc
        if not np.all(np.isfinite(Binv)) or np.abs(Binv).max() > 1e10:
            raise NumericBreakdown("ill-conditioned basis on refactorization")
        self.Binv = Binv
        self.xB = Binv @ self.b
        self.xB[np.abs(self.xB) < 1e-14] = 0.0
        self.since_refactor = 0

    def dump(self):
        out = self.trace
        out.write("  basis " + " ".join(str(j) for j in self.basis) + "\n")
        out.write("  xB    " + " ".join(str(self.fld.export(v)) for v in self.xB) + "\n")
        for i in range(self.m):
            out.write("  Binv  " + " ".join(str(self.fld.export(v)) for v in self.Binv[i]) + "\n")

    def run(self, cost, allowed, phase):
        """Iterate to optimality. Returns 'optimal' or 'unbounded'."""
        if self.trace is not None:
            self.trace.write(f"phase {phase}\n")
        self._prepare_cost(cost)
        while True:
            q = self._entering(allowed)
            if q is None:
                return "optimal"
            alpha = self._column(q)
            r = self._leaving(alpha)
            if r is None:
                return "unbounded"
            self.pivot(r, q, alpha)

    def objective(self, cost):
        if self.m == 0:
            return self.fld.zeros(1)[0]
        vals = cost[self.basis]
        if self.fld.exact:
            return sum((v * x for v, x in zip(vals, self.xB)), mpq(0))
        return float(vals @ self.xB)

    def drive_out_artificials(self, first_art):
        for r in range(self.m):
            if self.basis[r] < first_art:
                continue
            t, _ = self._dot_columns(self.Binv[r])
            nz = np.asarray([v != 0 for v in t], dtype=bool) if self.fld.exact \
                else np.abs(t) > FEAS_TOL
            nz[first_art:] = False
            nz &= ~self.in_basis
            cand = np.nonzero(nz)[0]
            if len(cand):
                q = int(cand[0])
                self.pivot(r, q, self._column(q))
            # otherwise the row is redundant; the artificial stays basic at zero


# ---------------------------------------------------------------------------
# public entry points


def _phase_one(problem, mode, trace):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, not {mode!r}")
    fld = _Field(mode)
    std = _standardize(problem, fld)
    eng = _Engine(std, fld, trace)
    first_art = std.n_struct + std.n_slack
    infeas = fld.zeros(1)[0]
    if std.n_art:
        cost1 = fld.zeros(eng.n)
        cost1[first_art:] = mpq(1) if fld.exact else 1.0
        allowed = np.ones(eng.n, dtype=bool)
        eng.run(cost1, allowed, phase=1)
        infeas = eng.objective(cost1)
    return fld, std, eng, first_art, infeas


def feasible(problem, mode="float"):
    """True iff the constraint set of ``problem`` is nonempty (phase one only)."""
    fld, _, _, _, infeas = _phase_one(problem, mode, None)
    return infeas <= fld.eps


def solve(problem, mode="float", trace=None):
    """Solve ``problem`` and return an :class:`LpSolution`.

    The witness is a basic feasible solution. Pivoting follows Bland's rule
    throughout, so repeated calls give identical witnesses and pivot counts.
    ``trace``, if given, is a text stream that receives a dump of the basis,
    basic values, and basis inverse after every pivot.
    """
    fld, std, eng, first_art, infeas = _phase_one(problem, mode, trace)
    if infeas > fld.eps:
        return LpSolution("infeasible", mode=mode, pivots=eng.pivots,
                          phase_one_value=fld.export(infeas))
    if std.n_art:
        eng.drive_out_artificials(first_art)
    allowed = np.ones(eng.n, dtype=bool)
    allowed[first_art:] = False
    sign = -1 if problem.sense == "max" else 1
    first_value = sign * eng.objective(std.c) + _lower_constant(problem, fld)
    status = eng.run(std.c, allowed, phase=2)
    if status == "unbounded":
        return LpSolution("unbounded", mode=mode, pivots=eng.pivots,
                          phase_one_value=fld.export(infeas),
                          first_feasible_value=fld.export(first_value))
    if not fld.exact and eng.m:
        eng.refactor()
        eng.xB[(eng.xB < 0) & (eng.xB > -FEAS_TOL)] = 0.0

    xstd = fld.zeros(eng.n)
    for i, j in enumerate(eng.basis):
        xstd[j] = eng.xB[i]
    x = []
    lower = problem.lower
    values = {}
    for k, (j, s) in enumerate(std.columns):
        values[j] = values.get(j, 0) + s * xstd[k]
    for j in range(problem.n_vars):
        base = values.get(j, 0)
        if lower[j] is not None and lower[j] != 0:
            base = base + (_to_mpq(lower[j]) if fld.exact else float(lower[j]))
        x.append(fld.export(base) if fld.exact else float(base))
    if fld.exact:
        value = sum((Fraction(v) * xj for v, xj in zip(_fractions(problem.c), x)
                     if v != 0), Fraction(0))
    else:
        value = float(np.dot(np.asarray(problem.c, dtype=np.float64), np.array(x)))
    certified = True if fld.exact else _certify(problem, np.array(x))
    return LpSolution("optimal", value=value, x=tuple(x), mode=mode, certified=certified,
                      pivots=eng.pivots, basis=tuple(eng.basis),
                      phase_one_value=fld.export(infeas),
                      first_feasible_value=fld.export(first_value))


def _lower_constant(problem, fld):
    total = fld.zeros(1)[0]
    for cj, lo in zip(problem.c, problem.lower):
        if lo is not None and lo != 0 and cj != 0:
            total = total + (_to_mpq(cj) * _to_mpq(lo) if fld.exact else float(cj) * float(lo))
    return total


def _fractions(values):
    return [Fraction(v) if not isinstance(v, type(mpq())) else _to_fraction(v) for v in values]


def _certify(problem, x):
    tol = FEAS_TOL
    if problem.A_eq.shape[0]:
        r = np.asarray(problem.A_eq, dtype=np.float64) @ x - np.asarray(problem.b_eq, dtype=np.float64)
        if np.abs(r).max() > tol:
            return False
    if problem.A_le.shape[0]:
        r = np.asarray(problem.A_le, dtype=np.float64) @ x - np.asarray(problem.b_le, dtype=np.float64)
        if r.max() > tol:
            return False
    for j, (lo, hi) in enumerate(zip(problem.lower, problem.upper)):
        if lo is not None and x[j] < float(lo) - tol:
            return False
        if hi is not None and x[j] > float(hi) + tol:
            return False
    return True
