"""Independent cross-checks for the LP pipeline.

``column_elimination_noncontextuality`` decides noncontextuality on the
complete representation without touching this package's simplex: columns of
``M(.)`` hitting a zero of ``p(.)*`` are discarded, and the remaining system
``A x = b, x >= 0`` is settled by an exactly verified certificate, either a
nonnegative solution on some support or a Farkas vector ``y`` with
``A^T y >= 0`` and ``b . y < 0``. Candidate certificates are proposed by
HiGHS (through scipy) and then checked in rational arithmetic; if no proposal
verifies, supports are enumerated exhaustively up to a combination budget.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from . import measures as ms
from .coupling import build_complete_matrix, check_size, complete_vector
from .cyclic import CyclicSpec, cyclic_format, make_cyclic, random_cyclic_spec
from .errors import MeasureUndefined, OracleTooSlow, SystemTooLarge
from .system import System, SystemFormat, pattern_bits

DENOMINATOR_CAP = 64
SUPPORT_BUDGET = 10**7
CROSSCHECK_TOL = 1e-7


@dataclass(frozen=True)
class CheckReport:
    check: str
    systems: int
    max_discrepancy: float
    passed: bool
    details: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# random systems


def _composition(rng, parts, total=DENOMINATOR_CAP):
    cuts = np.sort(rng.integers(0, total + 1, parts - 1))
    return np.diff(np.concatenate([[0], cuts, [total]])).astype(int)


def random_system(fmt, seed, mode="rational"):
    """Reproducible random bunch pmfs with denominators dividing 64."""
    rng = np.random.default_rng(seed)
    bunches = []
    for measured in fmt.incidence:
        w = _composition(rng, 2 ** len(measured))
        bunches.append(tuple(Fraction(int(v), DENOMINATOR_CAP) for v in w))
    system = System(fmt, tuple(bunches), exact=True)
    return system if mode == "rational" else system.to_float()


def latent_threshold_coupling(fmt, seed, levels=3):
    """A global coupling whose connection restrictions are multimaximal.

    Each content gets a latent variable on ``levels`` ordered values; the
    latents share a random joint pmf (denominator 64), and each variable is
    the indicator that its content's latent falls below a per-variable
    threshold. Variables of one connection are thresholds of a common latent,
    which is exactly the multimaximal coupling. Thresholds differ across
    contexts, so the induced system is generally inconsistently connected.

    Returns ``{column: mass}`` over the columns of the incidence matrices.
    """
    rng = np.random.default_rng(seed)
    nq = len(fmt.contents)
    qpos = {q: k for k, q in enumerate(fmt.contents)}
    weights = _composition(rng, levels ** nq)
    thresholds = [int(rng.integers(0, levels + 1)) for _ in fmt.variables]
    owners = [qpos[q] for _, q in fmt.variables]
    coupling = {}
    for atom, w in enumerate(weights):
        if not w:
            continue
        latent = [(atom // levels ** k) % levels for k in range(nq)]
        col = sum(1 << i for i, (k, t) in enumerate(zip(owners, thresholds)) if latent[k] < t)
        coupling[col] = coupling.get(col, Fraction(0)) + Fraction(int(w), DENOMINATOR_CAP)
    return coupling


def system_from_coupling(fmt, coupling):
    """Bunch marginals of a ``{column: mass}`` coupling."""
    vi = fmt.var_index
    bunches = []
    for c, measured in zip(fmt.contexts, fmt.incidence):
        n = len(measured)
        ids = [vi[(c, q)] for q in measured]
        pmf = [Fraction(0)] * (2 ** n)
        for col, mass in coupling.items():
            t = 0
            for k, i in enumerate(ids):
                t |= ((col >> i) & 1) << (n - 1 - k)
            pmf[t] += mass
        bunches.append(tuple(pmf))
    return System(fmt, tuple(bunches), exact=True)


def random_noncontextual_system(fmt, seed, levels=3):
    """A system that is noncontextual by construction."""
    return system_from_coupling(fmt, latent_threshold_coupling(fmt, seed, levels))


# ---------------------------------------------------------------------------
# exact linear algebra on small dense systems


def _solve_exact(A, b):
    """One exact solution of ``A x = b`` (free variables 0), or None.

    Returns ``(x, pivot_columns)``.
    """
    m, n = len(A), len(A[0]) if A else 0
    rows = [[Fraction(v) for v in A[i]] + [Fraction(b[i])] for i in range(m)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, m) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * bb for a, bb in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if rows[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        x[col] = rows[i][n]
    return x, pivots


def _check_primal(A, b, support, x):
    if any(v < 0 for v in x):
        return False
    for i in range(A.shape[0]):
        if sum((x[k] for k, j in enumerate(support) if A[i, j]), Fraction(0)) != b[i]:
            return False
    return True


def _try_support(A, b, support):
    sub = A[:, support].tolist()
    sol = _solve_exact(sub, b)
    if sol is None:
        return None
    x, pivots = sol
    if _check_primal(A, b, support, x):
        return dict(zip(support, x))
    # retry on the independent pivot columns alone
    if len(pivots) < len(support):
        sup2 = [support[k] for k in pivots]
        sol = _solve_exact(A[:, sup2].tolist(), b)
        if sol is not None and _check_primal(A, b, sup2, sol[0]):
            return dict(zip(sup2, sol[0]))
    return None


def _check_farkas(A, b, y):
    den = 1
    for v in y:
        den = den * v.denominator // math.gcd(den, v.denominator)
    yi = [int(v * den) for v in y]
    big = max((abs(v) for v in yi), default=0) * A.shape[0] >= 2**62
    vec = np.array(yi, dtype=object if big else np.int64)
    Aty = (A.T.astype(object) if big else A.T.astype(np.int64)) @ vec
    if any(v < 0 for v in Aty):
        return False
    return sum((bi * yv for bi, yv in zip(b, y)), Fraction(0)) < 0


def _farkas_candidates(A, b):
    m, n = A.shape
    bf = np.array([float(v) for v in b])
    res = linprog(np.zeros(m), A_ub=-A.T.astype(float), b_ub=np.zeros(n),
                  A_eq=bf[None, :], b_eq=[-1.0], bounds=[(-1e4, 1e4)] * m, method="highs")
    if res.status != 0:
        return
    y = res.x
    for cap in (1, 8, 64, 1000, 10**4, 10**6):
        yield [Fraction(float(v)).limit_denominator(cap) for v in y]
    # exact solve on the tight constraints
    tight = [j for j in range(n) if abs(A[:, j] @ y) <= 1e-9]
    rows = [A[:, j].tolist() for j in tight] + [list(b)]
    rhs = [0] * len(tight) + [-1]
    sol = _solve_exact(rows, rhs)
    if sol is not None:
        yield sol[0]


def _exhaustive(A, b, budget):
    m, n = A.shape
    top = min(m, n)
    total = sum(math.comb(n, k) for k in range(1, top + 1))
    if total > budget:
        raise OracleTooSlow(f"{total} supports exceed the budget of {budget}")
    for k in range(1, top + 1):
        for support in itertools.combinations(range(n), k):
            if _try_support(A, b, list(support)) is not None:
                return True
    return False


def column_elimination_noncontextuality(system, budget=SUPPORT_BUDGET, max_vars=12):
    """Decide noncontextuality (True = noncontextual) on ``M(.) x = p(.)*``."""
    s = system.to_exact()
    fmt = s.format
    if fmt.n_vars > max_vars:
        raise SystemTooLarge(f"the elimination oracle handles at most {max_vars} variables")
    check_size(fmt)
    M = build_complete_matrix(fmt).matrix
    p = complete_vector(s).full
    zero_rows = [i for i, v in enumerate(p) if v == 0]
    keep = ~np.any(M[zero_rows], axis=0) if zero_rows else np.ones(M.shape[1], dtype=bool)
    cols = np.nonzero(keep)[0]
    if len(cols) == 0:
        return False
    rows = [i for i, v in enumerate(p) if v != 0]
    A = M[np.ix_(rows, cols)].astype(np.int64)
    b = [p[i] for i in rows]
    if A.shape[0] == 0:
        return True

    res = linprog(np.zeros(A.shape[1]), A_eq=A.astype(float), b_eq=[float(v) for v in b],
                  bounds=(0, None), method="highs")
    if res.status == 0:
        support = [int(j) for j in np.nonzero(res.x > 1e-9)[0]]
        if support and _try_support(A, b, support) is not None:
            return True
    elif res.status == 2:
        for y in _farkas_candidates(A, b):
            if len(y) == A.shape[0] and _check_farkas(A, b, y):
                return False
    return _exhaustive(A, b, budget)


# ---------------------------------------------------------------------------
# float vs rational


def _measure_pair(system, name):
    try:
        exact = ms.measure(system, name, "rational")
        approx = ms.measure(system, name, "float")
    except MeasureUndefined:
        return None
    return exact, approx


def crosscheck_modes(system, names=("cnt1", "cnt2", "cnt3", "cntf", "ncnt2")):
    """Every measure in both modes; passes iff all agree within 1e-7."""
    if system.format.n_vars > 16:
        raise SystemTooLarge("mode cross-checks are limited to 16 variables")
    exact_sys = system.to_exact()
    contextual = ms.is_contextual(exact_sys, "rational")
    worst = 0.0
    details = {}
    flags_ok = True
    for name in names:
        if name == "ncnt2" and contextual:
            continue
        pair = _measure_pair(exact_sys, name)
        if pair is None:
            continue
        exact, approx = pair
        diff = abs(float(exact.value) - float(approx.value))
        worst = max(worst, diff)
        flags_ok &= exact.contextual == approx.contextual
        details[name] = (exact.value, approx.value)
    return CheckReport("crosscheck_modes", 1, worst, worst <= CROSSCHECK_TOL and flags_ok, details)


# ---------------------------------------------------------------------------
# named systems and suites


FIG1_FORMAT = SystemFormat(
    ("q1", "q2", "q3", "q4"),
    ("c1", "c2", "c3", "c4", "c5"),
    (("q1", "q2"), ("q2", "q3", "q4"), ("q1", "q3"), ("q1", "q4"), ("q1", "q2", "q3")),
)


def single_context_format(n):
    contents = tuple(f"q{i}" for i in range(1, n + 1))
    return SystemFormat(contents, ("c1",), (contents,))


def deterministic_system(fmt=None, value=1):
    """Every variable equals ``value`` with probability 1."""
    fmt = fmt or cyclic_format(4)
    bunches = []
    for measured in fmt.incidence:
        n = len(measured)
        pmf = [Fraction(0)] * (2 ** n)
        pmf[(2 ** n - 1) if value else 0] = Fraction(1)
        bunches.append(tuple(pmf))
    return System(fmt, tuple(bunches), exact=True)


def named_systems():
    """Small reference systems, keyed by name."""
    half = Fraction(1, 2)
    quarter = Fraction(1, 4)
    c2 = cyclic_format(2)
    return {
        "prbox": make_cyclic(CyclicSpec(4, (1, 1, 1, -1), (0,))),
        "deterministic": deterministic_system(),
        "cyclic2": make_cyclic(CyclicSpec(2, (1, -1), (0,))),
        "coins": System(single_context_format(2), ((quarter,) * 4,), exact=True),
        "cyclic2-identical": System(c2, ((Fraction(3, 8), Fraction(1, 8), Fraction(1, 8),
                                          Fraction(3, 8)),) * 2, exact=True),
        "cyclic2-independent": System(c2, ((quarter,) * 4,) * 2, exact=True),
        "cyclic2-inconsistent": make_cyclic(CyclicSpec(2, (half, half),
                                                       ((Fraction(-2, 5), Fraction(2, 5)),
                                                        (Fraction(2, 5), Fraction(-2, 5))))),
    }


def named_formats():
    out = {"fig1": FIG1_FORMAT}
    for n in range(2, 8):
        out[f"cyclic-{n}"] = cyclic_format(n)
    for n in range(1, 5):
        out[f"single-{n}"] = single_context_format(n)
    return out


def build_suite(name="small"):
    """Seeded list of ``(label, system)`` pairs.

    ``"small"`` is a quick smoke suite; ``"acceptance"`` has 500+ systems over
    single-context (n_c <= 3), cyclic 2..5 and the 4-content/5-context format.
    """
    if name == "small":
        plan = {"single": 3, "cyclic_random": 3, "cyclic_spec": 4, "cyclic_nc": 2,
                "fig1_random": 0, "fig1_nc": 0}
    elif name == "acceptance":
        plan = {"single": 25, "cyclic_random": 40, "cyclic_spec": 50, "cyclic_nc": 10,
                "fig1_random": 16, "fig1_nc": 8}
    else:
        raise ValueError(f"unknown suite {name!r}; choose 'small' or 'acceptance'")
    suite = list(named_systems().items())
    for n in (1, 2, 3):
        fmt = single_context_format(n)
        for s in range(plan["single"]):
            suite.append((f"single-{n}/random/{s}", random_system(fmt, 1000 * n + s)))
    for n in (2, 3, 4, 5):
        fmt = cyclic_format(n)
        for s in range(plan["cyclic_random"]):
            suite.append((f"cyclic-{n}/random/{s}", random_system(fmt, 2000 + 100 * n + s)))
        for s in range(plan["cyclic_spec"]):
            spec = random_cyclic_spec(n, 3000 + 100 * n + s)
            suite.append((f"cyclic-{n}/spec/{s}", make_cyclic(spec)))
        for s in range(plan["cyclic_nc"]):
            suite.append((f"cyclic-{n}/noncontextual/{s}",
                          random_noncontextual_system(fmt, 4000 + 100 * n + s)))
    for s in range(plan["fig1_random"]):
        suite.append((f"fig1/random/{s}", random_system(FIG1_FORMAT, 5000 + s)))
    for s in range(plan["fig1_nc"]):
        suite.append((f"fig1/noncontextual/{s}", random_noncontextual_system(FIG1_FORMAT, 6000 + s)))
    return suite


def verify_suite(name="small", log=None):
    """Run the oracle checks over a suite; returns a list of CheckReports."""
    suite = build_suite(name)
    reports = []
    elim_bad, zero_bad, probe_bad = [], [], []
    worst = 0.0
    cross_bad = []
    for label, system in suite:
        contextual = ms.is_contextual(system, "rational")
        if system.format.n_vars <= 12:
            try:
                if column_elimination_noncontextuality(system) == contextual:
                    elim_bad.append(label)
            except OracleTooSlow:
                elim_bad.append(label + " (oracle budget)")
        zeros = {name_: ms.measure(system, name_, "rational").value == 0
                 for name_ in ("cnt1", "cnt2", "cnt3", "cntf")}
        if any(z == contextual for z in zeros.values()):
            zero_bad.append(label)
        if not contextual and ms.ncnt1_probe(system, "rational") != 0:
            probe_bad.append(label)
        rep = crosscheck_modes(system)
        worst = max(worst, rep.max_discrepancy)
        if not rep.passed:
            cross_bad.append(label)
        if log is not None:
            log(f"{label}: {'contextual' if contextual else 'noncontextual'}")
    n = len(suite)
    reports.append(CheckReport("elimination_agrees", n, 0.0, not elim_bad, {"failures": elim_bad}))
    reports.append(CheckReport("zero_sets_agree", n, 0.0, not zero_bad, {"failures": zero_bad}))
    reports.append(CheckReport("ncnt1_degenerate", n, 0.0, not probe_bad, {"failures": probe_bad}))
    reports.append(CheckReport("crosscheck_modes", n, worst, not cross_bad, {"failures": cross_bad}))
    return reports
