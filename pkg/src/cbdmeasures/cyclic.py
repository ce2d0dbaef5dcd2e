"""Cyclic systems of rank n in the +-1 expectation parametrization.

Context ``c_i`` measures contents ``q_i`` and ``q_{i+1}`` (indices mod n). A
spec gives, per context, the product expectation ``<R_i^i R_{i+1}^i>`` and, per
content ``i``, the pair ``(<R_i^i>, <R_i^{i-1}>)``: the content's expectation in
the context where it comes first and in the one where it comes second.
Value +1 maps to 1 and -1 maps to 0 when converting to the 0/1 encoding.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidExpectations
from .system import SystemFormat, System, bunch_marginal, to_number


def cyclic_format(n):
    contents = tuple(f"q{i}" for i in range(1, n + 1))
    contexts = tuple(f"c{i}" for i in range(1, n + 1))
    incidence = tuple((contents[i], contents[(i + 1) % n]) for i in range(n))
    return SystemFormat(contents, contexts, incidence)


@dataclass(frozen=True)
class CyclicSpec:
    n: int
    correlations: tuple  # <R_i^i R_{i+1}^i>, i = 1..n
    marginals: tuple     # per content i: (<R_i^i>, <R_i^{i-1}>)

    def __post_init__(self):
        n = self.n
        if n < 2:
            raise InvalidExpectations("cyclic rank must be at least 2")
        corr = tuple(to_number(v) for v in self.correlations)
        marg = _pairs(self.marginals, n)
        if len(corr) != n:
            raise InvalidExpectations(f"expected {n} correlations, got {len(corr)}")
        object.__setattr__(self, "correlations", corr)
        object.__setattr__(self, "marginals", marg)
        for v in corr + tuple(x for pair in marg for x in pair):
            if not -1 <= v <= 1:
                raise InvalidExpectations(f"expectation {v} outside [-1, 1]")
        for i in range(n):
            a, b, ab = self.context_expectations(i)
            for (sa, sb), p in _pm1_pmf(a, b, ab).items():
                if p < 0:
                    raise InvalidExpectations(
                        f"context c{i + 1}: Pr[A={sa:+d}, B={sb:+d}] = {p} < 0")

    def context_expectations(self, i):
        """``(<A>, <B>, <AB>)`` for context ``c_{i+1}`` (0-based ``i``)."""
        n = self.n
        first = self.marginals[i][0]             # content i in its own context
        second = self.marginals[(i + 1) % n][1]  # content i+1, in the context before it
        return first, second, self.correlations[i]


def _pairs(marginals, n):
    flat = list(marginals)
    if len(flat) == 1 and not isinstance(flat[0], (list, tuple)):
        flat = flat * (2 * n)
    if flat and not isinstance(flat[0], (list, tuple)):
        if len(flat) != 2 * n:
            raise InvalidExpectations(f"expected {2 * n} marginals, got {len(flat)}")
        flat = [flat[2 * i: 2 * i + 2] for i in range(n)]
    if len(flat) != n or any(len(p) != 2 for p in flat):
        raise InvalidExpectations(f"expected {n} marginal pairs")
    return tuple((to_number(a), to_number(b)) for a, b in flat)


def _pm1_pmf(a, b, ab):
    return {(sa, sb): (1 + sa * a + sb * b + sa * sb * ab) / 4
            for sa in (-1, 1) for sb in (-1, 1)}


def make_cyclic(spec):
    """Exact 0/1-encoded :class:`System` for a cyclic spec."""
    fmt = cyclic_format(spec.n)
    bunches = []
    for i in range(spec.n):
        pm = _pm1_pmf(*spec.context_expectations(i))
        # pattern index: first content is the high bit
        bunches.append(tuple(pm[(2 * (t >> 1) - 1, 2 * (t & 1) - 1)] for t in range(4)))
    return System(fmt, tuple(bunches), exact=True)


def cyclic_spec_of(system):
    """Recover the +-1 expectations of a system in cyclic format."""
    fmt = system.format
    n = len(fmt.contexts)
    if fmt != cyclic_format(n):
        raise ValueError("system is not in cyclic format")
    corr = []
    for i, c in enumerate(fmt.contexts):
        pmf = system.pmf(c)
        corr.append(pmf[0] + pmf[3] - pmf[1] - pmf[2])
    marg = []
    for i, q in enumerate(fmt.contents):
        own = fmt.contexts[i]
        prev = fmt.contexts[(i - 1) % n]
        marg.append((2 * bunch_marginal(system, own, (q,)) - 1,
                     2 * bunch_marginal(system, prev, (q,)) - 1))
    return CyclicSpec(n, tuple(corr), tuple(marg))


def s_odd(values):
    """Max of ``sum(iota_i * v_i)`` over sign vectors with an odd number of -1."""
    values = list(values)
    total = sum(abs(v) for v in values)
    negatives = sum(1 for v in values if v < 0)
    if negatives % 2 == 1:
        return total
    return total - 2 * min(abs(v) for v in values)


def s_odd_brute(values):
    best = None
    for signs in itertools.product((-1, 1), repeat=len(values)):
        if np.prod(signs) != -1:
            continue
        s = sum(i * v for i, v in zip(signs, values))
        best = s if best is None else max(best, s)
    return best


def cnt1_closed_form(spec):
    """Signed generalized-Bell expression; equals CNT1 when positive.

    ``(s_odd(correlations) - n + 2 - sum_i |<R_i^i> - <R_i^{i-1}>|) / 4``,
    evaluated exactly. A value <= 0 means the system is noncontextual.
    """
    delta = sum((abs(a - b) for a, b in spec.marginals), Fraction(0))
    return (s_odd(spec.correlations) - spec.n + 2 - delta) / 4


def random_cyclic_spec(n, seed, consistent=None, grid=16):
    """Reproducible random spec with expectations on a ``1/grid`` lattice.

    Correlations are drawn from the admissible interval for the chosen
    marginals, with extra weight on its endpoints so that contextual systems
    are common. ``consistent`` forces equal (True) or independently drawn
    (False) marginals per content; ``None`` picks either at random.
    """
    rng = np.random.default_rng(seed)
    if consistent is None:
        consistent = bool(rng.integers(2))

    def draw_marginal():
        # concentrate near 0 so the admissible correlation range stays wide
        return Fraction(int(rng.integers(-grid // 2, grid // 2 + 1)), grid)

    marg = []
    for _ in range(n):
        a = draw_marginal()
        b = a if consistent else draw_marginal()
        marg.append((a, b))
    corr = []
    for i in range(n):
        a = marg[i][0]
        b = marg[(i + 1) % n][1]
        lo = -1 + abs(a + b)
        hi = 1 - abs(a - b)
        u = rng.random()
        if u < 0.3:
            v = hi
        elif u < 0.45:
            v = lo
        else:
            k_lo = int(np.ceil(lo * grid))
            k_hi = int(np.floor(hi * grid))
            v = Fraction(int(rng.integers(k_lo, k_hi + 1)), grid)
        corr.append(v)
    return CyclicSpec(n, tuple(corr), tuple(marg))
