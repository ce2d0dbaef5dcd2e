"""Systems of dichotomous random variables.

A :class:`SystemFormat` records which contents are measured in which
contexts; a :class:`System` adds one joint distribution (a pmf over 0/1
outcome patterns) per context. Values are encoded 0/1 throughout.

Outcome patterns within a context (and within a connection) are indexed so
that pattern index ``t`` written as an ``n``-bit binary string gives the value
of the k-th listed variable in character k. Index 0 is all zeros, index
``2**n - 1`` is all ones; this matches the bitstring keys of system files.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from numbers import Rational

from .errors import (
    ContextDoesNotMeasureContent,
    DuplicateIdentifier,
    EmptyContext,
    InvalidPattern,
    NegativeProbability,
    PmfNotNormalized,
    SubsetNotInContext,
    UnknownContent,
    UnknownContext,
    UnmeasuredContent,
)

FLOAT_TOL = 1e-9


def pattern_bits(index, width):
    """Values of the ``width`` variables encoded by pattern ``index``."""
    return tuple((index >> (width - 1 - k)) & 1 for k in range(width))


def pattern_string(index, width):
    return "".join(str(b) for b in pattern_bits(index, width))


def to_number(value, exact=True):
    """Coerce a probability given as int, float, Decimal, Fraction or string.

    Strings may be decimals (``"0.25"``) or fractions (``"1/3"``). In exact
    mode floats are read through their shortest decimal repr, so ``0.1``
    becomes ``1/10``.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, str):
        v = Fraction(value.strip())
    elif isinstance(value, Decimal):
        v = Fraction(value)
    elif isinstance(value, Rational):
        v = Fraction(int(value.numerator), int(value.denominator))
    elif isinstance(value, float):
        v = Fraction(repr(value)) if exact else value
    else:
        try:
            v = Fraction(value)
        except (TypeError, ValueError):
            raise TypeError(f"cannot interpret {value!r} as a probability") from None
    if exact:
        return v
    return float(v)


@dataclass(frozen=True)
class SystemFormat:
    """Contents, contexts and the incidence relation between them."""

    contents: tuple
    contexts: tuple
    incidence: tuple  # per context, the ordered contents it measures

    def __post_init__(self):
        object.__setattr__(self, "contents", tuple(self.contents))
        object.__setattr__(self, "contexts", tuple(self.contexts))
        object.__setattr__(self, "incidence", tuple(tuple(i) for i in self.incidence))
        if len(set(self.contents)) != len(self.contents):
            raise DuplicateIdentifier(f"duplicate content in {self.contents}")
        if len(set(self.contexts)) != len(self.contexts):
            raise DuplicateIdentifier(f"duplicate context in {self.contexts}")
        if len(self.incidence) != len(self.contexts):
            raise ValueError("incidence must list the contents of every context")
        known = set(self.contents)
        for c, measured in zip(self.contexts, self.incidence):
            if not measured:
                raise EmptyContext(f"context {c!r} measures no content")
            if len(set(measured)) != len(measured):
                raise DuplicateIdentifier(f"context {c!r} lists a content twice")
            for q in measured:
                if q not in known:
                    raise UnknownContent(f"context {c!r} measures unknown content {q!r}")
        seen = {q for measured in self.incidence for q in measured}
        for q in self.contents:
            if q not in seen:
                raise UnmeasuredContent(f"content {q!r} is measured in no context")

    @classmethod
    def from_mapping(cls, contents, contexts):
        """Build from an ordered ``{context: [contents...]}`` mapping."""
        return cls(tuple(contents), tuple(contexts), tuple(contexts[c] for c in contexts))

    @cached_property
    def variables(self):
        """Global variable order: ``(context, content)`` pairs, context-major."""
        return tuple((c, q) for c, measured in zip(self.contexts, self.incidence)
                     for q in measured)

    @cached_property
    def var_index(self):
        return {v: i for i, v in enumerate(self.variables)}

    @property
    def n_vars(self):
        return len(self.variables)

    def context_size(self, c):
        return len(self.measured_in(c))

    def measured_in(self, c):
        try:
            return self.incidence[self.contexts.index(c)]
        except ValueError:
            raise UnknownContext(f"unknown context {c!r}") from None

    @cached_property
    def _connections(self):
        return {q: tuple(c for c, measured in zip(self.contexts, self.incidence)
                         if q in measured)
                for q in self.contents}

    def connection(self, q):
        """Contexts measuring content ``q``, in context order."""
        try:
            return self._connections[q]
        except KeyError:
            raise UnknownContent(f"unknown content {q!r}") from None

    def connection_size(self, q):
        return len(self.connection(q))

    def describe(self):
        return {c: list(m) for c, m in zip(self.contexts, self.incidence)}


@dataclass(frozen=True)
class System:
    """A format plus one pmf per context, indexed by pattern index."""

    format: SystemFormat
    bunches: tuple
    exact: bool = True

    def pmf(self, c):
        return self.bunches[self.format.contexts.index(c)]

    def one_marginal(self, c, q):
        return bunch_marginal(self, c, (q,))

    def to_float(self):
        return System(self.format, tuple(tuple(float(p) for p in pmf) for pmf in self.bunches),
                      exact=False)

    def to_exact(self):
        """Exact copy; floats are taken at their exact binary value."""
        if self.exact:
            return self
        return System(self.format, tuple(tuple(Fraction(p) for p in pmf) for pmf in self.bunches),
                      exact=True)


@dataclass(frozen=True)
class ConnectionCoupling:
    """The multimaximal coupling of one connection."""

    content: str
    contexts: tuple
    one_marginals: dict
    pair_marginals: dict
    full_distribution: dict  # pattern string -> mass; char k <-> contexts[k]

    def marginal(self, subset):
        """Pr[all T_q^c = 1 for c in subset], summed from the full distribution."""
        idx = [self.contexts.index(c) for c in subset]
        zero = Fraction(0) if isinstance(next(iter(self.one_marginals.values())), Fraction) else 0.0
        return sum((m for pat, m in self.full_distribution.items()
                    if all(pat[k] == "1" for k in idx)), zero)

    def pmf_vector(self):
        """Masses for all 2**m patterns in pattern order (zeros included)."""
        m = len(self.contexts)
        zero = Fraction(0) if isinstance(next(iter(self.one_marginals.values())), Fraction) else 0.0
        return tuple(self.full_distribution.get(pattern_string(t, m), zero)
                     for t in range(2 ** m))


# ---------------------------------------------------------------------------
# construction and validation


def _parse_distribution(c, n, dist, exact):
    size = 2 ** n
    zero = Fraction(0) if exact else 0.0
    if isinstance(dist, dict):
        pmf = [zero] * size
        for key, value in dist.items():
            key = str(key)
            if len(key) != n or set(key) - {"0", "1"}:
                raise InvalidPattern(f"context {c!r}: invalid outcome pattern {key!r} "
                                     f"(expected {n} characters of 0/1)")
            pmf[int(key, 2)] = to_number(value, exact)
    else:
        values = list(dist)
        if len(values) != size:
            raise InvalidPattern(f"context {c!r}: expected {size} probabilities, got {len(values)}")
        pmf = [to_number(v, exact) for v in values]
    for t, p in enumerate(pmf):
        if p < 0:
            raise NegativeProbability(
                f"context {c!r}: pattern {pattern_string(t, n)} has probability {p}")
    total = sum(pmf, zero)
    if (total != 1) if exact else abs(total - 1) > FLOAT_TOL:
        raise PmfNotNormalized(f"context {c!r}: probabilities sum to {total}")
    return tuple(pmf)


def validate_system(raw, mode="rational"):
    """Validate a raw description and freeze it into a :class:`System`.

    ``raw`` is a mapping with ``contents`` (ordered identifiers) and
    ``contexts`` (ordered records with ``id``, ``contents`` and
    ``distribution``). A distribution is either a ``{bitstring: probability}``
    mapping, with absent patterns meaning 0, or a sequence of ``2**n_c``
    probabilities in pattern order.
    """
    if mode not in ("rational", "float"):
        raise ValueError(f"mode must be 'rational' or 'float', not {mode!r}")
    exact = mode == "rational"
    contents = tuple(raw["contents"])
    records = list(raw["contexts"])
    ids = tuple(r["id"] for r in records)
    fmt = SystemFormat(contents, ids, tuple(tuple(r["contents"]) for r in records))
    bunches = tuple(_parse_distribution(r["id"], len(r["contents"]), r["distribution"], exact)
                    for r in records)
    return System(fmt, bunches, exact)


def make_system(fmt, bunches, mode="rational"):
    """Build a system from a format and per-context pmfs (pattern order or dicts)."""
    exact = mode == "rational"
    pmfs = tuple(_parse_distribution(c, len(m), b, exact)
                 for c, m, b in zip(fmt.contexts, fmt.incidence, bunches))
    if len(pmfs) != len(fmt.contexts):
        raise ValueError("one distribution per context is required")
    return System(fmt, pmfs, exact)


def system_to_raw(system):
    """Inverse of :func:`validate_system` (distributions as bitstring maps)."""
    fmt = system.format
    records = []
    for c, measured, pmf in zip(fmt.contexts, fmt.incidence, system.bunches):
        n = len(measured)
        records.append({
            "id": c,
            "contents": list(measured),
            "distribution": {pattern_string(t, n): p for t, p in enumerate(pmf) if p != 0},
        })
    return {"contents": list(fmt.contents), "contexts": records}


# ---------------------------------------------------------------------------
# marginals


def bunch_marginal(system, c, subset):
    """Pr[R_q^c = 1 for every q in ``subset``] within context ``c``."""
    measured = system.format.measured_in(c)
    subset = tuple(subset)
    if not subset:
        raise SubsetNotInContext("subset must be nonempty")
    try:
        pos = [measured.index(q) for q in subset]
    except ValueError:
        raise SubsetNotInContext(f"{subset} is not a subset of context {c!r}") from None
    n = len(measured)
    mask = 0
    for k in pos:
        mask |= 1 << (n - 1 - k)
    pmf = system.pmf(c)
    zero = Fraction(0) if system.exact else 0.0
    return sum((p for t, p in enumerate(pmf) if t & mask == mask), zero)


def one_marginals(system, q):
    """``{context: Pr[R_q^c = 1]}`` over the connection of ``q``."""
    return {c: bunch_marginal(system, c, (q,)) for c in system.format.connection(q)}


def multimaximal_marginal(system, q, contexts):
    """Pr[T_q^c = 1 for all c in ``contexts``] in the multimaximal coupling.

    For dichotomous variables this is the Frechet upper bound, the smallest of
    the one-marginals.
    """
    conn = system.format.connection(q)
    contexts = tuple(contexts)
    if not contexts:
        raise ContextDoesNotMeasureContent("context subset must be nonempty")
    for c in contexts:
        if c not in conn:
            raise ContextDoesNotMeasureContent(f"context {c!r} does not measure {q!r}")
    return min(bunch_marginal(system, c, (q,)) for c in contexts)


def multimaximal_distribution(system, q):
    """Threshold coupling ``T_q^c = [U < Pr[R_q^c = 1]]`` for one shared uniform U."""
    conn = system.format.connection(q)
    marg = one_marginals(system, q)
    m = len(conn)
    zero = Fraction(0) if system.exact else 0.0
    one = Fraction(1) if system.exact else 1.0
    levels = sorted(set(marg.values()))
    dist = {}
    prev = zero
    for level in levels:
        mass = level - prev
        if mass > 0:
            pat = "".join("1" if marg[c] >= level else "0" for c in conn)
            dist[pat] = dist.get(pat, zero) + mass
        prev = level
    if one - prev > 0:
        dist["0" * m] = dist.get("0" * m, zero) + (one - prev)
    pairs = {(a, b): min(marg[a], marg[b]) for a, b in itertools.permutations(conn, 2)}
    return ConnectionCoupling(q, conn, marg, pairs, dist)


def is_consistently_connected(system):
    """True iff every content has equal one-marginals across its contexts."""
    for q in system.format.contents:
        vals = list(one_marginals(system, q).values())
        lo, hi = min(vals), max(vals)
        if (hi != lo) if system.exact else hi - lo > FLOAT_TOL:
            return False
    return True
