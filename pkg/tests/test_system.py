import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbdmeasures.cyclic import CyclicSpec, cyclic_format, make_cyclic
from cbdmeasures.errors import (
    ContextDoesNotMeasureContent,
    DuplicateIdentifier,
    EmptyContext,
    NegativeProbability,
    PmfNotNormalized,
    SubsetNotInContext,
    UnknownContent,
)
from cbdmeasures.oracle import named_systems, random_system, single_context_format
from cbdmeasures.system import (
    System,
    SystemFormat,
    bunch_marginal,
    is_consistently_connected,
    multimaximal_distribution,
    multimaximal_marginal,
    validate_system,
)


def two_coins(pmf=None):
    return validate_system({"contents": ["q1", "q2"], "contexts": [
        {"id": "c1", "contents": ["q1", "q2"],
         "distribution": pmf or {"00": 0.25, "01": 0.25, "10": 0.25, "11": 0.25}}]})


def connection_system(marginals):
    """One content measured alone in each of several contexts."""
    contexts = [f"c{i}" for i in range(len(marginals))]
    raw = {"contents": ["q"], "contexts": [
        {"id": c, "contents": ["q"], "distribution": {"1": p, "0": 1 - F(p)}}
        for c, p in zip(contexts, map(F, marginals))]}
    return validate_system(raw)


def test_uniform_pmf_is_valid():
    s = two_coins()
    assert s.bunches == ((F(1, 4),) * 4,)


def test_validation_errors():
    with pytest.raises(PmfNotNormalized):
        two_coins({"00": "0.5", "11": "0.4"})
    with pytest.raises(UnknownContent):
        validate_system({"contents": ["q1"], "contexts": [
            {"id": "c", "contents": ["q1", "q9"], "distribution": {"00": 1}}]})
    with pytest.raises(NegativeProbability):
        two_coins({"00": "1.5", "11": "-0.5"})
    with pytest.raises(EmptyContext):
        validate_system({"contents": ["q1"], "contexts": [
            {"id": "c", "contents": ["q1"], "distribution": {"1": 1}},
            {"id": "d", "contents": [], "distribution": {"": 1}}]})
    with pytest.raises(DuplicateIdentifier):
        validate_system({"contents": ["q1", "q1"], "contexts": [
            {"id": "c", "contents": ["q1"], "distribution": {"1": 1}}]})


def test_float_mode_tolerance():
    ok = validate_system({"contents": ["q"], "contexts": [
        {"id": "c", "contents": ["q"], "distribution": {"0": 0.1 + 0.2, "1": 0.7}}]}, mode="float")
    assert not ok.exact
    with pytest.raises(PmfNotNormalized):
        validate_system({"contents": ["q"], "contexts": [
            {"id": "c", "contents": ["q"], "distribution": {"0": 0.3, "1": 0.7 + 1e-6}}]},
            mode="float")


def test_bunch_marginals():
    assert bunch_marginal(two_coins(), "c1", ("q1", "q2")) == F(1, 4)
    pr = two_coins({"00": "1/2", "11": "1/2"})
    assert bunch_marginal(pr, "c1", ("q1", "q2")) == F(1, 2)
    assert bunch_marginal(pr, "c1", ("q1",)) == F(1, 2)
    with pytest.raises(SubsetNotInContext):
        bunch_marginal(pr, "c1", ("q3",))


@pytest.mark.parametrize("marginals, subset, expected", [
    (("1/2", "1/2"), (0, 1), F(1, 2)),
    (("0.3", "0.7"), (0, 1), F(3, 10)),
    (("0.2", "0.5", "0.9"), (0, 1, 2), F(1, 5)),
])
def test_multimaximal_marginal(marginals, subset, expected):
    s = connection_system(marginals)
    assert multimaximal_marginal(s, "q", [f"c{i}" for i in subset]) == expected


def test_multimaximal_marginal_rejects_foreign_context():
    s = make_cyclic(CyclicSpec(3, (0, 0, 0), (0,)))
    with pytest.raises(ContextDoesNotMeasureContent):
        multimaximal_marginal(s, "q1", ["c2"])


@pytest.mark.parametrize("marginals, expected", [
    (("0.3", "0.7"), {"11": F(3, 10), "01": F(2, 5), "00": F(3, 10)}),
    (("0.5", "0.5"), {"11": F(1, 2), "00": F(1, 2)}),
    (("1", "0"), {"10": F(1)}),
])
def test_multimaximal_distribution(marginals, expected):
    assert multimaximal_distribution(connection_system(marginals), "q").full_distribution == expected


def test_consistent_connectedness():
    assert is_consistently_connected(named_systems()["prbox"])
    spec = CyclicSpec(2, (0, 0), ((F(-2, 5), F(2, 5)), (0, 0)))
    assert not is_consistently_connected(make_cyclic(spec))
    assert is_consistently_connected(random_system(single_context_format(3), 1))


def test_variable_count_identity():
    fmt = SystemFormat(("a", "b", "c"), ("x", "y"), (("a", "b"), ("b", "c", "a")))
    assert fmt.n_vars == 5
    assert sum(fmt.connection_size(q) for q in fmt.contents) == 5
    assert fmt.variables == (("x", "a"), ("x", "b"), ("y", "b"), ("y", "c"), ("y", "a"))


lattice = st.integers(0, 64).map(lambda k: F(k, 64))


@settings(max_examples=60, deadline=None)
@given(st.lists(lattice, min_size=1, max_size=4))
def test_threshold_coupling_properties(marginals):
    s = connection_system(marginals)
    coupling = multimaximal_distribution(s, "q")
    m = len(marginals)
    dist = coupling.full_distribution
    assert sum(dist.values()) == 1
    assert len(dist) <= m + 1 and all(v > 0 for v in dist.values())
    contexts = coupling.contexts
    # every atom is an upper set: ones exactly on the variables with the largest marginals
    for pattern in dist:
        ones = [marginals[k] for k in range(m) if pattern[k] == "1"]
        zeros = [marginals[k] for k in range(m) if pattern[k] == "0"]
        assert not ones or not zeros or min(ones) >= max(zeros)
    # exhaustive subset check against the min rule
    for k in range(1, m + 1):
        for subset in itertools.combinations(contexts, k):
            assert coupling.marginal(subset) == multimaximal_marginal(s, "q", subset)
    for (a, b), v in coupling.pair_marginals.items():
        assert v == min(coupling.one_marginals[a], coupling.one_marginals[b])
    # probability of equality is 1 - |p - p'|
    for a, b in itertools.combinations(range(m), 2):
        equal = sum(v for pat, v in dist.items() if pat[a] == pat[b])
        assert equal == 1 - abs(marginals[a] - marginals[b])


@settings(max_examples=60, deadline=None)
@given(lattice, lattice, st.integers(0, 10**6))
def test_multimaximal_dominates_alternative_couplings(p, q, seed):
    s = connection_system([p, q])
    lo, hi = max(p + q - 1, F(0)), min(p, q)
    alt = lo + (hi - lo) * F(seed % 1001, 1000)
    assert multimaximal_marginal(s, "q", ["c0", "c1"]) >= alt


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10**6))
def test_bunch_marginal_antitone(n, seed):
    s = random_system(single_context_format(n), seed)
    contents = s.format.contents
    subsets = [c for k in range(1, n + 1) for c in itertools.combinations(contents, k)]
    for small in subsets:
        for big in subsets:
            if set(small) <= set(big):
                assert bunch_marginal(s, "c1", small) >= bunch_marginal(s, "c1", big)


def test_float_exact_conversion():
    s = make_cyclic(CyclicSpec(3, (F(1, 2), 0, F(-1, 4)), (F(1, 8),)))
    assert s.to_float().to_exact() == s
    assert isinstance(System(s.format, s.bunches).pmf("c1")[0], F)
