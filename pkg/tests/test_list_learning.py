import itertools
import random
from collections import Counter
from fractions import Fraction

import pytest

from bds_lab.concept_class import ConceptClass, full_class, random_class
from bds_lab.list_learning import (
    FiniteDistribution,
    ListHypothesis,
    NonRealizableError,
    OneInclusionListLearner,
    as_fraction,
    list_error,
    literal_predict,
    loo_error_exact,
    majority_vote,
    one_inclusion_list_predict,
    pad_list,
    prefix_majority,
    prefix_majority_learner,
    prefix_range,
    truncate_votes,
)
from bds_lab.one_inclusion import max_outdegree, min_max_outdegree_orientation

DIAG = ConceptClass.build(2, 2, [(1, 1), (2, 2)])


def test_predict_examples():
    assert one_inclusion_list_predict(DIAG, [(0, 1)], 1, 1) == (1,)
    assert one_inclusion_list_predict(full_class(1, 2), [], 0, 2) == (1, 2)
    single = ConceptClass.build(3, 2, [(3, 3)])
    assert one_inclusion_list_predict(single, [(0, 3), (1, 3)], 0, 1) == (3,)


def test_predict_rejects_non_realizable():
    with pytest.raises(NonRealizableError):
        one_inclusion_list_predict(DIAG, [(0, 1), (1, 2)], 0, 1)
    with pytest.raises(NonRealizableError):
        loo_error_exact(DIAG, [(0, 1), (1, 2)], 1)


def test_majority_examples():
    assert majority_vote([{1, 2}, {2, 3}, {2, 4}]) == (2,)
    assert majority_vote([(1, 3)] * 5) == (1, 3)
    assert majority_vote([{1, 2}, {3, 4}]) == (1, 2, 3, 4)
    with pytest.raises(ValueError):
        majority_vote([])


def test_majority_size_bound_exhaustive():
    """Odd n >= 3 voters of size <= L give at most 2L - 1 labels; even n can tie at 2L."""
    for L in (1, 2):
        lists = [c for r in range(L + 1) for c in itertools.combinations(range(1, 5), r)]
        for n in (3, 4, 5):
            worst = max(len(majority_vote(c)) for c in itertools.combinations_with_replacement(lists, n))
            assert worst <= (2 * L - 1 if n % 2 else 2 * L)
    assert majority_vote([(1,), (1,), (2,), (2,)]) == (1, 2)


def test_pad_examples():
    assert pad_list((2,), 3, 4) == (2, 1, 3)
    assert pad_list((1, 2), 2, 4) == (1, 2)
    assert pad_list((3,), 1, 4) == (3,)
    with pytest.raises(ValueError):
        pad_list((1,), 5, 4)


def test_truncation_keeps_most_voted():
    votes = Counter({1: 1, 2: 1, 3: 2, 4: 1})
    assert truncate_votes(votes, 2, 3) == ((1, 2, 3), True)
    assert truncate_votes(Counter({5: 2, 6: 1}), 2, 3) == ((5, 6), False)


def test_prefix_range():
    assert prefix_range(8) == (2, 7)
    assert prefix_range(8, "inclusive") == (2, 8)
    assert prefix_range(1) == (1, 1)
    assert prefix_range(2) == (1, 1)
    with pytest.raises(ValueError):
        prefix_range(3, "other")


def test_prefix_majority_examples():
    mu = prefix_majority_learner(DIAG, [(0, 1), (0, 1)], 1)
    assert 1 in mu(0)
    single = ConceptClass.build(3, 3, [(2, 3, 1)])
    mu = prefix_majority_learner(single, [(0, 2), (2, 1), (1, 3)], 1)
    assert mu.table == ((2,), (3,), (1,))
    with pytest.raises(ValueError):
        prefix_majority_learner(DIAG, [(0, 1)], 1)


def test_prefix_majority_list_sizes():
    rng = random.Random(1)
    for _ in range(40):
        cls = random_class(3, 5, rng.randint(1, 40), rng.randrange(10 ** 6))
        h = rng.choice(cls.hypotheses)
        sample = [(x, h[x]) for x in (rng.randrange(3) for _ in range(rng.randint(2, 9)))]
        for L in (1, 2, 3):
            mu = prefix_majority_learner(cls, sample, L)
            assert all(len(l) == min(2 * L - 1, 5) for l in mu.table)


def test_prefix_majority_matches_naive_voting():
    """Run-length weighting equals voting each prefix separately."""
    rng = random.Random(2)
    for _ in range(40):
        cls = random_class(3, 4, rng.randint(1, 30), rng.randrange(10 ** 6))
        h = rng.choice(cls.hypotheses)
        sample = [(x, h[x]) for x in (rng.randrange(3) for _ in range(rng.randint(1, 10)))]
        for mode in ("exclusive", "inclusive"):
            L = rng.randint(1, 3)
            learner = OneInclusionListLearner(cls, L)
            lo, hi = prefix_range(len(sample), mode)
            cap = min(2 * L - 1, 4)
            out = prefix_majority(learner, sample, 4, mode, cap)
            for x in range(3):
                votes = Counter()
                for p in range(lo, hi + 1):
                    votes.update(learner.predict(sample[:p], x))
                lst, _ = truncate_votes(votes, hi - lo + 1, cap)
                assert out.hypothesis.table[x] == pad_list(lst, cap, 4)


def test_realizability_preserved_by_vote():
    rng = random.Random(4)
    for _ in range(30):
        cls = random_class(3, 4, rng.randint(1, 30), rng.randrange(10 ** 6))
        h = rng.choice(cls.hypotheses)
        sample = [(x, h[x]) for x in (rng.randrange(3) for _ in range(rng.randint(2, 8)))]
        learner = OneInclusionListLearner(cls, 2)
        lo, hi = prefix_range(len(sample))
        out = prefix_majority(learner, sample, 4)
        for x in range(3):
            if all(h[x] in learner.predict(sample[:p], x) for p in range(lo, hi + 1)):
                assert h[x] in out.hypothesis.table[x]


def test_list_error_examples():
    dist = FiniteDistribution((Fraction(4, 5), Fraction(1, 5)), (1, 2))
    assert list_error(ListHypothesis(((1, 2), (1, 2)), 2), dist) == 0
    assert list_error(ListHypothesis(((), ()), 2), dist) == 1
    assert list_error(ListHypothesis(((1,), (1,)), 1), dist) == Fraction(1, 5)
    with pytest.raises(ValueError):
        list_error(ListHypothesis(((1,),), 1), dist)


def test_distribution_validation():
    with pytest.raises(ValueError):
        FiniteDistribution((Fraction(1, 2), Fraction(1, 3)), (1, 1))
    with pytest.raises(ValueError):
        FiniteDistribution((Fraction(3, 2), Fraction(-1, 2)), (1, 1))
    assert as_fraction("3/10") == Fraction(3, 10)
    assert as_fraction(0.1) == Fraction(1, 10)


def test_loo_examples():
    single = ConceptClass.build(2, 2, [(2, 1)])
    assert loo_error_exact(single, [(0, 2), (1, 1), (0, 2)], 1) == 0
    full = full_class(1, 2)
    assert loo_error_exact(full, [(0, 1), (0, 1)], 1) == 0
    avg = (loo_error_exact(full, [(0, 1)], 1) + loo_error_exact(full, [(0, 2)], 1)) / 2
    assert avg == Fraction(1, 2)


def test_permutation_invariance():
    rng = random.Random(8)
    for _ in range(40):
        cls = random_class(4, 3, rng.randint(1, 40), rng.randrange(10 ** 6))
        h = rng.choice(cls.hypotheses)
        sample = [(x, h[x]) for x in (rng.randrange(4) for _ in range(rng.randint(0, 6)))]
        x = rng.randrange(4)
        base = one_inclusion_list_predict(cls, sample, x, 1)
        for _ in range(3):
            rng.shuffle(sample)
            assert one_inclusion_list_predict(cls, sample, x, 1) == base


def test_canonical_learner_is_optimal_on_the_literal_graph():
    """The compressed prediction lifts to an optimal orientation of the literal graph.

    We check that the literal solver's optimum equals the compressed one and
    that the compressed prediction is a subset of size min(L, |edge|).
    """
    rng = random.Random(9)
    for _ in range(40):
        cls = random_class(3, 3, rng.randint(1, 27), rng.randrange(10 ** 6))
        h = rng.choice(cls.hypotheses)
        sample = [(x, h[x]) for x in (rng.randrange(3) for _ in range(rng.randint(0, 4)))]
        x, L = rng.randrange(3), rng.randint(1, 2)
        learner = OneInclusionListLearner(cls, L)
        pred = learner.predict(sample, x)
        lit, graph, sigma = literal_predict(cls, sample, x, L)
        consistent = {g[x] for g in cls.hypotheses if all(g[s] == y for s, y in sample)}
        assert set(pred) <= consistent and len(pred) == min(L, len(consistent))
        assert set(lit) <= consistent and len(lit) == len(pred)
        assert max_outdegree(graph, sigma) == min_max_outdegree_orientation(graph, L)[1]


def test_learner_cache_is_idempotent():
    cls = random_class(3, 3, 10, 1)
    learner = OneInclusionListLearner(cls, 1)
    h = cls.hypotheses[0]
    a = learner.predict([(0, h[0])], 1)
    b = learner.predict([(0, h[0])], 1)
    assert a == b == OneInclusionListLearner(cls, 1).predict([(0, h[0])], 1)
