import math
from fractions import Fraction

import pytest

from bds_lab.concept_class import ConceptClass, full_class
from bds_lab.dimensions import PseudoBoxWitness, bds_dimension
from bds_lab.hard_instances import (
    CascadeLearner,
    GreedyConsistentLearner,
    HardInstance,
    InstanceError,
    OracleLearner,
    bds_hard_instance,
    expected_restricted_error,
    lower_bound_budget,
    no_information_error,
    restricted_error,
    two_point_instance,
    two_point_miss_frequency,
)
from bds_lab.harness.verify import box_class

EPS = Fraction(1, 32)


def box_instance(profile, eps=EPS):
    cls = box_class(profile)
    return bds_hard_instance(cls, bds_dimension(cls).witness, eps)


def test_masses_for_122():
    inst = box_instance((1, 2, 2))
    assert inst.profile == (1, 2, 2)
    assert [inst.masses[x] for x in inst.seq] == [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]
    assert sum(inst.masses) == 1


def test_boundary_epsilon():
    inst = box_instance((1, 2, 2), Fraction(1, 16))
    assert inst.masses[inst.anchor] == 0 and sum(inst.masses) == 1
    with pytest.raises(InstanceError):
        box_instance((1, 2, 2), Fraction(1, 8))


def test_witness_is_canonicalized():
    cls = box_class((2, 1))
    w = bds_dimension(cls).witness
    inst = bds_hard_instance(cls, PseudoBoxWitness(w.seq[::-1], w.profile[::-1],
                                                   tuple(sorted(f[::-1] for f in w.family))), EPS)
    assert inst.profile == (1, 2)


def test_bad_witnesses_rejected():
    cls = full_class(2, 3)
    with pytest.raises(InstanceError):
        bds_hard_instance(cls, PseudoBoxWitness((0,), (2,), ((1,), (2,), (3,))), EPS)
    with pytest.raises(InstanceError):
        bds_hard_instance(cls, PseudoBoxWitness((0, 1), (2, 2), ((1, 1), (1, 2))), EPS)


def test_float_epsilon_warns():
    with pytest.warns(UserWarning):
        box_instance((1, 1), 0.03125)


def test_two_point_examples():
    inst = two_point_instance(full_class(2, 2), Fraction(1, 10))
    assert sorted(inst.masses) == [Fraction(1, 5), Fraction(4, 5)]
    inst = two_point_instance(full_class(2, 2), Fraction(1, 2))
    assert sorted(inst.masses) == [0, 1]
    with pytest.raises(InstanceError):
        two_point_instance(ConceptClass.build(2, 2, [(1, 1)]), Fraction(1, 10))


def test_budget_examples():
    assert lower_bound_budget(box_instance((1, 2, 2))) == 2
    assert lower_bound_budget(box_instance((1, 1), Fraction(1, 64))) == 1
    fake = HardInstance("bds", full_class(1, 2), (Fraction(1),), Fraction(1, 64), (0,), (1, 64))
    assert lower_bound_budget(fake) == 64
    with pytest.raises(InstanceError):
        lower_bound_budget(two_point_instance(full_class(2, 2), Fraction(1, 10)))


def test_oracle_floor_and_determinism():
    inst = box_instance((1, 2, 2))
    st = expected_restricted_error(OracleLearner(), inst, 2, 50, 0)
    assert st.estimate == 0
    a = expected_restricted_error(GreedyConsistentLearner(), inst, 2, 50, 3)
    b = expected_restricted_error(GreedyConsistentLearner(), inst, 2, 50, 3)
    assert a == b


def test_estimate_range():
    inst = box_instance((1, 2, 2))
    for learner in (CascadeLearner(), GreedyConsistentLearner()):
        st = expected_restricted_error(learner, inst, 2, 100, 1)
        assert 0 <= st.estimate <= 16 * EPS


def test_budget_zero_matches_no_information_error():
    inst = box_instance((1, 2, 2))
    trials = 2000
    st = expected_restricted_error(GreedyConsistentLearner(), inst, 0, trials, 2)
    h = GreedyConsistentLearner()(inst.cls, inst.environment(inst.cls.hypotheses[0]), 0, 0)
    exact = no_information_error(inst, h)
    # uniform c* over the box: each non-anchor point is wrong with prob 1 - 1/(N_i + 1)
    closed = sum(inst.masses[x] * Fraction(N, N + 1) for x, N in zip(inst.rest, inst.profile[1:]))
    assert exact == closed >= 4 * EPS
    errs = [restricted_error(h, inst, c) for c in inst.cls.hypotheses]
    sd = math.sqrt(sum(float(e - exact) ** 2 for e in errs) / len(errs))
    assert abs(st.estimate - float(exact)) <= 3 * sd / math.sqrt(trials)


def test_two_point_miss_frequency_closed_form():
    inst = two_point_instance(full_class(2, 2), Fraction(1, 10))
    trials, m = 4000, 10
    p = float((1 - 2 * inst.epsilon) ** m)
    freq = two_point_miss_frequency(inst, m, trials, 0)
    assert abs(freq - p) <= 3 * math.sqrt(p * (1 - p) / trials)


def test_restricted_error_requires_bds_instance():
    with pytest.raises(InstanceError):
        expected_restricted_error(OracleLearner(), two_point_instance(full_class(2, 2), Fraction(1, 10)), 1, 1, 0)
