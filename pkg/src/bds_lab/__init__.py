"""Bandit multiclass PAC learning laboratory: shattering dimensions, one-inclusion
list learners, the ListCascade bandit learner, lower-bound instances and a
verification harness for finite classes."""

__version__ = "0.1.0"

from .concept_class import ConceptClass, full_class, random_class, restrict, i_neighbors, load, save
from .dimensions import (
    bds_dimension,
    ds_l_dimension,
    l_exponential_dimension,
    natarajan_dimension,
    bds_lower_bound_from_ds,
    core,
    is_bds_shattered,
)
from .one_inclusion import build_graph, min_max_outdegree_orientation, feasible_orientation
from .list_learning import (
    one_inclusion_list_predict,
    majority_vote,
    pad_list,
    prefix_majority_learner,
    list_error,
    loo_error_exact,
)
from .bandit import Environment, epoch_schedule, list_cascade, evaluate_hypothesis, sample_round
from .hard_instances import bds_hard_instance, two_point_instance, lower_bound_budget, expected_restricted_error

__all__ = [
    "ConceptClass",
    "full_class",
    "random_class",
    "restrict",
    "i_neighbors",
    "load",
    "save",
    "bds_dimension",
    "ds_l_dimension",
    "l_exponential_dimension",
    "natarajan_dimension",
    "bds_lower_bound_from_ds",
    "core",
    "is_bds_shattered",
    "build_graph",
    "min_max_outdegree_orientation",
    "feasible_orientation",
    "one_inclusion_list_predict",
    "majority_vote",
    "pad_list",
    "prefix_majority_learner",
    "list_error",
    "loo_error_exact",
    "Environment",
    "epoch_schedule",
    "list_cascade",
    "evaluate_hypothesis",
    "sample_round",
    "bds_hard_instance",
    "two_point_instance",
    "lower_bound_budget",
    "expected_restricted_error",
]
