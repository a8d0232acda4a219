"""The one-inclusion list learner, majority votes over lists, and exact error evaluation.

The learner is transductive: to label a query ``x`` given a sample, it
orients the one-inclusion graph of the class projected onto the sample's
instances plus ``x``.  Only an instance's multiplicity up to two matters
there (a coordinate whose instance repeats elsewhere only spans singleton
edges, which are always selected), so the projection is taken on the
*canonical sequence*: distinct instances in increasing order, each written
once or, if it occurs at least twice, twice.  The orientation is therefore
a function of the sample multiset, which makes predictions invariant under
reordering the sample and lets one orientation serve every leave-one-out
split of a sample.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .concept_class import ConceptClass, Vector, restrict
from .one_inclusion import OneInclusionGraph, ListOrientation, build_graph, min_max_outdegree_orientation

Pair = tuple[int, int]
MASS_TOL = 1e-12


class NonRealizableError(ValueError):
    """The labeled sample is not consistent with any hypothesis of the class."""


@dataclass(frozen=True)
class ListHypothesis:
    table: tuple[tuple[int, ...], ...]  # instance -> label list
    cap: int

    def __call__(self, x: int) -> tuple[int, ...]:
        return self.table[x]

    def __post_init__(self):
        for lst in self.table:
            if len(lst) > self.cap or len(set(lst)) != len(lst):
                raise ValueError(f"list {lst} violates cap {self.cap} or repeats a label")


@dataclass(frozen=True)
class FiniteDistribution:
    masses: tuple[Fraction, ...]
    target: Vector

    def __post_init__(self):
        if len(self.masses) != len(self.target):
            raise ValueError("masses and target vector have different lengths")
        if any(p < 0 for p in self.masses):
            raise ValueError("negative mass")
        if abs(float(sum(self.masses)) - 1.0) > MASS_TOL:
            raise ValueError(f"masses sum to {float(sum(self.masses))}, not 1")

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(x for x, p in enumerate(self.masses) if p > 0)


def as_fraction(value) -> Fraction:
    """Exact rational from an int, Fraction, ``"p/q"`` or decimal string, or float (via repr)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


# -- the transductive learner -------------------------------------------------

def canonical_sequence(counts: dict[int, int]) -> tuple[int, ...]:
    seq = []
    for x in sorted(counts):
        seq.extend([x] * min(counts[x], 2))
    return tuple(seq)


@dataclass
class _Oriented:
    graph: OneInclusionGraph
    orientation: ListOrientation
    max_out: int


class OneInclusionListLearner:
    """One-inclusion list learner for a fixed class and list size, with orientation caching."""

    def __init__(self, cls: ConceptClass, L: int):
        if L < 1:
            raise ValueError("L must be >= 1")
        self.cls = cls
        self.L = L
        self._cache: dict[tuple[int, ...], _Oriented] = {}

    def oriented(self, seq: tuple[int, ...]) -> _Oriented:
        hit = self._cache.get(seq)
        if hit is None:
            graph = build_graph(restrict(self.cls, seq))
            sigma, best = min_max_outdegree_orientation(graph, self.L)
            hit = self._cache[seq] = _Oriented(graph, sigma, best)
        return hit

    def predict_from(self, counts: dict[int, int], labels: dict[int, int], x: int) -> tuple[int, ...]:
        """Predict at ``x`` from sample multiplicities and the (consistent) sample labels."""
        full = dict(counts)
        full[x] = full.get(x, 0) + 1
        seq = canonical_sequence(full)
        q = len(seq) - 1 - seq[::-1].index(x)  # query sits on the last copy of x
        pattern = tuple(labels[s] for j, s in enumerate(seq) if j != q)
        o = self.oriented(seq)
        j = o.graph.edge_index(q, pattern)
        if j is None:
            raise NonRealizableError("no hypothesis is consistent with the sample")
        return tuple(sorted({o.graph.vertices[u][q] for u in o.orientation.selection[j]}))

    def predict(self, sample: Sequence[Pair], x: int) -> tuple[int, ...]:
        counts, labels = sample_stats(sample)
        if not 0 <= x < self.cls.n:
            raise IndexError(f"query {x} out of range")
        return self.predict_from(counts, labels, x)


def sample_stats(sample: Iterable[Pair]) -> tuple[dict[int, int], dict[int, int]]:
    counts: Counter = Counter()
    labels: dict[int, int] = {}
    for x, y in sample:
        if labels.setdefault(x, y) != y:
            raise NonRealizableError(f"instance {x} carries two labels")
        counts[x] += 1
    return dict(counts), labels


def one_inclusion_list_predict(cls: ConceptClass, sample: Sequence[Pair], x: int, L: int) -> tuple[int, ...]:
    return OneInclusionListLearner(cls, L).predict(sample, x)


def literal_predict(cls: ConceptClass, sample: Sequence[Pair], x: int, L: int) -> tuple[tuple[int, ...], OneInclusionGraph, ListOrientation]:
    """The learner on the uncompressed sequence ``(x_1, ..., x_m, x)``.

    Kept for cross-checking the canonical-sequence learner; its tie-breaks
    depend on sample order.
    """
    sample = list(sample)
    seq = tuple(s for s, _ in sample) + (x,)
    graph = build_graph(restrict(cls, seq))
    sigma, _ = min_max_outdegree_orientation(graph, L)
    q = len(seq) - 1
    j = graph.edge_index(q, tuple(y for _, y in sample))
    if j is None:
        raise NonRealizableError("no hypothesis is consistent with the sample")
    return tuple(sorted({graph.vertices[u][q] for u in sigma.selection[j]})), graph, sigma


# -- voting -----------------------------------------------------------------

def majority_vote(lists: Sequence[Iterable[int]]) -> tuple[int, ...]:
    """Labels present in at least half of the lists, ascending."""
    lists = [set(l) for l in lists]
    if not lists:
        raise ValueError("majority vote of zero lists")
    votes = Counter(y for l in lists for y in l)
    return tuple(sorted(y for y, c in votes.items() if 2 * c >= len(lists)))


def pad_list(lst: Sequence[int], target: int, K: int) -> tuple[int, ...]:
    if target > K:
        raise ValueError(f"cannot pad to {target} labels with K={K}")
    if len(lst) > target:
        raise ValueError(f"list of size {len(lst)} exceeds the target {target}")
    out = list(lst)
    have = set(out)
    y = 1
    while len(out) < target:
        if y not in have:
            out.append(y)
        y += 1
    return tuple(out)


def truncate_votes(votes: Counter, n_voters: int, cap: int) -> tuple[tuple[int, ...], bool]:
    """Majority list from vote counts; if over ``cap``, keep the most-voted (then smallest) labels."""
    winners = [y for y, c in votes.items() if 2 * c >= n_voters]
    if len(winners) <= cap:
        return tuple(sorted(winners)), False
    winners.sort(key=lambda y: (-votes[y], y))
    return tuple(sorted(winners[:cap])), True


def prefix_range(n: int, mode: str = "exclusive") -> tuple[int, int]:
    """Inclusive range of prefix lengths that vote.

    ``exclusive``: ceil(n/4) .. n-1; ``inclusive``: ceil(n/4) .. n.  A single-example
    sample has an empty ``exclusive`` range and falls back to ``1 .. 1``.
    """
    lo = max(1, math.ceil(n / 4))
    if mode == "exclusive":
        hi = n - 1 if n >= 2 else n
    elif mode == "inclusive":
        hi = n
    else:
        raise ValueError(f"unknown prefix mode {mode!r}")
    return lo, hi


@dataclass
class VoteOutcome:
    hypothesis: ListHypothesis
    truncated: int = 0  # instances whose majority list exceeded the cap
    voters: int = 0


def prefix_majority(learner: OneInclusionListLearner, sample: Sequence[Pair], K: int,
                    mode: str = "exclusive", cap: Optional[int] = None,
                    queries: Optional[Sequence[int]] = None) -> VoteOutcome:
    """Majority vote of the learners trained on the sample's prefixes, padded to the cap.

    Predictions only change when some instance's prefix count goes 0->1 or
    1->2, so runs of prefixes with the same capped multiplicities are voted
    once and weighted by their length.  Exact, and equal to voting every
    prefix separately.
    """
    sample = list(sample)
    n = len(sample)
    if n < 1:
        raise ValueError("prefix majority needs a nonempty sample")
    L = learner.L
    cap = min(2 * L - 1, K) if cap is None else cap
    lo, hi = prefix_range(n, mode)
    domain = range(learner.cls.n) if queries is None else queries
    counts: dict[int, int] = {}
    labels: dict[int, int] = {}
    votes = {x: Counter() for x in domain}

    def add(pair):
        x, y = pair
        if labels.setdefault(x, y) != y:
            raise NonRealizableError(f"instance {x} carries two labels")
        counts[x] = counts.get(x, 0) + 1
        return counts[x] <= 2  # did the capped signature change?

    for p in range(lo - 1):
        add(sample[p])
    p = lo
    add(sample[p - 1])
    while p <= hi:
        # extend the run while the capped multiplicities stay fixed
        end = p
        while end + 1 <= hi and counts.get(sample[end][0], 0) >= 2:
            add(sample[end])
            end += 1
        weight = end - p + 1
        for x in domain:
            for y in learner.predict_from(counts, labels, x):
                votes[x][y] += weight
        p = end + 1
        if p <= hi:
            add(sample[p - 1])
    n_voters = hi - lo + 1
    table, truncated = [], 0
    for x in range(learner.cls.n):
        if x in votes:
            lst, cut = truncate_votes(votes[x], n_voters, cap)
            truncated += cut
        else:
            lst = ()
        table.append(pad_list(lst, cap, K))
    return VoteOutcome(ListHypothesis(tuple(table), cap), truncated, n_voters)


def prefix_majority_learner(cls: ConceptClass, sample: Sequence[Pair], L: int, mode: str = "exclusive") -> ListHypothesis:
    if len(sample) < 2:
        raise ValueError("the prefix-majority learner needs n >= 2 examples")
    return prefix_majority(OneInclusionListLearner(cls, L), sample, cls.k, mode).hypothesis


# -- exact evaluation ---------------------------------------------------------

def list_error(mu: ListHypothesis, dist: FiniteDistribution) -> Fraction:
    if len(mu.table) != dist.n:
        raise ValueError("list hypothesis and distribution have different domains")
    return sum(
        (p for x, p in enumerate(dist.masses) if p and dist.target[x] not in mu.table[x]),
        Fraction(0),
    )


def loo_error_exact(cls: ConceptClass, sample: Sequence[Pair], L: int,
                    learner: Optional[OneInclusionListLearner] = None) -> Fraction:
    """Average over positions ``i`` of ``[y_i not in mu_{S - i}(x_i)]``."""
    sample = list(sample)
    if not sample:
        raise ValueError("empty sample")
    learner = learner or OneInclusionListLearner(cls, L)
    counts, labels = sample_stats(sample)
    if not any(all(h[x] == y for x, y in labels.items()) for h in cls.hypotheses):
        raise NonRealizableError("sample is not realizable by the class")
    misses = 0
    for x, y in sample:
        rest = dict(counts)
        rest[x] -= 1
        if not rest[x]:
            del rest[x]
        lab = {s: labels[s] for s in rest}
        if y not in learner.predict_from(rest, lab, x):
            misses += 1
    return Fraction(misses, len(sample))
