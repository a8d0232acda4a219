"""Exact shattering dimensions of finite classes.

Every dimension here reduces to one primitive, :func:`core`: the largest
subfamily of a projected class in which each vector keeps at least
``N_i`` distinct ``i``-neighbors for every coordinate ``i``.  Qualifying
families are closed under union, so the greatest one is the fixed point
of repeatedly peeling violators, whatever the peeling order.
"""
from __future__ import annotations

import heapq
import itertools
import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .concept_class import ConceptClass, Vector, check_sequence, i_neighbors, restrict


class BudgetExhausted(Exception):
    pass


@dataclass(frozen=True)
class PseudoBoxWitness:
    seq: tuple[int, ...]
    profile: tuple[int, ...]
    family: tuple[Vector, ...]

    @property
    def total(self) -> int:
        return sum(self.profile)

    def validate(self) -> bool:
        """Re-check the neighbor requirement directly from the definition."""
        if not self.family or len(self.seq) != len(self.profile):
            return False
        if any(n < 1 for n in self.profile):
            return False
        for f in self.family:
            for i, need in enumerate(self.profile):
                if len(i_neighbors(self.family, f, i)) < need:
                    return False
        return True

    def canonical(self) -> "PseudoBoxWitness":
        """Reorder coordinates so the profile is ascending (stable)."""
        order = sorted(range(len(self.profile)), key=lambda i: (self.profile[i], i))
        return PseudoBoxWitness(
            tuple(self.seq[i] for i in order),
            tuple(self.profile[i] for i in order),
            tuple(sorted(tuple(f[i] for i in order) for f in self.family)),
        )

    def to_dict(self) -> dict:
        return {
            "seq": list(self.seq),
            "profile": list(self.profile),
            "family": [list(f) for f in self.family],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PseudoBoxWitness":
        return cls(
            tuple(int(s) for s in data["seq"]),
            tuple(int(n) for n in data["profile"]),
            tuple(sorted(tuple(int(y) for y in f) for f in data["family"])),
        )


@dataclass
class DimensionReport:
    name: str
    value: int
    witness: Optional[object] = None
    exhausted: bool = False
    stats: dict = field(default_factory=lambda: {"nodes": 0, "cache_hits": 0})

    def to_dict(self) -> dict:
        w = self.witness
        if isinstance(w, PseudoBoxWitness):
            w = w.to_dict()
        return {
            "dimension": self.name,
            "value": self.value,
            "lower_bound_only": self.exhausted,
            "witness": w,
            "stats": dict(self.stats),
        }


class _Counter:
    def __init__(self, budget: Optional[int]):
        self.budget = budget
        self.nodes = 0
        self.cache_hits = 0

    def tick(self):
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExhausted

    def stats(self) -> dict:
        return {"nodes": self.nodes, "cache_hits": self.cache_hits}


# -- core -------------------------------------------------------------------

def _buckets(vecs: Iterable[Vector], m: int) -> dict:
    out: dict = defaultdict(set)
    for v in vecs:
        for i in range(m):
            out[i, v[:i] + v[i + 1:]].add(v)
    return out


def core(proj: Iterable[Vector], profile: Sequence[int], rng: Optional[random.Random] = None) -> tuple[Vector, ...]:
    """Greatest subfamily of ``proj`` meeting the neighbor profile.

    Violators are peeled in lexicographic order unless ``rng`` is given, in
    which case the order is randomized (the result must not change).
    """
    vecs = sorted(set(proj))
    profile = tuple(profile)
    m = len(profile)
    if any(len(v) != m for v in vecs):
        raise ValueError(f"profile of length {m} does not match the class arity")
    if not vecs:
        return ()
    buckets = _buckets(vecs, m)
    alive = set(vecs)

    def violates(f):
        return any(len(buckets[i, f[:i] + f[i + 1:]]) - 1 < profile[i] for i in range(m))

    if rng is None:
        heap = list(vecs)
        queued = set(vecs)
        while heap:
            f = heapq.heappop(heap)
            queued.discard(f)
            if f not in alive or not violates(f):
                continue
            alive.discard(f)
            for i in range(m):
                b = buckets[i, f[:i] + f[i + 1:]]
                b.discard(f)
                for g in b:
                    if g not in queued:
                        queued.add(g)
                        heapq.heappush(heap, g)
    else:
        while True:
            bad = [f for f in sorted(alive) if violates(f)]
            if not bad:
                break
            f = rng.choice(bad)
            alive.discard(f)
            for i in range(m):
                buckets[i, f[:i] + f[i + 1:]].discard(f)
    return tuple(sorted(alive))


def neighbor_caps(proj: Iterable[Vector], m: int) -> tuple[int, ...]:
    """Per coordinate, the largest number of ``i``-neighbors any vector has."""
    caps = [0] * m
    for (i, _), b in _buckets(proj, m).items():
        caps[i] = max(caps[i], len(b) - 1)
    return tuple(caps)


def is_bds_shattered(cls: ConceptClass, seq: Sequence[int], profile: Sequence[int]) -> Optional[PseudoBoxWitness]:
    seq = check_sequence(cls, seq)
    if len(profile) != len(seq):
        raise ValueError("profile and sequence lengths differ")
    if any(n < 1 for n in profile):
        raise ValueError("profile entries must be >= 1")
    fam = core(restrict(cls, seq), profile)
    if not fam:
        return None
    return PseudoBoxWitness(seq, tuple(profile), fam)


# -- bandit DS dimension ----------------------------------------------------

def _lattice_search(proj, caps, counter: _Counter, prune: bool):
    """Max-total feasible profile over ``prod [1, caps_i]`` (lex-smallest on ties)."""
    m = len(caps)
    start = (1,) * m
    counter.tick()
    c0 = core(proj, start)
    if not c0:
        return 0, None, None
    memo = {start: c0}
    best = (sum(start), start)
    stack = [start]
    while stack:
        node = stack.pop()
        fam = memo[node]
        for i in range(m):
            if node[i] >= caps[i]:
                continue
            nxt = node[:i] + (node[i] + 1,) + node[i + 1:]
            if nxt in memo:
                counter.cache_hits += 1
                continue
            if prune and any(
                memo.get(nxt[:j] + (nxt[j] - 1,) + nxt[j + 1:], True) == ()
                for j in range(m) if nxt[j] > 1
            ):
                memo[nxt] = ()
                continue
            counter.tick()
            # the core for a larger profile lies inside the core for a smaller one
            c = core(fam if prune else proj, nxt)
            memo[nxt] = c
            if c:
                stack.append(nxt)
                key = (sum(nxt), tuple(-v for v in nxt))
                if key > (best[0], tuple(-v for v in best[1])):
                    best = (sum(nxt), nxt)
    return best[0], best[1], memo[best[1]]


def bds_dimension(cls: ConceptClass, budget: Optional[int] = None, prune: bool = True) -> DimensionReport:
    """Bandit DS dimension: the largest ``sum(N)`` over BDS-shattered ``(S, N)``.

    Only distinct-instance sets ``S`` are searched (a repeated instance has no
    ``i``-neighbors).  ``prune=False`` turns off the per-coordinate caps, the
    subset/profile downward-closure pruning and incremental cores; the answer
    must not change.
    """
    counter = _Counter(budget)
    best_total, best = 0, None
    feasible_sets: set[tuple[int, ...]] = {()}
    exhausted = False
    try:
        for size in range(1, cls.n + 1):
            found_any = False
            for S in itertools.combinations(range(cls.n), size):
                if prune and any(S[:j] + S[j + 1:] not in feasible_sets for j in range(size)):
                    continue
                proj = restrict(cls, S)
                caps = neighbor_caps(proj, size) if prune else (cls.k - 1,) * size
                if min(caps) < 1:
                    continue
                if prune and sum(caps) <= best_total and S != ():
                    # still feasible-at-ones check for the subset-closure bookkeeping
                    counter.tick()
                    if core(proj, (1,) * size):
                        feasible_sets.add(S)
                        found_any = True
                    continue
                total, prof, fam = _lattice_search(proj, caps, counter, prune)
                if prof is None:
                    continue
                feasible_sets.add(S)
                found_any = True
                if total > best_total:
                    best_total, best = total, PseudoBoxWitness(S, prof, fam)
            if prune and not found_any:
                break
    except BudgetExhausted:
        exhausted = True
    return DimensionReport("bds", best_total, best, exhausted, counter.stats())


# -- DS_L, exponential and Natarajan dimensions ------------------------------

def ds_l_dimension(cls: ConceptClass, L: int, budget: Optional[int] = None) -> DimensionReport:
    """Longest instance set with a pseudo-box of ``L`` neighbors in every direction."""
    if L < 1:
        raise ValueError("L must be >= 1")
    counter = _Counter(budget)
    best, witness, exhausted = 0, None, False
    if L >= cls.k:
        return DimensionReport(f"ds_{L}", 0, None, False, counter.stats())
    feasible: set[tuple[int, ...]] = {()}
    try:
        for size in range(1, cls.n + 1):
            level = set()
            for S in itertools.combinations(range(cls.n), size):
                if any(S[:j] + S[j + 1:] not in feasible for j in range(size)):
                    continue
                counter.tick()
                fam = core(restrict(cls, S), (L,) * size)
                if fam:
                    level.add(S)
                    if size > best:
                        best, witness = size, PseudoBoxWitness(S, (L,) * size, fam)
            if not level:
                break
            feasible |= level
    except BudgetExhausted:
        exhausted = True
    return DimensionReport(f"ds_{L}", best, witness, exhausted, counter.stats())


def l_exponential_dimension(cls: ConceptClass, L: int, budget: Optional[int] = None) -> DimensionReport:
    """Largest set ``S`` on which the class shows at least ``(L+1)^|S|`` patterns."""
    if L < 1:
        raise ValueError("L must be >= 1")
    counter = _Counter(budget)
    best, witness, exhausted = 0, (), False
    # |H|_S| <= |H| bounds the useful sizes
    top = 0
    while top < cls.n and (L + 1) ** (top + 1) <= len(cls):
        top += 1
    try:
        for size in range(top, 0, -1):
            for S in itertools.combinations(range(cls.n), size):
                counter.tick()
                if len(restrict(cls, S)) >= (L + 1) ** size:
                    best, witness = size, S
                    break
            if best:
                break
    except BudgetExhausted:
        exhausted = True
    return DimensionReport(f"exp_{L}", best, {"set": list(witness)}, exhausted, counter.stats())


def natarajan_dimension(cls: ConceptClass, budget: Optional[int] = None) -> DimensionReport:
    """Largest ``S`` with label pairs ``a_x != b_x`` whose full mixed cube is realized."""
    counter = _Counter(budget)
    best, witness, exhausted = 0, None, False
    feasible: set[tuple[int, ...]] = {()}
    try:
        for size in range(1, cls.n + 1):
            level = set()
            for S in itertools.combinations(range(cls.n), size):
                if any(S[:j] + S[j + 1:] not in feasible for j in range(size)):
                    continue
                proj = set(restrict(cls, S))
                choices = [
                    list(itertools.combinations(sorted({v[i] for v in proj}), 2))
                    for i in range(size)
                ]
                for pairs in itertools.product(*choices):
                    counter.tick()
                    if all(
                        tuple(p[b] for p, b in zip(pairs, bits)) in proj
                        for bits in itertools.product((0, 1), repeat=size)
                    ):
                        level.add(S)
                        if size > best:
                            best, witness = size, {"set": list(S), "pairs": [list(p) for p in pairs]}
                        break
            if not level:
                break
            feasible |= level
    except BudgetExhausted:
        exhausted = True
    return DimensionReport("natarajan", best, witness, exhausted, counter.stats())


def ds_shattered_sets(cls: ConceptClass, L: int) -> set[tuple[int, ...]]:
    """Every distinct-instance set that is DS_L-shattered (a downward-closed family)."""
    found: set[tuple[int, ...]] = {()}
    if L >= cls.k:
        return found
    for size in range(1, cls.n + 1):
        level = set()
        for S in itertools.combinations(range(cls.n), size):
            if all(S[:j] + S[j + 1:] in found for j in range(size)) and core(restrict(cls, S), (L,) * size):
                level.add(S)
        if not level:
            break
        found |= level
    return found


def ds_within(shattered: set[tuple[int, ...]], S: Sequence[int]) -> int:
    """DS_L of the class restricted to ``S``, given the class's shattered sets."""
    S = set(S)
    return max(len(T) for T in shattered if S.issuperset(T))


def ds_values(cls: ConceptClass, budget: Optional[int] = None) -> dict[int, int]:
    """``{L: DS_L(H)}`` for every ``L`` in ``1..K-1``."""
    return {L: ds_l_dimension(cls, L, budget).value for L in range(1, max(cls.k, 2))}


def bds_lower_bound_from_ds(cls: ConceptClass, budget: Optional[int] = None) -> DimensionReport:
    best, arg, exhausted = 0, None, False
    nodes = 0
    for L in range(1, cls.k):
        rep = ds_l_dimension(cls, L, budget)
        nodes += rep.stats["nodes"]
        exhausted |= rep.exhausted
        if L * rep.value > best:
            best, arg = L * rep.value, {"L": L, "ds": rep.value}
    return DimensionReport("bds_from_ds", best, arg, exhausted, {"nodes": nodes, "cache_hits": 0})
