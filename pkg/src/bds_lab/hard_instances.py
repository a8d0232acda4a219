"""Lower-bound constructions and Monte-Carlo estimates of the restricted error.

The pseudo-box instance puts mass ``1 - 16 eps`` on an anchor point and
spreads ``16 eps`` over the remaining witness coordinates in proportion to
their neighbor counts.  The two-point instance is the classic
``(1 - 2 eps, 2 eps)`` split.
"""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .bandit import Environment, draw_instances, epoch_schedule, list_cascade, run_streams
from .concept_class import ConceptClass, Vector
from .dimensions import PseudoBoxWitness, ds_values
from .list_learning import FiniteDistribution


class InstanceError(ValueError):
    pass


def exact_epsilon(eps) -> Fraction:
    if isinstance(eps, Fraction):
        return eps
    if isinstance(eps, int):
        return Fraction(eps)
    if isinstance(eps, str):
        return Fraction(eps)
    q = Fraction(repr(float(eps)))
    warnings.warn(f"epsilon {eps!r} converted from a float to {q}; pass a Fraction or 'p/q' for exactness",
                  stacklevel=3)
    return q


@dataclass(frozen=True)
class HardInstance:
    kind: str  # "bds" or "two_point"
    cls: ConceptClass  # working family, lifted to full hypotheses
    masses: tuple[Fraction, ...]
    epsilon: Fraction
    seq: tuple[int, ...]  # instances carrying mass, anchor first
    profile: tuple[int, ...] = ()

    @property
    def anchor(self) -> int:
        return self.seq[0]

    @property
    def rest(self) -> tuple[int, ...]:
        return self.seq[1:]

    def environment(self, target: Vector) -> Environment:
        return Environment(self.cls, FiniteDistribution(self.masses, tuple(target)))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "epsilon": str(self.epsilon),
            "seq": list(self.seq),
            "profile": list(self.profile),
            "masses": [str(p) for p in self.masses],
            "class": self.cls.to_dict(),
        }


def _lift(cls: ConceptClass, seq: Sequence[int], family: Sequence[Vector]) -> ConceptClass:
    """For each pattern on ``seq``, the smallest hypothesis of ``cls`` realizing it."""
    out = []
    for f in family:
        match = next((h for h in cls.hypotheses if all(h[s] == y for s, y in zip(seq, f))), None)
        if match is None:
            raise InstanceError(f"pattern {f} is not realized by the class")
        out.append(match)
    return ConceptClass.build(cls.k, cls.n, out)


def bds_hard_instance(cls: ConceptClass, witness: PseudoBoxWitness, eps) -> HardInstance:
    eps = exact_epsilon(eps)
    if not 0 < eps <= Fraction(1, 16):
        raise InstanceError("epsilon must lie in (0, 1/16]")
    if len(witness.seq) < 2:
        raise InstanceError("the pseudo-box instance needs at least two coordinates")
    if len(set(witness.seq)) != len(witness.seq) or not witness.validate():
        raise InstanceError("invalid pseudo-box witness")
    w = witness.canonical()
    fam = _lift(cls, w.seq, w.family)
    tail = sum(w.profile[1:])
    masses = [Fraction(0)] * cls.n
    masses[w.seq[0]] = 1 - 16 * eps
    for s, N in zip(w.seq[1:], w.profile[1:]):
        masses[s] = 16 * N * eps / tail
    return HardInstance("bds", fam, tuple(masses), eps, w.seq, w.profile)


def two_point_instance(cls: ConceptClass, eps) -> HardInstance:
    """First (h1, h2, x1, x2) in canonical order with h1(x1) = h2(x1), h1(x2) != h2(x2)."""
    eps = exact_epsilon(eps)
    if not 0 < eps <= Fraction(1, 2):
        raise InstanceError("epsilon must lie in (0, 1/2]")
    H = cls.hypotheses
    for a in range(len(H)):
        for b in range(a + 1, len(H)):
            for x1 in range(cls.n):
                if H[a][x1] != H[b][x1]:
                    continue
                for x2 in range(cls.n):
                    if H[a][x2] != H[b][x2]:
                        masses = [Fraction(0)] * cls.n
                        masses[x1] = 1 - 2 * eps
                        masses[x2] = 2 * eps
                        fam = ConceptClass.build(cls.k, cls.n, [H[a], H[b]])
                        return HardInstance("two_point", fam, tuple(masses), eps, (x1, x2))
    raise InstanceError("no two hypotheses agree on one point and disagree on another")


def lower_bound_budget(inst: HardInstance) -> int:
    if inst.kind != "bds":
        raise InstanceError("the budget formula applies to pseudo-box instances")
    return math.floor(Fraction(sum(inst.profile[1:])) / (64 * inst.epsilon))


# -- learners ---------------------------------------------------------------
# A learner maps (class, environment, rounds, seed) to a hypothesis vector.

@dataclass
class CascadeLearner:
    """ListCascade with its schedule re-split to the given number of rounds."""
    epsilon: float = 0.1
    delta: float = 0.1
    name: str = "cascade"

    def __call__(self, cls: ConceptClass, env: Environment, rounds: int, seed: int) -> Vector:
        sched = epoch_schedule(cls.k, self.epsilon, self.delta, ds_values(cls)).truncated(rounds)
        return list_cascade(cls, env, sched, seed).hypothesis


@dataclass
class GreedyConsistentLearner:
    """Keeps the hypotheses consistent with all feedback so far.

    Guesses (and finally outputs) the label most common among them at the
    current point, smallest label on ties.
    """
    name: str = "greedy"

    def __call__(self, cls: ConceptClass, env: Environment, rounds: int, seed: int) -> Vector:
        ux, _ = run_streams(seed, rounds)
        xs = draw_instances(env, ux)
        alive = list(cls.hypotheses)

        def vote(x):
            c = Counter(h[x] for h in alive)
            return min(c, key=lambda y: (-c[y], y))

        for x in xs:
            x = int(x)
            g = vote(x)
            ok = g == env.target[x]
            alive = [h for h in alive if (h[x] == g) == ok]
        return tuple(vote(x) for x in range(cls.n))


@dataclass
class OracleLearner:
    """Reads the target directly; a sanity floor, not a bandit learner."""
    name: str = "oracle"

    def __call__(self, cls, env, rounds, seed):
        return env.target


def shipped_learners() -> list:
    return [CascadeLearner(), GreedyConsistentLearner()]


# -- Monte Carlo ------------------------------------------------------------

def trial_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence([master, index]).generate_state(1, np.uint64)[0])


@dataclass
class RestrictedErrorStats:
    learner: str
    estimate: float
    std_error: float
    under_sampled: tuple[float, ...]  # empirical Pr[A_i] for the non-anchor points
    q_estimate: float  # fraction of trials with restricted error >= eps (reported only)
    trials: int
    seed: int
    budget: int

    def to_dict(self) -> dict:
        return {
            "learner": self.learner,
            "estimate": self.estimate,
            "std_error": self.std_error,
            "under_sampled": list(self.under_sampled),
            "q_estimate": self.q_estimate,
            "trials": self.trials,
            "seed": self.seed,
            "budget": self.budget,
        }


def restricted_error(h: Sequence[int], inst: HardInstance, target: Vector) -> Fraction:
    return sum((inst.masses[x] for x in inst.rest if h[x] != target[x]), Fraction(0))


def _one_trial(args):
    learner, inst, budget, seed = args
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    target = inst.cls.hypotheses[int(rng.integers(len(inst.cls)))]
    env = inst.environment(target)
    h = learner(inst.cls, env, budget, seed)
    xs = draw_instances(env, run_streams(seed, budget)[0])
    counts = np.bincount(xs, minlength=inst.cls.n) if budget else np.zeros(inst.cls.n, dtype=int)
    return restricted_error(h, inst, target), tuple(int(counts[x]) for x in inst.rest)


def expected_restricted_error(learner, inst: HardInstance, budget: int, trials: int, seed: int,
                              mapper: Callable = map) -> RestrictedErrorStats:
    """Draw ``c*`` uniformly from the family, run the learner, average the exact restricted error.

    The learner's instance stream is the trial's own, so the under-sampling
    counts describe the same draws the learner saw.
    """
    if inst.kind != "bds":
        raise InstanceError("restricted error is defined for pseudo-box instances")
    jobs = [(learner, inst, budget, trial_seed(seed, i)) for i in range(trials)]
    results = list(mapper(_one_trial, jobs))
    errs = np.asarray([float(e) for e, _ in results])
    under = []
    for j, N in enumerate(inst.profile[1:]):
        under.append(sum(1 for _, c in results if 2 * c[j] <= N) / trials)
    return RestrictedErrorStats(
        learner=getattr(learner, "name", type(learner).__name__),
        estimate=float(errs.mean()),
        std_error=float(errs.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
        under_sampled=tuple(under),
        q_estimate=float(np.mean([e >= inst.epsilon for e, _ in results])),
        trials=trials,
        seed=seed,
        budget=budget,
    )


def no_information_error(inst: HardInstance, h: Sequence[int]) -> Fraction:
    """Restricted error of a fixed ``h`` averaged over a uniform target from the family."""
    fam = inst.cls.hypotheses
    return sum((restricted_error(h, inst, c) for c in fam), Fraction(0)) / len(fam)


def two_point_miss_frequency(inst: HardInstance, budget: int, trials: int, seed: int) -> float:
    """Fraction of trials in which the light point never shows up in ``budget`` draws."""
    env = inst.environment(inst.cls.hypotheses[0])
    x2 = inst.seq[1]
    miss = 0
    for i in range(trials):
        xs = draw_instances(env, run_streams(trial_seed(seed, i), budget)[0])
        miss += not np.any(xs == x2)
    return miss / trials
