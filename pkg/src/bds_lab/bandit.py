"""Bandit-feedback protocol and the ListCascade learner.

Each epoch explores uniformly inside the previous list predictor, keeps
only the rounds whose guess was confirmed, and fits a smaller list
predictor (prefix majority of one-inclusion list learners) on them.  After
``floor(log2 K)`` epochs the lists are singletons.

Randomness: round ``i`` of a run consumes element ``i`` of two streams
(instance draw, guess draw) spawned from the run seed, so a round's
randomness depends only on ``(seed, i)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .concept_class import ConceptClass, Vector
from .list_learning import (
    FiniteDistribution,
    ListHypothesis,
    OneInclusionListLearner,
    as_fraction,
    list_error,
    prefix_majority,
)


@dataclass(frozen=True)
class Environment:
    cls: ConceptClass
    dist: FiniteDistribution

    def __post_init__(self):
        if self.dist.n != self.cls.n:
            raise ValueError("distribution and class have different domains")
        if self.dist.target not in self.cls:
            raise ValueError("target is not in the class (environment not realizable)")

    @property
    def target(self) -> Vector:
        return self.dist.target

    def cdf(self) -> np.ndarray:
        c = np.cumsum(np.asarray([float(p) for p in self.dist.masses]))
        return c / c[-1]


def environment_from_dict(cls: ConceptClass, data: dict) -> Environment:
    """``{"masses": [...], "target": [labels] | index}``; masses may be numbers or ``"p/q"`` strings."""
    masses = tuple(as_fraction(p) for p in data["masses"])
    tgt = data["target"]
    if isinstance(tgt, int) and not isinstance(tgt, bool):
        if not 0 <= tgt < len(cls):
            raise ValueError(f"target index {tgt} out of range")
        target = cls.hypotheses[tgt]
    else:
        target = tuple(int(y) for y in tgt)
    return Environment(cls, FiniteDistribution(masses, target))


def load_environment(cls: ConceptClass, path) -> Environment:
    # decimal literals parse straight to exact rationals
    data = json.loads(Path(path).read_text(), parse_float=Fraction)
    return environment_from_dict(cls, data)


def evaluate_hypothesis(h: Sequence[int], env: Environment) -> Fraction:
    if len(h) != env.dist.n:
        raise ValueError("hypothesis and environment have different domains")
    return sum(
        (p for x, p in enumerate(env.dist.masses) if p and h[x] != env.target[x]),
        Fraction(0),
    )


def sample_round(env: Environment, rng: np.random.Generator) -> tuple[int, int]:
    x = int(np.searchsorted(env.cdf(), rng.random(), side="right"))
    return x, env.target[x]


def draw_instances(env: Environment, uniforms: np.ndarray) -> np.ndarray:
    return np.searchsorted(env.cdf(), uniforms, side="right").astype(np.int64)


def run_streams(seed: int, rounds: int) -> tuple[np.ndarray, np.ndarray]:
    inst, guess = np.random.SeedSequence(seed).spawn(2)
    return (np.random.default_rng(inst).random(rounds),
            np.random.default_rng(guess).random(rounds))


# -- schedule ---------------------------------------------------------------

@dataclass(frozen=True)
class EpochSchedule:
    K: int
    epsilon: float
    delta: float
    scale: float
    list_sizes: tuple[int, ...]  # L_0 .. L_T
    budgets: tuple[int, ...]  # rounds in epochs 1..T
    targets: tuple[float, ...]  # n_t, before scaling
    ds_used: tuple[tuple[int, int], ...]  # (ceil(L_{t-1}/2), DS value) per epoch

    @property
    def epochs(self) -> int:
        return len(self.budgets)

    @property
    def total(self) -> int:
        return sum(self.budgets)

    def scaled_target(self, t: int) -> int:
        return math.ceil(self.scale * self.targets[t - 1])

    def truncated(self, total: int) -> "EpochSchedule":
        """Same schedule with the rounds re-split (largest remainder) to sum to ``total``."""
        if total < 0:
            raise ValueError("negative budget")
        base = self.total or 1
        raw = [Fraction(b * total, base) for b in self.budgets]
        parts = [int(r) for r in raw]
        order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - parts[i]), i))
        for i in order[: total - sum(parts)]:
            parts[i] += 1
        return EpochSchedule(self.K, self.epsilon, self.delta, self.scale, self.list_sizes,
                             tuple(parts), self.targets, self.ds_used)

    def to_dict(self) -> dict:
        return {
            "K": self.K,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "scale": self.scale,
            "list_sizes": list(self.list_sizes),
            "budgets": list(self.budgets),
            "targets": list(self.targets),
            "ds_used": [list(p) for p in self.ds_used],
        }


def list_size(K: int, t: int) -> int:
    return -(-K // (1 << (t + 1)))


def epoch_schedule(K: int, epsilon: float, delta: float, ds_values: Mapping[int, int],
                   scale: float = 1.0) -> EpochSchedule:
    """Epoch list sizes and round budgets.

    ``ds_values`` maps ``L`` to ``DS_L`` of the class; epoch ``t`` needs
    ``L = ceil(L_{t-1}/2)``.  Logarithms are base 2.
    """
    if K < 2:
        raise ValueError("bandit learning needs K >= 2")
    if not (0 < epsilon < 1 and 0 < delta < 1):
        raise ValueError("epsilon and delta must lie in (0, 1)")
    if not 0 < scale <= 1:
        raise ValueError("scale must lie in (0, 1]")
    T = K.bit_length() - 1
    lg = math.log2(K)
    conf = math.log2(2 * lg / delta)
    sizes = tuple(list_size(K, t) for t in range(T + 1))
    budgets, targets, used = [], [], []
    for t in range(1, T + 1):
        prev = sizes[t - 1]
        key = -(-prev // 2)
        if key not in ds_values:
            raise KeyError(f"missing DS_{key} value")
        d = ds_values[key]
        denom = 1 - (t - 1) * epsilon / lg
        if denom <= 0:
            raise ValueError(f"(t-1)*epsilon >= log2 K at epoch {t}")
        n_t = 10 * (6 * d * lg + conf) * lg / epsilon
        budgets.append(math.ceil(scale * (4 * prev / denom) * (n_t + conf)))
        targets.append(n_t)
        used.append((key, d))
    return EpochSchedule(K, epsilon, delta, scale, sizes, tuple(budgets), tuple(targets), tuple(used))


# -- the cascade ------------------------------------------------------------

@dataclass(frozen=True)
class TranscriptEntry:
    round: int
    x: int
    guess: int
    feedback: int


@dataclass
class EpochStats:
    epoch: int
    list_size: int  # L_t used by the learners
    cap: int  # size of the emitted lists
    rounds: int
    collected: int
    target: int
    shortfall: bool
    fallback: bool
    truncated: int
    list_error: Fraction
    lists: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {
            "epoch": self.epoch,
            "list_size": self.list_size,
            "cap": self.cap,
            "rounds": self.rounds,
            "collected": self.collected,
            "target": self.target,
            "shortfall": self.shortfall,
            "fallback": self.fallback,
            "truncated": self.truncated,
            "list_error": str(self.list_error),
            "lists": [list(l) for l in self.lists],
        }


@dataclass
class CascadeResult:
    hypothesis: Vector
    epochs: list[EpochStats]
    seed: int
    xs: np.ndarray
    guesses: np.ndarray
    feedback: np.ndarray
    error: Fraction

    @property
    def transcript(self) -> list[TranscriptEntry]:
        return [TranscriptEntry(i, int(x), int(g), int(f))
                for i, (x, g, f) in enumerate(zip(self.xs, self.guesses, self.feedback))]

    @property
    def flagged(self) -> int:
        return sum(1 for e in self.epochs if e.fallback or e.shortfall)

    def to_dict(self, transcript: bool = False) -> dict:
        out = {
            "seed": self.seed,
            "hypothesis": list(self.hypothesis),
            "error": str(self.error),
            "error_float": float(self.error),
            "rounds": int(len(self.xs)),
            "epochs": [e.to_dict() for e in self.epochs],
        }
        if transcript:
            out["transcript"] = [[int(x), int(g), int(f)]
                                 for x, g, f in zip(self.xs, self.guesses, self.feedback)]
        return out


def fallback_truncate(lst: Sequence[int], supported, cap: int) -> tuple[int, ...]:
    """Shorten a list to ``cap`` labels, keeping labels the class uses at this point first."""
    order = sorted(range(len(lst)), key=lambda j: (lst[j] not in supported, j))
    return tuple(lst[j] for j in sorted(order[:cap]))


def list_cascade(cls: ConceptClass, env: Environment, schedule: EpochSchedule, seed: int,
                 prefix_mode: str = "exclusive") -> CascadeResult:
    """Run ListCascade for ``schedule.total`` rounds against ``env``."""
    K = cls.k
    if schedule.K != K:
        raise ValueError("schedule was built for a different K")
    if env.cls != cls:
        raise ValueError("environment uses a different class")
    target = np.asarray(env.target, dtype=np.int64)
    ux, ug = run_streams(seed, schedule.total)
    xs = draw_instances(env, ux)
    guesses = np.zeros(schedule.total, dtype=np.int64)
    current = ListHypothesis(tuple(tuple(range(1, K + 1)) for _ in range(cls.n)), K)
    stats: list[EpochStats] = []
    support = [set(cls.labels_at(x)) for x in range(cls.n)]
    start = 0
    for t in range(1, schedule.epochs + 1):
        stop = start + schedule.budgets[t - 1]
        ex = xs[start:stop]
        lens = np.asarray([len(l) for l in current.table], dtype=np.int64)
        table = np.zeros((cls.n, K), dtype=np.int64)
        for x, l in enumerate(current.table):
            table[x, : len(l)] = l
        picks = np.minimum((ug[start:stop] * lens[ex]).astype(np.int64), lens[ex] - 1)
        g = table[ex, picks]
        guesses[start:stop] = g
        hit = g == target[ex]
        kept = [(int(x), int(target[x])) for x in ex[hit]]
        L_t = schedule.list_sizes[t]
        cap = min(2 * L_t - 1, K)
        truncated = 0
        if kept:
            learner = OneInclusionListLearner(cls, L_t)
            vote = prefix_majority(learner, kept, K, prefix_mode, cap)
            current, truncated = vote.hypothesis, vote.truncated
        else:
            current = ListHypothesis(tuple(fallback_truncate(l, support[x], cap)
                                           for x, l in enumerate(current.table)), cap)
        goal = schedule.scaled_target(t)
        stats.append(EpochStats(
            epoch=t, list_size=L_t, cap=cap, rounds=stop - start, collected=len(kept),
            target=goal, shortfall=len(kept) < goal, fallback=not kept, truncated=truncated,
            list_error=list_error(current, env.dist), lists=current.table,
        ))
        start = stop
    h = tuple(l[0] for l in current.table)
    feedback = (guesses == target[xs]).astype(np.int64)
    return CascadeResult(h, stats, seed, xs, guesses, feedback, evaluate_hypothesis(h, env))
