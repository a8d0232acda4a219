"""Verification suites: each case compares two quantities and never aborts the run."""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from ..bandit import EpochSchedule, epoch_schedule, list_cascade
from ..concept_class import ConceptClass, restrict
from ..dimensions import bds_dimension, ds_l_dimension, ds_shattered_sets, ds_values, ds_within, l_exponential_dimension
from ..hard_instances import (
    OracleLearner,
    bds_hard_instance,
    expected_restricted_error,
    lower_bound_budget,
    shipped_learners,
    two_point_instance,
    two_point_miss_frequency,
)
from ..list_learning import OneInclusionListLearner, loo_error_exact
from .bounds import binomial_slack, chernoff_lower_tail, exp_dim_bound, loo_bound, sauer_bound
from .config import CorpusEntry, CorpusSpec, ExperimentConfig, corpus_entries
from .runtime import derive_seed

TOL = 1e-12


@dataclass
class VerificationReport:
    suite: str
    cases: list = field(default_factory=list)
    corpus: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @property
    def failed(self) -> int:
        return sum(1 for c in self.cases if not c["passed"])

    @property
    def passed(self) -> int:
        return len(self.cases) - self.failed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "corpus": self.corpus,
            "counts": {"cases": len(self.cases), "passed": self.passed, "failed": self.failed},
            "extra": self.extra,
            "cases": self.cases,
        }

    def summary(self) -> str:
        return f"{self.suite}: {self.passed}/{len(self.cases)} passed" + ("" if self.ok else f", {self.failed} FAILED")


def _case(case_id, passed, lhs, rhs, relation="<=", **detail):
    out = {"case": case_id, "passed": bool(passed), "lhs": lhs, "rhs": rhs, "relation": relation}
    out.update(detail)
    return out


def _repro(suite: str, spec: CorpusSpec, index: int) -> str:
    cmd = (f"bds-lab verify --suite {suite} --corpus-size {spec.size} --corpus-seed {spec.seed} "
           f"--max-k {spec.max_k} --max-n {spec.max_n}")
    if spec.max_count is not None:
        cmd += f" --max-count {spec.max_count}"
    if suite == "loo":
        cmd += f" --loo-samples {spec.loo_samples} --max-sample {spec.max_sample}"
    return cmd + f" --case {index}"


def _entry_desc(e: CorpusEntry) -> dict:
    return {"index": e.index, "n": e.n, "k": e.k, "size": e.count, "seed": e.seed}


# -- corpus suites ----------------------------------------------------------

def exp_ds_cases(entry: CorpusEntry) -> list[dict]:
    cls = entry.build()
    out = []
    for L in range(1, cls.k):
        d = ds_l_dimension(cls, -(-L // 2)).value
        dE = l_exponential_dimension(cls, L).value
        if d >= 1:
            rhs = exp_dim_bound(d, cls.k)
            out.append(_case(f"class{entry.index}/L{L}", dE <= rhs + TOL, dE, rhs, ds=d))
        else:
            out.append(_case(f"class{entry.index}/L{L}", dE == 0, dE, 0, "==", ds=0))
    return out


def sauer_cases(entry: CorpusEntry) -> list[dict]:
    cls = entry.build()
    out = []
    for L in range(1, cls.k):
        shattered = ds_shattered_sets(cls, -(-L // 2))
        worst = None
        checked = 0
        ok = True
        for size in range(1, cls.n + 1):
            for S in itertools.combinations(range(cls.n), size):
                d = ds_within(shattered, S)
                if d < 1:
                    continue
                checked += 1
                lhs, rhs = len(restrict(cls, S)), sauer_bound(L, cls.k, size, d)
                ok &= lhs <= rhs + TOL
                if worst is None or lhs / rhs > worst[0]:
                    worst = (lhs / rhs, lhs, rhs, S, d)
        if worst is None:
            out.append(_case(f"class{entry.index}/L{L}", True, None, None, skipped=True))
        else:
            _, lhs, rhs, S, d = worst
            out.append(_case(f"class{entry.index}/L{L}", ok, lhs, rhs, tightest_set=list(S), ds=d, sets_checked=checked))
    return out


def loo_samples(entry: CorpusEntry, spec: CorpusSpec, cls: ConceptClass) -> list[list[tuple[int, int]]]:
    rng = random.Random(derive_seed(spec.seed, entry.index, 1))
    out = []
    for _ in range(spec.loo_samples):
        h = cls.hypotheses[rng.randrange(len(cls))]
        size = rng.randint(1, spec.max_sample)
        out.append([(x, h[x]) for x in (rng.randrange(cls.n) for _ in range(size))])
    return out


def loo_cases(args) -> list[dict]:
    entry, spec = args
    cls = entry.build()
    ds = {}
    learners = {}
    out = []
    for s, sample in enumerate(loo_samples(entry, spec, cls)):
        for L in range(1, cls.k):
            half = -(-L // 2)
            if half not in ds:
                ds[half] = ds_l_dimension(cls, half).value
            lr = learners.setdefault(L, OneInclusionListLearner(cls, L))
            loo = loo_error_exact(cls, sample, L, lr)
            rhs = loo_bound(ds[half], cls.k, len(sample))
            out.append(_case(f"class{entry.index}/sample{s}/L{L}", float(loo) <= rhs + TOL, str(loo), rhs,
                             ds=ds[half], sample=[list(p) for p in sample]))
    return out


_SUITES: dict[str, Callable] = {"exp-ds": exp_ds_cases, "sauer": sauer_cases, "loo": loo_cases}


def run_corpus_suite(name: str, spec: CorpusSpec, mapper: Callable = map, case: Optional[int] = None) -> VerificationReport:
    entries = corpus_entries(spec)
    if case is not None:
        entries = [entries[case]]
    fn = _SUITES[name]
    jobs = [(e, spec) for e in entries] if name == "loo" else entries
    report = VerificationReport(name, corpus={**spec.__dict__, "entries": len(entries)})
    for entry, cases in zip(entries, mapper(fn, jobs)):
        for c in cases:
            c["class"] = _entry_desc(entry)
            if not c["passed"]:
                c["repro"] = _repro(name, spec, entry.index)
            report.cases.append(c)
    return report


def verify_exp_ds(spec: CorpusSpec, mapper: Callable = map, case: Optional[int] = None) -> VerificationReport:
    return run_corpus_suite("exp-ds", spec, mapper, case)


def verify_sauer(spec: CorpusSpec, mapper: Callable = map, case: Optional[int] = None) -> VerificationReport:
    return run_corpus_suite("sauer", spec, mapper, case)


def verify_loo(spec: CorpusSpec, mapper: Callable = map, case: Optional[int] = None) -> VerificationReport:
    return run_corpus_suite("loo", spec, mapper, case)


# -- cascade PAC ------------------------------------------------------------

def _cascade_trial(args):
    cls, env, schedule, seed, mode = args
    res = list_cascade(cls, env, schedule, seed, mode)
    return res.error, tuple(e.list_error for e in res.epochs), res.flagged, tuple(e.collected for e in res.epochs)


def chernoff_annotation(schedule: EpochSchedule) -> list[dict]:
    """Per epoch: expected confirmed rounds (at the inductive error level) and the
    lower-tail bound on falling short of the scaled target."""
    lg = math.log2(schedule.K)
    out = []
    for t in range(1, schedule.epochs + 1):
        prev = schedule.list_sizes[t - 1]
        mu = schedule.budgets[t - 1] * (1 - (t - 1) * schedule.epsilon / lg) / (2 * prev)
        goal = schedule.scale * schedule.targets[t - 1]
        rel = 1 - goal / mu if mu > 0 else 0
        out.append({
            "epoch": t,
            "expected_confirmed_lower": mu,
            "target": goal,
            "shortfall_bound": chernoff_lower_tail(mu, rel) if 0 < rel < 1 else None,
        })
    return out


def verify_cascade_pac(config: ExperimentConfig, mapper: Callable = map) -> VerificationReport:
    cls = config.load_class()
    env = config.load_environment(cls)
    ds = ds_values(cls)
    schedule = epoch_schedule(cls.k, config.epsilon, config.delta, ds, config.scale)
    jobs = [(cls, env, schedule, derive_seed(config.seed, i), config.prefix_mode) for i in range(config.trials)]
    results = list(mapper(_cascade_trial, jobs))
    n = len(results)
    eps, delta = config.epsilon, config.delta
    lg = math.log2(cls.k)
    report = VerificationReport("cascade", corpus={"class": config.resolved()["class"], "trials": n})
    fail = sum(1 for err, *_ in results if err > Fraction(eps).limit_denominator(10 ** 12)) / n
    report.cases.append(_case("final_error_rate", fail <= delta + binomial_slack(delta, n) + TOL,
                              fail, delta + binomial_slack(delta, n), threshold_eps=eps))
    for t in range(1, schedule.epochs + 1):
        level, conf = t * eps / lg, t * delta / lg
        freq = sum(1 for _, lists, *_ in results if float(lists[t - 1]) > level + TOL) / n
        rhs = conf + binomial_slack(min(conf, 1.0), n)
        report.cases.append(_case(f"epoch{t}_list_error", freq <= rhs + TOL, freq, rhs, error_level=level))
    report.extra = {
        "schedule": schedule.to_dict(),
        "total_rounds": schedule.total,
        "chernoff": chernoff_annotation(schedule),
        "mean_error": sum(float(r[0]) for r in results) / n,
        "flagged_epochs": sum(r[2] for r in results),
        "mean_collected": [sum(r[3][t] for r in results) / n for t in range(schedule.epochs)],
    }
    return report


# -- lower bound ------------------------------------------------------------

@dataclass
class LowerBoundConfig:
    profile: tuple = (1, 2, 2)
    epsilon: Fraction = Fraction(1, 32)
    trials: int = 1000
    seed: int = 0
    two_point_epsilon: Fraction = Fraction(1, 10)
    two_point_budget: int = 10
    two_point_trials: int = 2000


def box_class(profile) -> ConceptClass:
    """The product class ``prod_i {1..N_i+1}``: every member has exactly ``N_i`` i-neighbors."""
    K = max(profile) + 1
    return ConceptClass.build(K, len(profile), itertools.product(*(range(1, N + 2) for N in profile)))


def verify_lower_bound(cfg: LowerBoundConfig = LowerBoundConfig(), mapper: Callable = map) -> VerificationReport:
    cls = box_class(cfg.profile)
    witness = bds_dimension(cls).witness
    inst = bds_hard_instance(cls, witness, cfg.epsilon)
    budget = lower_bound_budget(inst)
    report = VerificationReport("lower-bound", corpus={
        "profile": list(inst.profile), "epsilon": str(cfg.epsilon), "trials": cfg.trials, "budget": budget,
        "masses": [str(p) for p in inst.masses]})
    floor = 3 * float(cfg.epsilon)
    a_floor = 0.5 - binomial_slack(0.5, cfg.trials)
    stats = []
    for learner in shipped_learners() + [OracleLearner()]:
        st = expected_restricted_error(learner, inst, budget, cfg.trials, cfg.seed, mapper)
        stats.append(st.to_dict())
        if isinstance(learner, OracleLearner):
            report.cases.append(_case(f"{st.learner}/restricted_error", True, st.estimate, floor, ">=", excluded=True))
        else:
            report.cases.append(_case(f"{st.learner}/restricted_error", st.estimate >= floor, st.estimate, floor, ">="))
        for x, freq in zip(inst.rest, st.under_sampled):
            report.cases.append(_case(f"{st.learner}/undersampled_x{x}", freq >= a_floor, freq, a_floor, ">="))
    tp = two_point_instance(cls, cfg.two_point_epsilon)
    p = float((1 - 2 * tp.epsilon) ** cfg.two_point_budget)
    freq = two_point_miss_frequency(tp, cfg.two_point_budget, cfg.two_point_trials, cfg.seed)
    slack = binomial_slack(p, cfg.two_point_trials)
    report.cases.append(_case("two_point/miss_probability", abs(freq - p) <= slack, freq, p, "~=", tolerance=slack))
    report.extra = {"learners": stats, "two_point_masses": [str(m) for m in tp.masses]}
    return report
