"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""
from __future__ import annotations

import itertools
import time

import pytest

from bds_lab import cli
from bds_lab.concept_class import ConceptClass, full_class, random_class, save
from bds_lab.dimensions import bds_dimension, ds_l_dimension, l_exponential_dimension
from bds_lab.harness import verify as V
from bds_lab.harness.config import CorpusSpec, ExperimentConfig, corpus_entries
from bds_lab.harness.runtime import mapper, worker_count
from bds_lab.one_inclusion import build_graph, min_max_outdegree_orientation

import properties
from oracles import brute_min_max_outdegree, naive_bds


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def test_criterion_1_dimension_oracle(report):
    t0 = time.time()
    cube = list(itertools.product((1, 2, 3), repeat=2))
    total = agree = 0
    for r in range(1, len(cube) + 1):
        for fam in itertools.combinations(cube, r):
            cls = ConceptClass.build(3, 2, fam)
            total += 1
            agree += bds_dimension(cls).value == naive_bds(cls.hypotheses, 2, 3)
    dt = time.time() - t0
    report(1, total == 511 and agree == total and dt < 300,
           f"{agree}/{total} classes agree with the naive enumerator in {dt:.1f}s (limit 300s)")


def test_criterion_2_closed_forms(report):
    bad = []
    for n in (1, 2, 3):
        for K in (2, 3, 4):
            v = bds_dimension(full_class(n, K)).value
            if v != n * (K - 1):
                bad.append(f"BDS(full({n},{K}))={v}")
    for d in (1, 2):
        for L in (1, 2, 3):
            v = ds_l_dimension(full_class(d, L + 1), L).value
            if v != d:
                bad.append(f"DS_{L}(full({d},{L + 1}))={v}")
    exp = {L: l_exponential_dimension(full_class(2, 3), L).value for L in (1, 2, 3)}
    if exp != {1: 2, 2: 2, 3: 0}:
        bad.append(f"E_L(full(2,3))={exp}")
    report(2, not bad, "all closed forms exact" if not bad else "; ".join(bad))


def test_criterion_3_orientation_optimality(report):
    t0 = time.time()
    graphs = checks = mismatches = 0
    for entry in corpus_entries(CorpusSpec()):
        cls = entry.build()
        g = build_graph(cls.hypotheses)
        if len(g.vertices) > 12 or len(g.edges) > 20:
            continue
        graphs += 1
        for L in range(1, cls.k):
            checks += 1
            mismatches += min_max_outdegree_orientation(g, L)[1] != brute_min_max_outdegree(list(cls.hypotheses), L)
    dt = time.time() - t0
    report(3, graphs >= 200 and mismatches == 0 and dt < 120,
           f"{graphs} graphs, {checks} (graph, L) pairs, {mismatches} mismatches, {dt:.1f}s (limit 120s)")


def test_criterion_4_corpus_suites(report):
    t0 = time.time()
    spec = CorpusSpec()
    with mapper(worker_count()) as m:
        reps = [V.verify_exp_ds(spec, m), V.verify_sauer(spec, m), V.verify_loo(spec, m)]
    dt = time.time() - t0
    failed = sum(r.failed for r in reps)
    summary = ", ".join(f"{r.suite} {r.passed}/{len(r.cases)}" for r in reps)
    report(4, failed == 0 and dt < 600, f"{summary} over {spec.size} classes in {dt:.1f}s (limit 600s)")


def test_criterion_5_cascade_pac(report):
    t0 = time.time()
    cfg = ExperimentConfig(epsilon=0.1, delta=0.2, scale=1.0, trials=200)
    with mapper(worker_count()) as m:
        rep = V.verify_cascade_pac(cfg, m)
    dt = time.time() - t0
    final = rep.cases[0]
    feasible = rep.extra["total_rounds"] <= 10 ** 6
    report(5, rep.ok and feasible and final["rhs"] == pytest.approx(0.285, abs=1e-3) and dt < 900,
           f"failure rate {final['lhs']:.3f} <= {final['rhs']:.3f}; {rep.extra['total_rounds']} rounds per run; "
           f"epoch envelopes {'ok' if rep.ok else 'violated'}; {dt:.1f}s (limit 900s)")


def test_criterion_6_lower_bound(report):
    t0 = time.time()
    with mapper(worker_count()) as m:
        rep = V.verify_lower_bound(V.LowerBoundConfig(trials=1000), m)
    dt = time.time() - t0
    errs = {c["case"].split("/")[0]: c["lhs"] for c in rep.cases
            if c["case"].endswith("restricted_error") and not c.get("excluded")}
    tp = [c for c in rep.cases if c["case"].startswith("two_point")][0]
    report(6, rep.ok and rep.corpus["budget"] == 2 and dt < 300,
           f"restricted error {', '.join(f'{k}={v:.4f}' for k, v in errs.items())} vs 3eps=0.09375; "
           f"(oracle excluded: reads the target); two-point {tp['lhs']:.4f} vs {tp['rhs']:.4f}; {dt:.1f}s (limit 300s)")


def test_criterion_7_determinism(report, tmp_path):
    save(random_class(3, 4, 20, 4), tmp_path / "k4.json")
    save(full_class(2, 3), tmp_path / "full.json")
    (tmp_path / "env.json").write_text('{"masses": ["1/2", "3/10", "1/5"], "target": 5}')
    w = tmp_path / "w.json"
    cli.main(["dim", "--class", str(tmp_path / "full.json"), "--witness", "--out", str(w)])
    commands = {
        "dim.json": ["dim", "--class", str(tmp_path / "full.json")],
        "cascade.json": ["cascade", "--class", str(tmp_path / "k4.json"), "--env", str(tmp_path / "env.json"),
                         "--scale", "0.01", "--seed", "7"],
        "hard.csv": ["hard", "--class", str(tmp_path / "full.json"), "--witness", str(w), "--trials", "100",
                     "--format", "csv"],
        "verify.json": ["verify", "--suite", "all", "--corpus-size", "20", "--trials", "30", "--lb-trials", "100"],
        "sweep.csv": ["sweep", "--trials", "10", "--scales", "0.001,0.003", "--epsilons", "0.1,0.2"],
    }
    diffs = []
    for name, argv in commands.items():
        outputs = []
        for run, workers in enumerate((1, 2, 1)):
            d = tmp_path / f"run{run}"
            d.mkdir(exist_ok=True)
            rc = cli.main(argv + ["--workers", str(workers), "--out", str(d / name)])
            files = [d / name] + ([d / "sweep.svg", d / "sweep.png"] if name == "sweep.csv" else [])
            outputs.append((rc, [f.read_bytes() for f in files]))
        if not outputs[0] == outputs[1] == outputs[2]:
            diffs.append(name)
    report(7, not diffs, f"{len(commands)} commands byte-identical across runs and worker counts 1/2"
           if not diffs else f"outputs differ: {diffs}")


def test_criterion_8_invariants(report):
    properties.EXECUTED.clear()
    for prop in properties.ALL:
        prop()
    total = sum(properties.EXECUTED.values())
    report(8, total >= 10 ** 4, f"{len(properties.ALL)} properties, {total} generated cases (need >= 10000)")
