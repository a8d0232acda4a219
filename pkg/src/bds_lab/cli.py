"""Command line entry point: ``bds-lab <command> [options]``."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import __version__
from .bandit import epoch_schedule, list_cascade
from .concept_class import ConceptClass, dumps, load, restrict
from .dimensions import (
    PseudoBoxWitness,
    bds_dimension,
    bds_lower_bound_from_ds,
    ds_l_dimension,
    ds_values,
    l_exponential_dimension,
    natarajan_dimension,
)
from .hard_instances import (
    CascadeLearner,
    GreedyConsistentLearner,
    OracleLearner,
    bds_hard_instance,
    expected_restricted_error,
    lower_bound_budget,
    no_information_error,
    two_point_instance,
    two_point_miss_frequency,
)
from .harness import verify as suites
from .harness.config import CorpusSpec, ExperimentConfig
from .harness.runtime import config_hash, dump_json, mapper, meta, worker_count
from .harness.svg import PlotSpec, render_svg
from .list_learning import OneInclusionListLearner, as_fraction, prefix_majority
from .one_inclusion import avg_l_degree, build_graph, min_max_outdegree_orientation

LEARNERS = {"cascade": CascadeLearner, "greedy": GreedyConsistentLearner, "oracle": OracleLearner}
SUITE_NAMES = ("exp-ds", "sauer", "loo", "cascade", "lower-bound")


class UsageError(Exception):
    pass


# -- shared plumbing --------------------------------------------------------

def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _class_desc(cls: ConceptClass) -> dict:
    return {"sha256": _sha(dumps(cls)), "k": cls.k, "n": cls.n, "size": len(cls)}


def _need_class(args) -> ConceptClass:
    if not args.class_file:
        raise UsageError("--class FILE is required")
    return load(args.class_file)


def _experiment(args) -> ExperimentConfig:
    """Config file (if any) overridden by explicit flags."""
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    if args.class_file:
        cfg.class_source = str(args.class_file)
        if not args.env:
            cfg.environment = None
    if args.env:
        cfg.environment = str(args.env)
    for name in ("epsilon", "delta", "scale", "seed", "trials"):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, name, float(as_fraction(v)) if name in ("epsilon", "delta", "scale") else v)
    if getattr(args, "prefix_mode", None):
        cfg.prefix_mode = args.prefix_mode
    return cfg


def _csv_text(command: str, config: dict, seed, header, rows) -> str:
    buf = io.StringIO()
    buf.write(f"# bds-lab {command} config_sha256={config_hash(config)} seed={seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(args, command: str, config: dict, seed, result: dict, table=None) -> None:
    """Write ``result`` as JSON (with metadata) or ``table = (header, rows)`` as CSV."""
    if args.format == "csv":
        if table is None:
            raise UsageError(f"{command} has no CSV form")
        _emit(args, _csv_text(command, config, seed, *table))
    else:
        _emit(args, dump_json({"meta": meta(command, config, seed), "result": result}))


def _workers(args) -> int:
    return worker_count(args.workers)


# -- commands ---------------------------------------------------------------

def cmd_dim(args) -> int:
    cls = _need_class(args)
    config = {"class": _class_desc(cls), "which": args.which, "L": args.L, "budget": args.budget}
    if args.witness:
        rep = bds_dimension(cls, args.budget)
        if rep.witness is None:
            raise UsageError("the class has bandit DS dimension 0; there is no pseudo-box witness")
        doc = {"meta": meta("dim --witness", config, None), "class": _class_desc(cls), "value": rep.value,
               "lower_bound_only": rep.exhausted, **rep.witness.to_dict()}
        _emit(args, dump_json(doc))
        return 0
    Ls = [args.L] if args.L is not None else list(range(1, cls.k))
    reports = []
    if args.which in ("all", "bds"):
        reports.append(("bds", None, bds_dimension(cls, args.budget)))
    if args.which in ("all", "natarajan"):
        reports.append(("natarajan", None, natarajan_dimension(cls, args.budget)))
    if args.which in ("all", "ds"):
        reports += [("ds", L, ds_l_dimension(cls, L, args.budget)) for L in Ls]
    if args.which in ("all", "exp"):
        reports += [("exp", L, l_exponential_dimension(cls, L, args.budget)) for L in Ls]
    if args.which in ("all", "lower"):
        reports.append(("bds_lower_bound_from_ds", None, bds_lower_bound_from_ds(cls, args.budget)))
    result = {"class": _class_desc(cls),
              "dimensions": [{"kind": name, "L": L, **r.to_dict()} for name, L, r in reports]}
    rows = [[name, "" if L is None else L, r.value, int(r.exhausted)] for name, L, r in reports]
    _report(args, "dim", config, None, result, (["dimension", "L", "value", "lower_bound_only"], rows))
    return 0


def _parse_seq(text: Optional[str], n: int) -> tuple[int, ...]:
    if text is None:
        return tuple(range(n))
    return tuple(int(s) for s in text.split(",") if s.strip())


def cmd_orient(args) -> int:
    cls = _need_class(args)
    if args.L is None:
        raise UsageError("--L is required")
    seq = _parse_seq(args.seq, cls.n)
    graph = build_graph(restrict(cls, seq))
    sigma, best = min_max_outdegree_orientation(graph, args.L)
    config = {"class": _class_desc(cls), "L": args.L, "seq": list(seq)}
    result = {
        "seq": list(seq),
        "vertices": len(graph.vertices),
        "edges": len(graph.edges),
        "avg_l_degree": str(avg_l_degree(graph, args.L)),
        "max_outdegree": best,
        "orientation": sigma.to_dict(graph),
    }
    rows = [[e["direction"], " ".join(map(str, e["pattern"])), len(e["members"]),
             ";".join(" ".join(map(str, v)) for v in e["selected"])] for e in result["orientation"]]
    _report(args, "orient", config, None, result, (["direction", "pattern", "size", "selected"], rows))
    return 0


def cmd_learn(args) -> int:
    cls = _need_class(args)
    if not args.sample:
        raise UsageError("--sample FILE is required")
    if args.L is None:
        raise UsageError("--L is required")
    sample_text = Path(args.sample).read_text()
    sample = [(int(x), int(y)) for x, y in json.loads(sample_text)]
    learner = OneInclusionListLearner(cls, args.L)
    queries = [args.query] if args.query is not None else list(range(cls.n))
    config = {"class": _class_desc(cls), "sample_sha256": _sha(sample_text), "L": args.L,
              "query": args.query, "prefix_majority": args.prefix_majority, "prefix_mode": args.prefix_mode}
    if args.prefix_majority:
        out = prefix_majority(learner, sample, cls.k, args.prefix_mode or "exclusive")
        preds = {x: out.hypothesis.table[x] for x in queries}
        extra = {"cap": out.hypothesis.cap, "voters": out.voters, "truncated": out.truncated}
    else:
        preds = {x: learner.predict(sample, x) for x in queries}
        extra = {}
    result = {"predictions": [{"x": x, "list": list(l)} for x, l in preds.items()], **extra}
    rows = [[x, " ".join(map(str, l))] for x, l in preds.items()]
    _report(args, "learn", config, None, result, (["x", "list"], rows))
    return 0


def cmd_cascade(args) -> int:
    cfg = _experiment(args)
    cls = cfg.load_class()
    env = cfg.load_environment(cls)
    schedule = epoch_schedule(cls.k, cfg.epsilon, cfg.delta, ds_values(cls), cfg.scale)
    if args.max_rounds is not None and schedule.total > args.max_rounds:
        schedule = schedule.truncated(args.max_rounds)
    res = list_cascade(cls, env, schedule, cfg.seed, cfg.prefix_mode)
    config = {k: v for k, v in cfg.resolved().items() if k in
              ("class", "environment", "epsilon", "delta", "scale", "prefix_mode")}
    config["max_rounds"] = args.max_rounds
    result = {"schedule": schedule.to_dict(), **res.to_dict(transcript=args.transcript)}
    rows = [[e.epoch, e.list_size, e.cap, e.rounds, e.collected, e.target, int(e.shortfall), int(e.fallback),
             e.truncated, str(e.list_error)] for e in res.epochs]
    header = ["epoch", "list_size", "cap", "rounds", "collected", "target", "shortfall", "fallback",
              "truncated", "list_error"]
    _report(args, "cascade", config, cfg.seed, result, (header, rows))
    return 0


def cmd_hard(args) -> int:
    cls = _need_class(args)
    seed = args.seed or 0
    trials = args.trials or 1000
    if args.two_point:
        eps = as_fraction(args.epsilon or "1/10")
        inst = two_point_instance(cls, eps)
        m = args.budget if args.budget is not None else 10
        freq = two_point_miss_frequency(inst, m, trials, seed)
        closed = (1 - 2 * inst.epsilon) ** m
        config = {"class": _class_desc(cls), "two_point": True, "epsilon": str(eps), "budget": m, "trials": trials}
        result = {"instance": inst.to_dict(), "budget": m, "miss_frequency": freq,
                  "miss_probability": str(closed), "miss_probability_float": float(closed)}
        rows = [[str(eps), m, trials, repr(freq), repr(float(closed))]]
        _report(args, "hard", config, seed, result,
                (["epsilon", "budget", "trials", "miss_frequency", "miss_probability"], rows))
        return 0
    if not args.witness:
        raise UsageError("--witness FILE (from `bds-lab dim --witness`) is required")
    wtext = Path(args.witness).read_text()
    witness = PseudoBoxWitness.from_dict(json.loads(wtext))
    eps = as_fraction(args.epsilon or "1/32")
    inst = bds_hard_instance(cls, witness, eps)
    budget = args.budget if args.budget is not None else lower_bound_budget(inst)
    names = args.learner.split(",") if args.learner else ["cascade", "greedy", "oracle"]
    unknown = [n for n in names if n not in LEARNERS]
    if unknown:
        raise UsageError(f"unknown learner(s): {', '.join(unknown)}")
    config = {"class": _class_desc(cls), "witness_sha256": _sha(wtext), "epsilon": str(eps), "budget": budget,
              "trials": trials, "learners": names}
    stats = []
    with mapper(_workers(args)) as m:
        for name in names:
            stats.append(expected_restricted_error(LEARNERS[name](), inst, budget, trials, seed, m))
    first = inst.cls.hypotheses[0]
    result = {"instance": inst.to_dict(), "budget": budget, "floor": str(4 * eps),
              "no_information_error": str(no_information_error(inst, first)),
              "learners": [s.to_dict() for s in stats]}
    rows = [[s.learner, budget, trials, repr(s.estimate), repr(s.std_error),
             " ".join(repr(f) for f in s.under_sampled)] for s in stats]
    _report(args, "hard", config, seed, result,
            (["learner", "budget", "trials", "restricted_error", "std_error", "under_sampled"], rows))
    return 0


def _corpus(args, cfg: ExperimentConfig) -> CorpusSpec:
    spec = cfg.corpus
    for name in ("size", "seed", "max_k", "max_n", "max_count", "loo_samples", "max_sample"):
        v = getattr(args, f"corpus_{name}", None)
        if v is not None:
            setattr(spec, name, v)
    return spec


def cmd_verify(args) -> int:
    cfg = _experiment(args)
    spec = _corpus(args, cfg)
    chosen = SUITE_NAMES if args.suite == "all" else (args.suite,)
    lb = suites.LowerBoundConfig(seed=cfg.seed)
    if args.lb_trials is not None:
        lb.trials = args.lb_trials
    reports = []
    with mapper(_workers(args)) as m:
        for name in chosen:
            if name == "exp-ds":
                rep = suites.verify_exp_ds(spec, m, args.case)
            elif name == "sauer":
                rep = suites.verify_sauer(spec, m, args.case)
            elif name == "loo":
                rep = suites.verify_loo(spec, m, args.case)
            elif name == "cascade":
                rep = suites.verify_cascade_pac(cfg, m)
            else:
                rep = suites.verify_lower_bound(lb, m)
            print(rep.summary(), file=sys.stderr)
            reports.append(rep)
    config = {"suites": list(chosen), "corpus": spec.__dict__, "case": args.case,
              "experiment": cfg.resolved() if "cascade" in chosen else None,
              "lower_bound": {k: str(v) if isinstance(v, Fraction) else v for k, v in lb.__dict__.items()}
              if "lower-bound" in chosen else None}
    ok = all(r.ok for r in reports)
    result = {"ok": ok, "suites": [r.to_dict() for r in reports]}
    rows = [[r.suite, c["case"], int(c["passed"]), c["relation"], c["lhs"], c["rhs"], c.get("repro", "")]
            for r in reports for c in r.cases]
    _report(args, "verify", config, cfg.seed, result,
            (["suite", "case", "passed", "relation", "lhs", "rhs", "repro"], rows))
    return 0 if ok else 1


def _plot_spec(args, default_x: str = "budget") -> PlotSpec:
    y = tuple(args.y.split(",")) if args.y else ("error_mean",)
    group = None if args.group in ("", "none") else (args.group or "epsilon")
    return PlotSpec(x=args.x or default_x, y=y, group=group, logy=args.log_y, title=args.title or "")


def cmd_sweep(args) -> int:
    from .harness.sweep import sweep_sample_complexity

    cfg = _experiment(args)
    if args.epsilons:
        cfg.epsilons = [float(as_fraction(v)) for v in args.epsilons.split(",")]
    if args.scales:
        cfg.scales = [float(as_fraction(v)) for v in args.scales.split(",")]
    with mapper(_workers(args)) as m:
        text = sweep_sample_complexity(cfg, m)
    if args.format == "json":
        from .harness.sweep import read_csv

        _, header, rows = read_csv(text)
        _emit(args, dump_json({"meta": meta("sweep", cfg.resolved(), cfg.seed), "columns": header, "rows": rows}))
        return 0
    _emit(args, text)
    if args.out and not args.no_figures:
        spec = _plot_spec(args)
        out = Path(args.out)
        out.with_suffix(".svg").write_text(render_svg(text, spec))
        from .harness.figures import render_png

        render_png(text, out.with_suffix(".png"), spec)
    return 0


def cmd_plot(args) -> int:
    text = Path(args.csv).read_text()
    spec = _plot_spec(args)
    if args.out and Path(args.out).suffix.lower() == ".png":
        from .harness.figures import render_png

        render_png(text, args.out, spec)
    else:
        _emit(args, render_svg(text, spec))
    return 0


COMMANDS = {"dim": cmd_dim, "orient": cmd_orient, "learn": cmd_learn, "cascade": cmd_cascade,
            "hard": cmd_hard, "verify": cmd_verify, "sweep": cmd_sweep, "plot": cmd_plot}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--class", dest="class_file", metavar="FILE", help="concept class (.json or .csv)")
    common.add_argument("--env", metavar="FILE", help="environment JSON")
    common.add_argument("--epsilon", metavar="F", help="accuracy parameter (decimal or p/q)")
    common.add_argument("--delta", metavar="F", help="confidence parameter")
    common.add_argument("--scale", metavar="F", help="budget multiplier in (0, 1]")
    common.add_argument("--seed", type=int, metavar="N")
    common.add_argument("--trials", type=int, metavar="N")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), help="output format (default: csv for sweep, json otherwise)")
    common.add_argument("--config", metavar="FILE", help="experiment config JSON")
    common.add_argument("--workers", type=int, metavar="N", help="worker processes (capped by BDS_LAB_THREADS)")

    p = argparse.ArgumentParser(prog="bds-lab", description=__doc__)
    p.add_argument("--version", action="version", version=f"bds-lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dim", parents=[common], help="dimension calculators")
    s.add_argument("--which", choices=("all", "bds", "natarajan", "ds", "exp", "lower"), default="all")
    s.add_argument("--L", type=int)
    s.add_argument("--budget", type=int, help="search node budget; exhausted searches report lower bounds")
    s.add_argument("--witness", action="store_true", help="emit the pseudo-box witness document for `hard`")

    s = sub.add_parser("orient", parents=[common], help="min-max outdegree list orientation")
    s.add_argument("--L", type=int)
    s.add_argument("--seq", help="comma-separated instance sequence (default: whole domain)")

    s = sub.add_parser("learn", parents=[common], help="one-inclusion list predictions")
    s.add_argument("--sample", metavar="FILE", help="JSON list of [instance, label]")
    s.add_argument("--L", type=int)
    s.add_argument("--query", type=int)
    s.add_argument("--prefix-majority", action="store_true")
    s.add_argument("--prefix-mode", choices=("exclusive", "inclusive"))

    s = sub.add_parser("cascade", parents=[common], help="run the list cascade once")
    s.add_argument("--prefix-mode", choices=("exclusive", "inclusive"))
    s.add_argument("--max-rounds", type=int, help="re-split the schedule to at most this many rounds")
    s.add_argument("--transcript", action="store_true")

    s = sub.add_parser("hard", parents=[common], help="lower-bound instances")
    s.add_argument("--witness", metavar="FILE")
    s.add_argument("--two-point", action="store_true")
    s.add_argument("--budget", type=int)
    s.add_argument("--learner", help="comma-separated: cascade,greedy,oracle")

    s = sub.add_parser("verify", parents=[common], help="verification suites (exit 1 on any failure)")
    s.add_argument("--suite", choices=("all",) + SUITE_NAMES, default="all")
    s.add_argument("--case", type=int, help="run a single corpus entry")
    s.add_argument("--prefix-mode", choices=("exclusive", "inclusive"))
    s.add_argument("--lb-trials", type=int, help="lower-bound Monte-Carlo trials (default 1000)")
    for name in ("size", "seed", "max-k", "max-n", "max-count", "loo-samples", "max-sample"):
        s.add_argument(f"--corpus-{name}" if name in ("size", "seed") else f"--{name}",
                       dest=f"corpus_{name.replace('-', '_')}", type=int)

    for name, hlp in (("sweep", "sample-complexity sweep (CSV + figures)"), ("plot", "render a sweep CSV")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--x", choices=("budget", "epsilon", "scale"))
        s.add_argument("--y", help="comma-separated columns (default error_mean)")
        s.add_argument("--group", help="column that splits series (default epsilon; 'none' for one)")
        s.add_argument("--log-y", action="store_true", help="log-scale y axis (drops non-positive points)")
        s.add_argument("--title")
        if name == "sweep":
            s.add_argument("--epsilons", help="comma-separated grid")
            s.add_argument("--scales", help="comma-separated budget multipliers")
            s.add_argument("--prefix-mode", choices=("exclusive", "inclusive"))
            s.add_argument("--no-figures", action="store_true")
        else:
            s.add_argument("csv", metavar="CSV")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "sweep" else "json"
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, KeyError, OSError) as e:
        print(f"bds-lab {args.command}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
