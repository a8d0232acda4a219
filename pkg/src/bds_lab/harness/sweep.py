"""Sample-complexity sweeps over (epsilon, budget multiplier) grids, written as CSV."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..bandit import epoch_schedule
from ..dimensions import ds_values
from .config import ExperimentConfig
from .runtime import config_hash, derive_seed
from .verify import _cascade_trial

COLUMNS = ("epsilon", "scale", "budget", "trials", "error_mean", "error_q95", "failure_rate", "epochs_flagged")


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    scale: float
    budget: int
    trials: int
    error_mean: float
    error_q95: float
    failure_rate: float
    epochs_flagged: int

    def cells(self) -> list[str]:
        return [repr(float(self.epsilon)), repr(float(self.scale)), str(self.budget), str(self.trials),
                repr(self.error_mean), repr(self.error_q95), repr(self.failure_rate), str(self.epochs_flagged)]


def sweep_rows(config: ExperimentConfig, mapper: Callable = map) -> list[SweepRow]:
    """One row per grid point.  Trial ``i`` uses the same derived seed at every
    grid point, so neighbouring rows differ by budget rather than by luck."""
    cls = config.load_class()
    env = config.load_environment(cls)
    ds = ds_values(cls)
    rows = []
    for eps in sorted(set(config.epsilons)):
        for scale in sorted(set(config.scales)):
            schedule = epoch_schedule(cls.k, eps, config.delta, ds, scale)
            jobs = [(cls, env, schedule, derive_seed(config.seed, i), config.prefix_mode)
                    for i in range(config.trials)]
            results = list(mapper(_cascade_trial, jobs))
            errs = np.asarray([float(r[0]) for r in results])
            rows.append(SweepRow(
                epsilon=eps,
                scale=scale,
                budget=schedule.total,
                trials=config.trials,
                error_mean=float(errs.mean()),
                error_q95=float(np.quantile(errs, 0.95, method="higher")),
                failure_rate=float(np.mean(errs > eps)),
                epochs_flagged=sum(r[2] for r in results),
            ))
    rows.sort(key=lambda r: (r.epsilon, r.budget, r.scale))
    return rows


def rows_to_csv(rows: list[SweepRow], resolved: dict, seed: int) -> str:
    buf = io.StringIO()
    buf.write(f"# bds-lab sweep config_sha256={config_hash(resolved)} seed={seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def sweep_sample_complexity(config: ExperimentConfig, mapper: Callable = map) -> str:
    """The sweep as CSV text: a ``#`` metadata line, a header, then sorted rows."""
    return rows_to_csv(sweep_rows(config, mapper), config.resolved(), config.seed)


def read_csv(text: str) -> tuple[list[str], list[str], list[dict]]:
    """Split a harness CSV into (comment lines, header, rows as dicts of strings)."""
    comments = [l for l in text.splitlines() if l.startswith("#")]
    body = [l for l in text.splitlines() if l and not l.startswith("#")]
    if not body:
        return comments, [], []
    reader = csv.DictReader(body)
    return comments, list(reader.fieldnames or []), list(reader)
