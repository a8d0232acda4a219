"""Worker pools, seed derivation and reproducibility metadata."""
from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from typing import Callable, Iterator, Optional

import numpy as np

from .. import __version__

THREADS_ENV = "BDS_LAB_THREADS"


def worker_count(requested: Optional[int] = None) -> int:
    """Requested workers, capped by ``BDS_LAB_THREADS`` when that is set."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get(THREADS_ENV)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


@contextmanager
def mapper(workers: int = 1) -> Iterator[Callable]:
    """An order-preserving ``map``; a process pool when ``workers > 1``."""
    if workers <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield lambda fn, items: pool.map(fn, items, chunksize=4)


def derive_seed(master: int, *path: int) -> int:
    return int(np.random.SeedSequence([master, *path]).generate_state(1, np.uint64)[0])


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(config: dict) -> str:
    return hashlib.sha256(canonical_json(config).encode()).hexdigest()


def meta(command: str, config: dict, seed: Optional[int]) -> dict:
    return {
        "tool": "bds-lab",
        "version": __version__,
        "command": command,
        "config": config,
        "config_sha256": config_hash(config),
        "seed": seed,
    }


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
