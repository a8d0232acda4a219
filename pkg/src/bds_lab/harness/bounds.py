"""Closed-form bounds evaluated by the verification suites."""
from __future__ import annotations

import math


def chernoff_lower_tail(mu: float, delta_rel: float) -> float:
    """``P[X <= (1 - delta_rel) mu] <= exp(-delta_rel^2 mu / 2)`` for a Bernoulli sum with mean ``mu``."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    if not 0 < delta_rel < 1:
        raise ValueError("delta_rel must lie in (0, 1)")
    return math.exp(-delta_rel * delta_rel * mu / 2)


def exp_dim_bound(ds: int, K: int) -> float:
    """``6 d log2 K``."""
    return 6 * ds * math.log2(K)


def sauer_bound(L: int, K: int, size: int, d: int) -> float:
    """``ceil(L/2)^(|S| - d) * (e K |S| / d)^d`` for ``d >= 1``."""
    half = -(-L // 2)
    return half ** (size - d) * (math.e * K * size / d) ** d


def loo_bound(ds: int, K: int, size: int) -> float:
    return 6 * ds * math.log2(K) / size


def binomial_slack(p: float, trials: int, sigmas: float = 3.0) -> float:
    return sigmas * math.sqrt(p * (1 - p) / trials)
