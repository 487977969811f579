"""Adaptive sampler for THRESHOLD(theta): f(X) = 1 iff |X| >= theta * N."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..oracle import CountingOracle


def threshold_sampler(oracle: CountingOracle, rng: np.random.Generator, batch_scale: int = 8,
                      start_i: int = 1, sample_threshold=Fraction(2, 10),
                      theta=Fraction(1, 10)) -> tuple[int, int]:
    """Sample growing batches; answer 1 early on a dense sample, else count.

    Round i draws ``batch_scale * i`` uniformly random positions (with
    replacement).  If the fraction of ones reaches ``sample_threshold`` the
    answer is 1.  Rounds continue while i < log2 N; the round that reaches
    i >= log2 N is followed by an exact count with N queries.
    """
    if batch_scale <= 0 or start_i <= 0:
        raise ValueError("batch_scale and start_i must be positive")
    N = oracle.size
    theta = Fraction(theta)
    thr = Fraction(sample_threshold)
    start = oracle.total_queries
    log_n = math.log2(N)
    i = start_i
    while True:
        k = batch_scale * i
        pos = rng.integers(0, N, k)
        ones = sum(oracle.query(int(p)) for p in pos)
        if ones * thr.denominator >= thr.numerator * k:
            return 1, oracle.total_queries - start
        if i < log_n:
            i += 1
            continue
        weight = sum(oracle.query(j) for j in range(N))
        out = int(weight * theta.denominator >= theta.numerator * N)
        return out, oracle.total_queries - start
