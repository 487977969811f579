"""PARITY: exact pairwise quantum algorithm, the 1/3 wrapper and the random self-reduction."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..oracle import CountingOracle, MaskedOracle
from ..qsim import QuantumState


def pair_parity(oracle: CountingOracle, base: int, rng: np.random.Generator) -> int:
    """x_base xor x_base+1 with one quantum query (Deutsch's algorithm)."""
    s = QuantumState([("index", 1), ("target", 1)])
    s.x("target").hadamard("target")
    s.hadamard("index")
    s.query(oracle, base=base)
    s.hadamard("index")
    return s.measure("index", rng)


def parity_exact_quantum(oracle: CountingOracle, rng: np.random.Generator | None = None) -> tuple[int, int]:
    """Always-correct PARITY with ceil(N/2) queries.

    Odd N: the last bit is read classically and the rest handled in pairs.
    """
    rng = np.random.default_rng(0) if rng is None else rng  # measurements here are deterministic
    start = oracle.total_queries
    N = oracle.size
    out = 0
    for p in range(N // 2):
        out ^= pair_parity(oracle, 2 * p, rng)
    if N % 2:
        out ^= oracle.query(N - 1)
    return out, oracle.total_queries - start


def parity_third_wrapper(oracle: CountingOracle, rng: np.random.Generator,
                         guess_probability: float = 1 / 3) -> tuple[int, int]:
    """Output 1 or 0 blindly with probability 1/3 each, otherwise compute exactly."""
    u = rng.random()
    if u < guess_probability:
        return 1, 0
    if u < 2 * guess_probability:
        return 0, 0
    return parity_exact_quantum(oracle, rng)


Algorithm = Callable[[CountingOracle, np.random.Generator], tuple]


def parity_self_reduce(inner: Algorithm, oracle: CountingOracle, rng: np.random.Generator) -> tuple[int, int]:
    """Run ``inner`` on Y = X xor M for a uniform mask M and undo the mask's parity."""
    start = oracle.total_queries
    mask = rng.integers(0, 2, oracle.size, dtype=np.uint8)
    out, _ = inner(MaskedOracle(oracle, mask), rng)
    return out ^ (int(mask.sum()) & 1), oracle.total_queries - start
