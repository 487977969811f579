"""OR by Grover search with an unknown number of solutions, and by sampling."""

from __future__ import annotations

import math

import numpy as np

from ..oracle import CountingOracle, InputShapeError
from ..qsim import QuantumState

STATEVECTOR_MAX_N = 1 << 10


def _log2_exact(N: int) -> int:
    L = N.bit_length() - 1
    if N < 1 or 1 << L != N:
        raise InputShapeError(f"Grover search needs N a power of two, got {N}")
    return L


def grover_attempt_statevector(oracle: CountingOracle, j: int, rng: np.random.Generator) -> int:
    """Prepare the uniform superposition, apply j Grover iterates, measure the index."""
    L = _log2_exact(oracle.size)
    s = QuantumState([("index", L), ("target", 1)])
    s.x("target").hadamard("target")  # |->: the bit query acts as a phase flip
    s.hadamard("index")
    for _ in range(j):
        s.query(oracle)
        s.diffusion("index")
    return s.measure("index", rng)


def grover_success_probability(N: int, t: int, j: int) -> float:
    """Probability that j iterates followed by a measurement hit a marked index."""
    theta = math.asin(math.sqrt(t / N))
    return math.sin((2 * j + 1) * theta) ** 2


class _Subspace:
    """Exact Grover dynamics restricted to span{|good>, |bad>}.

    The measured index is marked with probability sin^2((2j+1)theta) and is
    otherwise uniform over the unmarked positions (uniform over the marked
    ones in the first case).  Reads the oracle table without charging; the
    caller charges j quantum queries per attempt.
    """

    def __init__(self, oracle: CountingOracle):
        vals = oracle.values
        self.N = vals.size
        self.ones = np.flatnonzero(vals)
        self.zeros = np.flatnonzero(vals == 0)

    def attempt(self, j: int, rng: np.random.Generator) -> int:
        p = grover_success_probability(self.N, self.ones.size, j)
        pool = self.ones if rng.random() < p else self.zeros
        if pool.size == 0:  # p rounds to 0 or 1 at the edges
            pool = self.zeros if pool is self.ones else self.ones
        return int(pool[rng.integers(pool.size)])


def grover_or(oracle: CountingOracle, rng: np.random.Generator, growth: float = 8 / 7,
              budget_factor: float = 3.0, method: str = "auto") -> tuple[int, int]:
    """Exponentially growing Grover search with random iterate counts.

    Stage s picks j uniformly from {0, .., ceil(m)-1}, runs j iterates
    (j queries), measures an index and checks it with one classical query.
    m grows by ``growth`` per stage up to sqrt(N).  Once the iterates used
    reach floor(budget_factor * sqrt(N)) the answer is 0.
    """
    N = oracle.size
    _log2_exact(N)
    start = oracle.total_queries
    if N == 1:
        return oracle.query(0), oracle.total_queries - start
    if method == "auto":
        method = "statevector" if N <= STATEVECTOR_MAX_N else "subspace"
    if method == "subspace":
        sub = _Subspace(oracle)
    elif method != "statevector":
        raise ValueError(f"unknown Grover method {method!r}")
    budget = math.floor(budget_factor * math.sqrt(N))
    cap = math.sqrt(N)
    m = 1.0
    used = 0
    while True:
        j = min(int(rng.integers(0, math.ceil(m))), budget - used)
        if method == "statevector":
            i = grover_attempt_statevector(oracle, j, rng)
        else:
            oracle.charge_quantum(j)
            i = sub.attempt(j, rng)
        used += j
        if oracle.query(i) == 1:
            return 1, oracle.total_queries - start
        if used >= budget:
            return 0, oracle.total_queries - start
        m = min(growth * m, cap)


def classical_or_sampler(oracle: CountingOracle, rng: np.random.Generator) -> tuple[int, int]:
    """Query distinct uniformly random positions until a 1 turns up."""
    start = oracle.total_queries
    N = oracle.size
    order = rng.permutation(N)
    for i in order:
        if oracle.query(int(i)) == 1:
            return 1, oracle.total_queries - start
    return 0, oracle.total_queries - start
