"""Zero-error quantum algorithm for the Simon-variant function.

Each round prepares sum_i |i>|0>, queries the block oracle once, measures
the answer register, applies H^n to the index register and measures it.
After ``rounds`` rounds (default 22n) the measured vectors either span
{0,1}^n, which certifies f(X) = 0, or the algorithm reads all 2^n blocks.
"""

from __future__ import annotations

import numpy as np

from ..oracle import CountingOracle, InputShapeError, Unit, periods
from ..qsim import Measure, Query, QueryProgram, QuantumState, Unitary, run_program
from .gf2 import gf2_rank


def round_program(n: int) -> QueryProgram:
    """One round as a flag-stopped query program; records 'j' and 'i'."""
    return QueryProgram(
        registers=[("index", n), ("target", n), ("flag", 1), ("output", 1)],
        steps=[
            Unitary(lambda s: s.hadamard("index"), "prepare"),
            Query(),
            Measure("target", "j"),
            Unitary(lambda s: s.hadamard("index"), "hadamard"),
            Measure("index", "i"),
            Unitary(lambda s: s.x("flag"), "stop"),
        ],
        meta={"block_queries": 1},
    )


def round_state(oracle: CountingOracle) -> QuantumState:
    """State of one round just before the measurements (nothing measured yet).

    Charges one quantum query to ``oracle``.
    """
    n = oracle.value_bits
    s = QuantumState([("index", n), ("target", n)])
    s.hadamard("index")
    s.query(oracle)
    s.hadamard("index")
    return s


def round_distribution(oracle: CountingOracle) -> np.ndarray:
    """Exact law of the index outcome i' of one round (uncharged scratch copy).

    Measuring the answer register first does not change this marginal, since
    it is untouched by the final Hadamards.
    """
    scratch = CountingOracle(oracle.input, Unit.BLOCK)
    p = round_state(scratch).probabilities("index")
    return p / p.sum()


def _check(oracle: CountingOracle):
    if oracle.unit is not Unit.BLOCK:
        raise InputShapeError("simon_zero_error needs a block oracle")


def sample_rounds(oracle: CountingOracle, m: int, rng: np.random.Generator, method: str = "distribution"):
    """Run m rounds and return the measured index vectors.

    ``program`` simulates every round through :func:`run_program`;
    ``distribution`` simulates one round exactly, then draws the m
    independent outcomes from its Born distribution and charges m queries.
    """
    _check(oracle)
    if method == "program":
        prog = round_program(oracle.value_bits)
        return [run_program(prog, oracle, rng).measurements["i"] for _ in range(m)]
    if method != "distribution":
        raise ValueError(f"unknown round method {method!r}")
    p = round_distribution(oracle)
    oracle.charge_quantum(m)
    c = np.cumsum(p)
    u = rng.random(m) * c[-1]
    return [int(v) for v in np.minimum(np.searchsorted(c, u, side="right"), p.size - 1)]


def simon_zero_error(oracle: CountingOracle, rng: np.random.Generator, rounds: int | None = None,
                     method: str = "distribution") -> tuple[int, int]:
    _check(oracle)
    n = oracle.value_bits
    m = 22 * n if rounds is None else rounds
    start = oracle.total_queries
    samples = sample_rounds(oracle, m, rng, method)
    _, full = gf2_rank(samples, n)
    if full:
        return 0, oracle.total_queries - start
    blocks = np.array([oracle.query(i) for i in range(oracle.size)], dtype=np.int64)
    out = int(periods(blocks, n).size > 0)
    return out, oracle.total_queries - start
