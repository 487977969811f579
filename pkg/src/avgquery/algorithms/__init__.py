"""Registry of the instrumented query algorithms.

Every algorithm is a callable ``fn(oracle, rng, **tunables) -> (bit, queries)``
where ``queries`` counts oracle calls (classical plus quantum) in the
oracle's own unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from ..oracle import BitInput, BooleanFunction, CountingOracle, Kind, Unit, evaluate
from .counting import (
    classical_majority_sampler, majority_avg, majority_profile, majority_uniform_average, qcount,
)
from .gf2 import gf2_rank
from .parity import parity_exact_quantum, parity_self_reduce, parity_third_wrapper
from .search import classical_or_sampler, grover_or
from .simon import simon_zero_error
from .threshold import threshold_sampler


def full_read(oracle: CountingOracle, rng: np.random.Generator, function: BooleanFunction) -> tuple[int, int]:
    """Deterministic baseline: read every position, then evaluate."""
    start = oracle.total_queries
    vals = [oracle.query(i) for i in range(oracle.size)]
    if oracle.unit is Unit.BLOCK:
        X = BitInput.from_blocks(vals, oracle.value_bits)
    else:
        X = BitInput(np.array(vals, dtype=np.uint8))
    return evaluate(function, X), oracle.total_queries - start


def _majority_worst_case(N: int, t: dict) -> int:
    from .counting import default_repetitions, qcount_queries, stage_budget
    R = default_repetitions(N) if t.get("repetitions") is None else t["repetitions"]
    L = N.bit_length() - 1
    return R * sum(qcount_queries(stage_budget(i, N, t.get("stage_c", 100))) for i in range(1, L + 1)) + N


def _self_reduce(oracle, rng, inner: str = "parity_third_wrapper"):
    spec = REGISTRY[inner]
    return parity_self_reduce(lambda o, r: spec.fn(o, r, **spec.defaults), oracle, rng)


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    fn: Callable
    kind: str  # quantum | classical-randomized | deterministic
    unit: Unit
    computes: frozenset
    zero_error: bool
    defaults: dict = field(default_factory=dict)
    bind: Optional[Callable[[BooleanFunction], dict]] = None
    # deterministic query ceiling (N, tunables) -> int, when it can exceed the harness timeout
    worst_case: Optional[Callable[[int, dict], int]] = None

    @property
    def is_quantum(self) -> bool:
        return self.kind == "quantum"

    def tunables(self, f: Optional[BooleanFunction] = None, **overrides) -> dict:
        t = dict(self.defaults)
        if self.bind is not None and f is not None:
            t.update(self.bind(f))
        unknown = set(overrides) - set(t)
        if unknown:
            raise KeyError(f"{self.name} has no tunable(s) {sorted(unknown)}")
        t.update(overrides)
        return t

    def run(self, oracle: CountingOracle, rng: np.random.Generator, **tunables) -> tuple[int, int]:
        return self.fn(oracle, rng, **tunables)


def _spec(name, fn, kind, unit, computes, zero_error, defaults=None, bind=None, worst_case=None):
    return AlgorithmSpec(name, fn, kind, Unit(unit), frozenset(computes), zero_error, defaults or {}, bind,
                         worst_case)


REGISTRY: dict[str, AlgorithmSpec] = {
    s.name: s
    for s in [
        _spec("threshold_sampler", threshold_sampler, "classical-randomized", "bit", {Kind.THRESHOLD}, False,
              {"batch_scale": 8, "start_i": 1, "sample_threshold": Fraction(2, 10), "theta": Fraction(1, 10)},
              bind=lambda f: {"theta": f.theta}),
        _spec("simon_zero_error", simon_zero_error, "quantum", "block", {Kind.SIMON}, True,
              {"rounds": None, "method": "distribution"}),
        _spec("grover_or", grover_or, "quantum", "bit", {Kind.OR}, False,
              {"growth": 8 / 7, "budget_factor": 3.0, "method": "auto"}),
        _spec("classical_or_sampler", classical_or_sampler, "classical-randomized", "bit", {Kind.OR}, True),
        _spec("majority_avg", majority_avg, "quantum", "bit", {Kind.MAJ}, False,
              {"stage_c": 100, "repetitions": None, "k": 2, "method": "auto"}, worst_case=_majority_worst_case),
        _spec("parity_exact_quantum", parity_exact_quantum, "quantum", "bit", {Kind.PARITY}, True),
        _spec("parity_third_wrapper", parity_third_wrapper, "quantum", "bit", {Kind.PARITY}, False,
              {"guess_probability": 1 / 3}),
        _spec("parity_self_reduce", _self_reduce, "quantum", "bit", {Kind.PARITY}, False,
              {"inner": "parity_third_wrapper"}),
        _spec("full_read", full_read, "deterministic", "bit", set(Kind), True,
              {"function": None}, bind=lambda f: {"function": f}),
        _spec("full_read_blocks", full_read, "deterministic", "block", {Kind.SIMON}, True,
              {"function": None}, bind=lambda f: {"function": f}),
    ]
}


def get(name: str) -> AlgorithmSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown algorithm {name!r}; known: {sorted(REGISTRY)}") from None


__all__ = [
    "REGISTRY", "AlgorithmSpec", "get", "threshold_sampler", "simon_zero_error", "grover_or",
    "classical_or_sampler", "majority_avg", "qcount", "parity_exact_quantum", "parity_third_wrapper",
    "parity_self_reduce", "classical_majority_sampler", "gf2_rank", "full_read", "majority_profile",
    "majority_uniform_average",
]
