"""Input distributions over {0,1}^N with exact pmf and seeded samplers."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np
from scipy.special import gammaln

from .oracle import BitInput, InputShapeError, ParameterError, SizeCapError, periods, simon_values

ENUMERATION_CAP = 20


def log_binom(N: int, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return gammaln(N + 1) - gammaln(t + 1) - gammaln(N - t + 1)


@dataclass(frozen=True, eq=False)
class InputDistribution:
    """A distribution mu over N-bit inputs.

    kind is one of ``uniform``, ``or_alpha``, ``simon_d1``, ``simon_d2``,
    ``table``.  For ``or_alpha`` the weight class t has total probability
    c / ((t+1)^alpha (N+1)^(1-alpha)), spread evenly over its C(N, t)
    members, with c computed exactly by summation.
    """

    kind: str
    N: int
    alpha: Optional[float] = None
    n: Optional[int] = None
    table: Optional[dict] = field(default=None, repr=False)
    # diagnostics for the D2 rejection sampler; not part of equality
    stats: dict = field(default_factory=lambda: {"attempts": 0, "accepted": 0}, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "or_alpha" and not (self.alpha is not None and 0 < self.alpha < 0.5):
            raise ParameterError(f"or_alpha needs alpha in (0, 1/2), got {self.alpha}")
        if self.kind in ("simon_d1", "simon_d2"):
            if self.n is None or self.n * 2**self.n != self.N:
                raise InputShapeError("Simon distributions need N = n*2^n")
        if self.kind == "table":
            total = sum(self.table.values())
            if not math.isclose(total, 1.0, abs_tol=1e-9):
                raise ParameterError(f"table probabilities sum to {total}, not 1")
            if any(p < 0 for p in self.table.values()):
                raise ParameterError("negative probability in table")
            if any(X.N != self.N for X in self.table):
                raise InputShapeError("table input of the wrong length")
        if self.kind not in ("uniform", "or_alpha", "simon_d1", "simon_d2", "table"):
            raise ParameterError(f"unknown distribution kind {self.kind!r}")

    @property
    def block_width(self) -> Optional[int]:
        return self.n

    @property
    def exchangeable(self) -> bool:
        return self.kind in ("uniform", "or_alpha")

    def __str__(self):
        if self.kind == "or_alpha":
            return f"or_alpha(N={self.N}, alpha={self.alpha})"
        if self.kind in ("simon_d1", "simon_d2"):
            return f"{self.kind}(n={self.n})"
        return f"{self.kind}(N={self.N})"

    # -- exchangeable weight law ------------------------------------------
    def weight_log_pmf(self) -> np.ndarray:
        """log Pr[|X| = t] for t = 0..N (exchangeable kinds)."""
        N = self.N
        t = np.arange(N + 1)
        if self.kind == "uniform":
            return log_binom(N, t) - N * math.log(2)
        if self.kind == "or_alpha":
            raw = -self.alpha * np.log(t + 1) - (1 - self.alpha) * math.log(N + 1)
            return raw + math.log(or_alpha_constant(N, self.alpha))
        raise ParameterError(f"{self.kind} is not exchangeable")

    def weight_pmf(self) -> np.ndarray:
        return np.exp(self.weight_log_pmf())

    def normalizer(self) -> float:
        if self.kind != "or_alpha":
            raise ParameterError("only or_alpha has a normalising constant")
        return or_alpha_constant(self.N, self.alpha)


def or_alpha_constant(N: int, alpha: float) -> float:
    """Exact c making the or_alpha weight law sum to one."""
    t = np.arange(N + 1)
    terms = np.exp(-alpha * np.log(t + 1) - (1 - alpha) * math.log(N + 1))
    return float(1.0 / math.fsum(terms))


def uniform(N: int) -> InputDistribution:
    return InputDistribution("uniform", N)


def or_alpha(N: int, alpha: float) -> InputDistribution:
    return InputDistribution("or_alpha", N, alpha=alpha)


def simon_d1(n: int) -> InputDistribution:
    return InputDistribution("simon_d1", n * 2**n, n=n)


def simon_d2(n: int) -> InputDistribution:
    return InputDistribution("simon_d2", n * 2**n, n=n)


def table(pmf: dict) -> InputDistribution:
    N = next(iter(pmf)).N
    return InputDistribution("table", N, table=dict(pmf))


def _check(mu: InputDistribution, X: BitInput):
    if X.N != mu.N:
        raise InputShapeError(f"input length {X.N} != distribution arity {mu.N}")


def unique_period(X: BitInput) -> bool:
    return periods(X.blocks, X.block_width).size == 1


def pmf(mu: InputDistribution, X: BitInput) -> float:
    _check(mu, X)
    if mu.kind in ("uniform", "simon_d1"):
        return math.ldexp(1.0, -mu.N)
    if mu.kind == "or_alpha":
        t = X.weight
        return math.exp(mu.weight_log_pmf()[t] - log_binom(mu.N, t))
    if mu.kind == "table":
        return float(mu.table.get(X, 0.0))
    # simon_d2: uniform over the unique-period inputs
    Xb = X if X.block_width == mu.n else X.with_blocks(mu.n)
    if not unique_period(Xb):
        return 0.0
    return 1.0 / simon_d2_support_size(mu.n)


_D2_SIZES: dict = {}


def simon_d2_support_size(n: int) -> int:
    if n not in _D2_SIZES:
        if n > 3:
            raise SizeCapError(f"D2 support for n = {n} is not enumerable")
        count = 0
        for bits, _ in _simon_chunks(n):
            blocks = _blocks(bits, n)
            count += int(np.count_nonzero(_period_counts(blocks, n) == 1))
        _D2_SIZES[n] = count
    return _D2_SIZES[n]


def _blocks(bits: np.ndarray, n: int) -> np.ndarray:
    weights = 1 << np.arange(n - 1, -1, -1)
    return bits.reshape(bits.shape[0], 2**n, n).astype(np.int64) @ weights


def _period_counts(blocks: np.ndarray, n: int) -> np.ndarray:
    from .oracle import xor_index_table

    tab = xor_index_table(n)[1:]
    return np.all(blocks[:, tab] == blocks[:, None, :], axis=2).sum(axis=1)


def _simon_chunks(n: int, chunk: int = 1 << 16):
    """All inputs of SIMON(n) as bit rows, in integer order, chunked."""
    N = n * 2**n
    total = 1 << N
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        yield ((idx[:, None] >> np.arange(N)) & 1).astype(np.uint8), idx


def sample(mu: InputDistribution, rng: np.random.Generator) -> BitInput:
    N = mu.N
    if mu.kind in ("uniform", "simon_d1"):
        return BitInput(rng.integers(0, 2, N, dtype=np.uint8), mu.n)
    if mu.kind == "or_alpha":
        t = int(rng.choice(N + 1, p=_weight_probs(mu)))
        bits = np.zeros(N, dtype=np.uint8)
        bits[rng.permutation(N)[:t]] = 1
        return BitInput(bits)
    if mu.kind == "table":
        keys = list(mu.table)
        probs = np.array([mu.table[k] for k in keys])
        return keys[int(rng.choice(len(keys), p=probs / probs.sum()))]
    return _sample_d2(mu, rng)


_WEIGHT_CACHE: dict = {}


def _weight_probs(mu: InputDistribution) -> np.ndarray:
    key = (mu.kind, mu.N, mu.alpha)
    if key not in _WEIGHT_CACHE:
        p = mu.weight_pmf()
        _WEIGHT_CACHE[key] = p / p.sum()
    return _WEIGHT_CACHE[key]


def _sample_d2(mu: InputDistribution, rng: np.random.Generator) -> BitInput:
    n = mu.n
    size = 2**n
    i = np.arange(size)
    while True:
        mu.stats["attempts"] += 1
        k = int(rng.integers(1, size))
        # one representative per pair {i, i^k}: the smaller index
        reps = i[i < (i ^ k)]
        values = rng.integers(0, size, reps.size)
        blocks = np.empty(size, dtype=np.int64)
        blocks[reps] = values
        blocks[reps ^ k] = values
        if periods(blocks, n).size == 1:
            mu.stats["accepted"] += 1
            return BitInput.from_blocks(blocks, n)


def acceptance_rate(mu: InputDistribution) -> float:
    a = mu.stats["attempts"]
    return mu.stats["accepted"] / a if a else float("nan")


def support_enumerate(
    mu: InputDistribution,
    predicate: Optional[Callable[[BitInput], bool]] = None,
    cap: int = ENUMERATION_CAP,
) -> Iterator[tuple]:
    """Yield (X, pmf(X)) for every X with positive probability."""
    if mu.kind == "table":
        items = [(X, p) for X, p in mu.table.items() if p > 0]
    else:
        if mu.N > cap:
            raise SizeCapError(f"support of {mu} has up to 2^{mu.N} points; cap is 2^{cap}")
        items = _enumerate_full(mu)
    for X, p in items:
        if predicate is None or predicate(X):
            yield X, p


def _enumerate_full(mu: InputDistribution):
    N = mu.N
    if mu.kind == "simon_d2":
        size = simon_d2_support_size(mu.n)
        for bits, _ in _simon_chunks(mu.n):
            keep = _period_counts(_blocks(bits, mu.n), mu.n) == 1
            for row in bits[keep]:
                yield BitInput(row, mu.n), 1.0 / size
        return
    if mu.kind == "or_alpha":
        wl = mu.weight_log_pmf()
        per = np.exp(wl - log_binom(N, np.arange(N + 1)))
    for v in range(1 << N):
        X = BitInput.from_int(v, N, mu.n)
        if mu.kind == "or_alpha":
            yield X, float(per[X.weight])
        else:
            yield X, math.ldexp(1.0, -N)


def pmf_vector(mu: InputDistribution, cap: int = ENUMERATION_CAP) -> np.ndarray:
    """pmf on all 2^N inputs indexed by the integer whose bit i is x_i."""
    N = mu.N
    if N > cap:
        raise SizeCapError(f"pmf vector of 2^{N} entries exceeds cap 2^{cap}")
    from .oracle import popcount

    idx = np.arange(1 << N, dtype=np.int64)
    if mu.kind in ("uniform", "simon_d1"):
        return np.full(1 << N, math.ldexp(1.0, -N))
    if mu.kind == "or_alpha":
        per = np.exp(mu.weight_log_pmf() - log_binom(N, np.arange(N + 1)))
        return per[popcount(idx)]
    if mu.kind == "table":
        out = np.zeros(1 << N)
        for X, p in mu.table.items():
            out[X.to_int()] += p
        return out
    bits = ((idx[:, None] >> np.arange(N)) & 1).astype(np.uint8)
    counts = _period_counts(_blocks(bits, mu.n), mu.n)
    out = (counts == 1).astype(float)
    return out / out.sum()


def export_weight_csv(mu: InputDistribution, path) -> None:
    """Write (weight, probability) rows of an exchangeable distribution."""
    p = mu.weight_pmf()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["weight", "probability"])
        for t, q in enumerate(p):
            w.writerow([t, repr(float(q))])


__all__ = [
    "InputDistribution", "uniform", "or_alpha", "simon_d1", "simon_d2", "table",
    "pmf", "sample", "support_enumerate", "pmf_vector", "or_alpha_constant",
    "simon_d2_support_size", "acceptance_rate", "export_weight_csv", "simon_values",
]
