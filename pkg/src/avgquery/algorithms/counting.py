"""Quantum counting and the staged average-case MAJORITY algorithm."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.stats import binom

from ..oracle import CountingOracle, ParameterError
from ..qsim import QuantumState
from .search import _log2_exact

CIRCUIT_MAX_QUBITS = 14


def _check_T(T: int) -> int:
    if T < 1 or T & (T - 1):
        raise ParameterError(f"QCount needs T a power of two, got {T}")
    return T.bit_length() - 1


def qcount_queries(T: int) -> int:
    """Oracle calls made by a phase-estimation run with a T-dimensional phase register."""
    _check_T(T)
    return T - 1


def estimate_from_outcome(N: int, T: int, y) -> np.ndarray:
    return N * np.sin(np.pi * np.asarray(y) / T) ** 2


def qcount_bound(t: int, N: int, T: int, k: int = 1) -> float:
    """Additive error allowed by the counting guarantee."""
    return 2 * math.pi * k * math.sqrt(t * (N - t)) / T + math.pi**2 * k**2 * N / T**2


def qcount_confidence(k: int) -> float:
    """Probability with which the guarantee holds for parameter k."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    return 8 / math.pi**2 if k == 1 else 1 - 1 / (2 * (k - 1))


def _fejer(delta: np.ndarray, T: int) -> np.ndarray:
    """|<y| QFT^-1 |phase>|^2 for an offset delta = T*phase - y."""
    delta = np.asarray(delta, dtype=float)
    s = np.sin(np.pi * delta / T)
    out = np.ones_like(delta)
    nz = np.abs(s) > 1e-13
    out[nz] = np.sin(np.pi * delta[nz]) ** 2 / (T * T * s[nz] ** 2)
    return out


def _omega(N: int, T: int, t: int) -> float:
    """T * theta / pi where sin^2(theta) = t/N; eigenphases of the iterate are +-theta/pi."""
    return T * math.asin(math.sqrt(t / N)) / math.pi


def outcome_distribution(N: int, T: int, t: int) -> np.ndarray:
    """Closed-form law of the phase register outcome y in {0..T-1}.

    The start state is an equal-weight superposition of the two eigenvectors
    of the Grover iterate, with eigenphases +-theta/pi, so the outcome law is
    the even mixture of two Fejer kernels.
    """
    _check_T(T)
    w = _omega(N, T, t)
    y = np.arange(T)
    p = 0.5 * _fejer(w - y, T) + 0.5 * _fejer(-w - y, T)
    return p / p.sum()


def circuit_outcome_distribution(oracle: CountingOracle, T: int) -> np.ndarray:
    """Outcome law of the full phase-estimation circuit, from the state vector.

    Uses a scratch copy of the oracle, so nothing is charged.
    """
    scratch = CountingOracle(oracle.input, oracle.unit)
    return _pe_state(scratch, T).probabilities("phase")


def _pe_state(oracle: CountingOracle, T: int) -> QuantumState:
    L = _log2_exact(oracle.size)
    P = _check_T(T)
    s = QuantumState([("phase", P), ("index", L), ("target", 1)])
    s.hadamard("phase").hadamard("index")

    def controlled_iterate(ctrl):
        # target is |+> when the control is 0 and |-> when it is 1, so the
        # uncontrolled bit query becomes a controlled phase flip
        s.hadamard("target")
        s.cz(ctrl, ("target", 0))
        s.query(oracle)
        s.cz(ctrl, ("target", 0))
        s.hadamard("target")
        s.diffusion("index", control=ctrl)

    for j in range(P):
        for _ in range(1 << j):
            controlled_iterate(("phase", j))
    s.qft("phase", inverse=True)
    return s


def _sample_kernel(w: float, T: int, rng: np.random.Generator, window: int = 32) -> int:
    """Draw y with Pr[y] = Fejer(w - y) exactly, looking at a window first."""
    if 2 * window + 1 >= T:
        p = _fejer(w - np.arange(T), T)
        return int(rng.choice(T, p=p / p.sum()))
    centre = math.floor(w)
    ys = np.arange(centre - window, centre + window + 1)
    p = _fejer(w - ys, T)
    inside = p.sum()
    u = rng.random()
    if u < inside:
        c = np.cumsum(p)
        return int(ys[min(np.searchsorted(c, u, side="right"), ys.size - 1)] % T)
    full = _fejer(w - np.arange(T), T)
    full[ys % T] = 0.0
    return int(rng.choice(T, p=full / full.sum()))


def qcount(oracle: CountingOracle, T: int, k: int = 1, rng: np.random.Generator | None = None,
           method: str = "auto") -> float:
    """Estimate |X| with T-1 oracle calls; returns N sin^2(pi y / T).

    ``k`` only enters the guarantee (see :func:`qcount_bound`).  ``circuit``
    simulates the phase-estimation circuit; ``closed_form`` samples the
    exact outcome law, which depends on X only through |X|, and charges the
    same number of queries.
    """
    if rng is None:
        raise ValueError("qcount needs a random generator")
    qcount_confidence(k)
    N = oracle.size
    L = _log2_exact(N)
    P = _check_T(T)
    if method == "auto":
        method = "circuit" if P + L + 1 <= CIRCUIT_MAX_QUBITS else "closed_form"
    if method == "circuit":
        y = _pe_state(oracle, T).measure("phase", rng)
    elif method == "closed_form":
        oracle.charge_quantum(qcount_queries(T))
        t = int(np.count_nonzero(oracle.values))
        w = _omega(N, T, t)
        y = _sample_kernel(w if rng.random() < 0.5 else -w, T, rng)
    else:
        raise ValueError(f"unknown QCount method {method!r}")
    return float(estimate_from_outcome(N, T, y))


# -- staged MAJORITY -------------------------------------------------------

def stage_budget(i: int, N: int, stage_c: float = 100) -> int:
    """T_i = stage_c * 2^i * log2 N rounded up to a power of two."""
    raw = stage_c * 2**i * math.log2(N)
    return 1 << max(0, math.ceil(math.log2(raw)))


def default_repetitions(N: int) -> int:
    return math.ceil(math.log2(10 * math.log2(N)))


def majority_avg(oracle: CountingOracle, rng: np.random.Generator, stage_c: float = 100,
                 repetitions: int | None = None, k: int = 2, method: str = "auto") -> tuple[int, int]:
    """For i = 1..log N: count with T_i queries; stop once the estimate is far from N/2.

    Each stage takes the lower median of ``repetitions`` independent QCount
    runs (default ceil(log2(10 log2 N))).  If no stage decides, all N bits
    are read.
    """
    N = oracle.size
    L = _log2_exact(N)
    if N < 4:
        raise ParameterError("majority_avg needs N >= 4")
    R = default_repetitions(N) if repetitions is None else repetitions
    start = oracle.total_queries
    for i in range(1, L + 1):
        T = stage_budget(i, N, stage_c)
        ests = sorted(qcount(oracle, T, k, rng, method) for _ in range(R))
        est = ests[(R - 1) // 2]
        if abs(est - N / 2) > N / 2**i:
            return int(est > N / 2), oracle.total_queries - start
    weight = sum(oracle.query(j) for j in range(N))
    return int(2 * weight > N), oracle.total_queries - start


def majority_profile(N: int, t: int, stage_c: float = 100, repetitions: int | None = None):
    """Exact (expected queries, success probability) of majority_avg on weight t.

    Stages are independent given t, each stopping high/low according to the
    order statistics of the closed-form QCount outcome law.
    """
    L = _log2_exact(N)
    R = default_repetitions(N) if repetitions is None else repetitions
    lo_rank = (R - 1) // 2  # index of the lower median
    truth = 2 * t > N
    alive, queries, correct = 1.0, 0.0, 0.0
    for i in range(1, L + 1):
        T = stage_budget(i, N, stage_c)
        est = estimate_from_outcome(N, T, np.arange(T))
        p = outcome_distribution(N, T, t)
        hi = p[est > N / 2 + N / 2**i].sum()
        lo = p[est < N / 2 - N / 2**i].sum()
        # median > U iff at least R - lo_rank draws exceed U; median < L iff at least lo_rank + 1 fall below
        stop_hi = binom.sf(R - lo_rank - 1, R, hi)
        stop_lo = binom.sf(lo_rank, R, lo)
        queries += alive * R * qcount_queries(T)
        correct += alive * (stop_hi if truth else stop_lo)
        alive *= 1 - stop_hi - stop_lo
    queries += alive * N
    correct += alive
    return float(queries), float(correct)


def majority_uniform_average(N: int, stage_c: float = 100, repetitions: int | None = None) -> float:
    """Exact uniform-average expected queries of majority_avg."""
    w = binom.pmf(np.arange(N + 1), N, 0.5)
    q = [majority_profile(N, t, stage_c, repetitions)[0] for t in range(N + 1)]
    return float(np.dot(w, q))


# -- classical MAJORITY sampling --------------------------------------------

def classical_majority_sampler(oracle: CountingOracle, T: int, rng: np.random.Generator) -> int:
    """Sample T distinct positions; 1 iff the fraction of ones is >= 1/2 + 1/sqrt(N)."""
    N = oracle.size
    if not 0 <= T <= N:
        raise ParameterError(f"sample size {T} outside [0, {N}]")
    ones = sum(oracle.query(int(i)) for i in rng.choice(N, T, replace=False))
    # ones / T >= 1/2 + 1/sqrt(N)  <=>  sqrt(N) * (2*ones - T) >= 2*T
    return int(T > 0 and (2 * ones - T) ** 2 * N >= 4 * T * T and 2 * ones >= T)


def hypergeometric_upper_tail(N: int, K: int, T: int, threshold: Fraction) -> Fraction:
    """Pr[#ones >= threshold * T] drawing T of N items (K ones) without replacement.

    Summed exactly over binomial coefficients.
    """
    lo = math.ceil(Fraction(threshold) * T)
    total = math.comb(N, T)
    num = sum(math.comb(K, i) * math.comb(N - K, T - i) for i in range(max(lo, 0), min(K, T) + 1))
    return Fraction(num, total)


def majority_sampler_tail(N: int, weight: int, T: int) -> Fraction:
    """Exact Pr[classical_majority_sampler outputs 1] on an input of the given weight."""
    thr = Fraction(1, 2) + 1 / Fraction(math.isqrt(N)) if math.isqrt(N) ** 2 == N else None
    if thr is None:
        # irrational cut-off: find the smallest count meeting it with exact integer arithmetic
        lo = next(c for c in range(T + 1) if 2 * c >= T and (2 * c - T) ** 2 * N >= 4 * T * T)
        thr = Fraction(lo, T)
    return hypergeometric_upper_tail(N, weight, T, thr)
