"""Average-case estimation, bounded-error certification and scaling sweeps.

Seeds: every random stream is ``derive_rng(seed, experiment, *path)``, a
numpy ``SeedSequence`` with the master seed as entropy and spawn key
``(crc32(experiment), *path)``.  Monte Carlo trial ``k`` uses path ``(k,)``;
exact mode uses ``(input_index, repetition)``.
"""

from __future__ import annotations

import csv
import json
import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import stats

from . import algorithms as algs
from . import distributions as dist
from .oracle import (
    BitInput, BooleanFunction, CountingOracle, InputShapeError, QueryBudgetExceeded, SizeCapError,
    Unit, evaluate, periods,
)

EXACT_SUPPORT_CAP = 1 << 12
TIMEOUT_FACTOR = 50


def _key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    return int(part)


def derive_rng(seed: int, *path) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass
class RunRecord:
    algorithm: str
    tunables: dict
    function: str
    distribution: str
    input_hex: str
    seed: int
    output: int
    correct: bool
    queries: int
    bit_queries: int
    block_queries: Optional[int]
    wall_time: float = field(default=0.0, compare=False)


@dataclass
class SummaryStats:
    mean_queries: float
    stderr: float
    success_rate: float
    min_success_rate: Optional[float]
    trials: int
    mode: str
    mean_bit_queries: float = float("nan")

    def as_row(self) -> dict:
        return asdict(self)


def _describe(tunables: dict) -> dict:
    return {k: (str(v) if not isinstance(v, (int, float, bool, type(None))) else v) for k, v in tunables.items()}


def run_once(spec: algs.AlgorithmSpec, f: BooleanFunction, X: BitInput, rng: np.random.Generator,
             tunables: dict, seed: int = 0, distribution: str = "", timeout: Optional[int] = None) -> RunRecord:
    """Run one algorithm on one input and compare with the true f(X)."""
    if f.arity != X.N:
        raise InputShapeError(f"function arity {f.arity} != input length {X.N}")
    if spec.unit is Unit.BLOCK and X.block_width is None:
        X = X.with_blocks(f.n)
    if timeout is None:
        timeout = TIMEOUT_FACTOR * X.N
        if spec.worst_case is not None:
            # staged algorithms with large constants can exceed 50 N by design
            timeout = max(timeout, spec.worst_case(X.N, tunables))
    oracle = CountingOracle(X, spec.unit, budget=timeout)
    truth = evaluate(f, X)
    t0 = time.perf_counter()
    try:
        out, q = spec.run(oracle, rng, **tunables)
    except QueryBudgetExceeded:
        out, q = -1, oracle.total_queries
    if q != oracle.total_queries:
        raise AssertionError(f"{spec.name} reported {q} queries, oracle counted {oracle.total_queries}")
    return RunRecord(
        spec.name, _describe(tunables), str(f), distribution, X.to_hex(), seed, int(out), out == truth,
        q, oracle.bit_queries, q if spec.unit is Unit.BLOCK else None, time.perf_counter() - t0,
    )


def _resolve(algorithm, f, overrides):
    spec = algs.get(algorithm) if isinstance(algorithm, str) else algorithm
    return spec, spec.tunables(f, **(overrides or {}))


def _mc_chunk(args):
    name, overrides, f, mu, seed, experiment, indices = args
    spec, tun = _resolve(name, f, overrides)
    out = []
    for k in indices:
        rng = derive_rng(seed, experiment, k)
        X = dist.sample(mu, rng)
        out.append(run_once(spec, f, X, rng, tun, seed, str(mu)))
    return out


def _chunks(n: int, jobs: int):
    size = max(1, math.ceil(n / (jobs * 4)))
    return [range(i, min(n, i + size)) for i in range(0, n, size)]


def monte_carlo_records(algorithm, f, mu, trials, seed, experiment="run", tunables=None, jobs=1):
    if f.arity != mu.N:
        raise InputShapeError("function and distribution arities differ")
    name = algorithm if isinstance(algorithm, str) else algorithm.name
    tasks = [(name, tunables, f, mu, seed, experiment, idx) for idx in _chunks(trials, max(jobs, 1))]
    if jobs <= 1:
        parts = [_mc_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(_mc_chunk, tasks))
    return [r for p in parts for r in p]


def summarize(records: Sequence[RunRecord], mode: str = "monte-carlo") -> SummaryStats:
    q = np.array([r.queries for r in records], dtype=float)
    bq = np.array([r.bit_queries for r in records], dtype=float)
    ok = np.array([r.correct for r in records], dtype=float)
    n = len(records)
    se = float(q.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return SummaryStats(float(q.mean()), se, float(ok.mean()), None, n, mode, float(bq.mean()))


def avg_complexity(algorithm, f: BooleanFunction, mu: dist.InputDistribution, trials: int = 1000,
                   seed: int = 0, exact: bool = False, inner_reps: int = 100, experiment: str = "avg",
                   tunables: Optional[dict] = None, jobs: int = 1, return_records: bool = False):
    """Estimate T_A^mu = sum_X mu(X) T_A(X).

    Monte Carlo: draw X ~ mu and run once per trial.  Exact: enumerate the
    support, run ``inner_reps`` times per input and weight by the exact pmf.
    """
    if f.arity != mu.N:
        raise InputShapeError("function and distribution arities differ")
    if not exact:
        recs = monte_carlo_records(algorithm, f, mu, trials, seed, experiment, tunables, jobs)
        s = summarize(recs)
        return (s, recs) if return_records else s
    if inner_reps < 100:
        raise ValueError("exact mode uses at least 100 inner repetitions")
    spec, tun = _resolve(algorithm, f, tunables)
    bound = len(mu.table) if mu.kind == "table" else 2**mu.N
    if bound > EXACT_SUPPORT_CAP:
        raise SizeCapError(f"{mu} may have {bound} support points; the exact-mode cap is {EXACT_SUPPORT_CAP}")
    support = list(dist.support_enumerate(mu))
    mean = var = mean_bits = 0.0
    min_rate = 1.0
    ok_total = 0.0
    recs = []
    for k, (X, p) in enumerate(support):
        rs = [run_once(spec, f, X, derive_rng(seed, experiment, k, r), tun, seed, str(mu))
              for r in range(inner_reps)]
        q = np.array([r.queries for r in rs], dtype=float)
        rate = float(np.mean([r.correct for r in rs]))
        mean += p * q.mean()
        mean_bits += p * float(np.mean([r.bit_queries for r in rs]))
        var += p * p * q.var(ddof=1) / inner_reps
        min_rate = min(min_rate, rate)
        ok_total += p * rate
        if return_records:
            recs.extend(rs)
    s = SummaryStats(float(mean), math.sqrt(var), ok_total, min_rate, len(support) * inner_reps,
                     "exact-enumeration", mean_bits)
    return (s, recs) if return_records else s


# -- certification ----------------------------------------------------------

@dataclass
class CertifyReport:
    algorithm: str
    function: str
    inputs: int
    trials_per_input: int
    rates: list
    min_rate: float
    sigma: float
    zero_error: bool
    passed: bool
    mean_queries: float


def all_inputs(N: int, block_width: Optional[int] = None) -> list[BitInput]:
    if N > 20:
        raise SizeCapError("exhaustive inputs are capped at N = 20")
    return [BitInput.from_int(v, N, block_width) for v in range(1 << N)]


def certify_bounded_error(algorithm, f: BooleanFunction, inputs: Optional[Iterable[BitInput]] = None,
                          trials_per_input: int = 200, seed: int = 0, experiment: str = "certify",
                          tunables: Optional[dict] = None, sample_inputs: int = 1000) -> CertifyReport:
    """Per-input success rates; PASS iff min rate >= 2/3 - 3 sigma (1.0 for zero-error)."""
    spec, tun = _resolve(algorithm, f, tunables)
    if inputs is None:
        if f.arity <= 10:
            inputs = all_inputs(f.arity, f.n)
        else:
            rng = derive_rng(seed, experiment, "inputs")
            mu = dist.simon_d1(f.n) if f.n else dist.uniform(f.arity)
            inputs = [dist.sample(mu, rng) for _ in range(sample_inputs)]
    inputs = list(inputs)
    rates, qs = [], []
    for k, X in enumerate(inputs):
        rs = [run_once(spec, f, X, derive_rng(seed, experiment, k, r), tun, seed)
              for r in range(trials_per_input)]
        rates.append(float(np.mean([r.correct for r in rs])))
        qs.append(float(np.mean([r.queries for r in rs])))
    sigma = math.sqrt((2 / 3) * (1 / 3) / trials_per_input)
    min_rate = min(rates)
    passed = min_rate == 1.0 if spec.zero_error else min_rate >= 2 / 3 - 3 * sigma
    return CertifyReport(spec.name, str(f), len(inputs), trials_per_input, rates, min_rate, sigma,
                         spec.zero_error, passed, float(np.mean(qs)))


# -- scaling sweeps ---------------------------------------------------------

@dataclass
class SweepResult:
    sizes: list
    stats: list
    slope: float
    slope_stderr: float
    intercept: float
    slope_ci: tuple

    def rows(self, seed: int) -> list[dict]:
        return [
            {"size": N, "trials": s.trials, "mean_queries": s.mean_queries, "stderr": s.stderr,
             "min_success_rate": s.min_success_rate if s.min_success_rate is not None else s.success_rate,
             "mode": s.mode, "seed": seed}
            for N, s in zip(self.sizes, self.stats)
        ]


def fit_loglog(sizes: Sequence[float], means: Sequence[float]):
    """Least-squares slope of log(mean) on log(size) with a 95% interval."""
    if len(sizes) < 3:
        raise ValueError("a slope fit needs at least 3 sizes")
    x, y = np.log(np.asarray(sizes, float)), np.log(np.asarray(means, float))
    fit = stats.linregress(x, y)
    half = stats.t.ppf(0.975, len(sizes) - 2) * fit.stderr
    return float(fit.slope), float(fit.stderr), float(fit.intercept), (fit.slope - half, fit.slope + half)


def scaling_sweep(algorithm, function_family: Callable[[int], BooleanFunction],
                  mu_family: Callable[[int], dist.InputDistribution], sizes: Sequence[int], trials: int = 1000,
                  seed: int = 0, experiment: str = "sweep", tunables: Optional[dict] = None,
                  jobs: int = 1) -> SweepResult:
    if len(sizes) < 3:
        raise ValueError("a scaling sweep needs at least 3 sizes")
    out = []
    for N in sizes:
        out.append(avg_complexity(algorithm, function_family(N), mu_family(N), trials, seed,
                                  experiment=f"{experiment}/{N}", tunables=tunables, jobs=jobs))
    slope, se, icpt, ci = fit_loglog(sizes, [s.mean_queries for s in out])
    return SweepResult(list(sizes), out, slope, se, icpt, (float(ci[0]), float(ci[1])))


# -- D1 versus D2 ------------------------------------------------------------

def transcript_decider(oracle: CountingOracle, rng: np.random.Generator, m: int) -> int:
    """Query m random distinct blocks; say 1 ('periodic') iff two answers coincide."""
    q = rng.choice(oracle.size, m, replace=False)
    answers = [oracle.query(int(i)) for i in q]
    return int(len(set(answers)) < m)


def birthday_decider(oracle: CountingOracle, rng: np.random.Generator, m: int) -> int:
    """Say 1 iff some XOR difference is shared by at least two colliding pairs.

    Under D2 every queried pair {i, i^k} collides with the same difference
    k; under D1 collisions are scattered over random differences.
    """
    q = [int(i) for i in rng.choice(oracle.size, m, replace=False)]
    seen: dict[int, list[int]] = {}
    for i in q:
        seen.setdefault(oracle.query(i), []).append(i)
    diffs: dict[int, int] = {}
    for group in seen.values():
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                d = group[a] ^ group[b]
                diffs[d] = diffs.get(d, 0) + 1
                if diffs[d] >= 2:
                    return 1
    return 0


def full_decider(oracle: CountingOracle, rng: np.random.Generator, m: int) -> int:
    blocks = np.array([oracle.query(i) for i in range(oracle.size)], dtype=np.int64)
    return int(periods(blocks, oracle.value_bits).size > 0)


DECIDERS = {"transcript": transcript_decider, "birthday": birthday_decider, "full": full_decider}


@dataclass
class DistinguishResult:
    n: int
    m: int
    trials: int
    decider: str
    p0_d1: float
    p0_d2: float
    timeouts: int

    @property
    def gap(self) -> float:
        return self.p0_d1 - self.p0_d2

    @property
    def sigma(self) -> float:
        v = self.p0_d1 * (1 - self.p0_d1) + self.p0_d2 * (1 - self.p0_d2)
        return math.sqrt(max(v, 1e-12) / self.trials)


def truncated(decider, budget: int):
    """Stop a decider after ``budget`` queries and answer 1 (the timeout rule)."""
    def run(oracle, rng, m):
        oracle.budget = budget
        try:
            return decider(oracle, rng, m), False
        except QueryBudgetExceeded:
            return 1, True
    return run


def distinguishing_experiment(n: int, m: int, trials: int = 5000, seed: int = 0, decider: str = "transcript",
                              budget_factor: int = 10, experiment: str = "distinguish",
                              amplify: int = 1) -> DistinguishResult:
    """Pr[output 0 | D1] - Pr[output 0 | D2] for a query-bounded classical decider.

    ``amplify`` > 1 takes the majority of that many independent truncated
    runs on the same input (ties answer 1).
    """
    if not 1 <= m <= 2**n:
        raise ValueError(f"m must lie in [1, 2^{n}]")
    if amplify < 1:
        raise ValueError("amplify must be >= 1")
    run = truncated(DECIDERS[decider], budget_factor * m)
    zeros = {"d1": 0, "d2": 0}
    timeouts = 0
    for label, mu in (("d1", dist.simon_d1(n)), ("d2", dist.simon_d2(n))):
        for k in range(trials):
            rng = derive_rng(seed, experiment, label, k)
            X = dist.sample(mu, rng)
            votes = [run(CountingOracle(X, Unit.BLOCK), rng, m) for _ in range(amplify)]
            zeros[label] += 2 * sum(out == 0 for out, _ in votes) > amplify
            timeouts += sum(t for _, t in votes)
    return DistinguishResult(n, m, trials, decider, zeros["d1"] / trials, zeros["d2"] / trials, timeouts)


# -- persistence ------------------------------------------------------------

CSV_COLUMNS = ["size", "trials", "mean_queries", "stderr", "min_success_rate", "mode", "seed"]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else v


def write_csv(rows: Sequence[dict], path, columns: Sequence[str] = CSV_COLUMNS) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r.get(c)) for c in columns])


def write_summary(summary: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def write_records(records: Sequence[RunRecord], path, include_time: bool = False) -> None:
    cols = ["algorithm", "function", "distribution", "input_hex", "seed", "output", "correct",
            "queries", "bit_queries", "block_queries"] + (["wall_time"] if include_time else [])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols + ["tunables"])
        for r in records:
            d = asdict(r)
            w.writerow([_fmt(d[c]) for c in cols] + [json.dumps(r.tunables, sort_keys=True)])
