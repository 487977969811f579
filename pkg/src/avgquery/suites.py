"""Acceptance suites run by ``avgquery verify``.

Each suite returns a list of :class:`Criterion` results plus the experiment
tables it produced.  Everything is driven by the master seed, so two runs
with the same seed write identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import algorithms as algs
from . import bounds
from . import distributions as dist
from . import harness as h
from .algorithms import counting
from .oracle import MAJ, OR, PARITY, SIMON, THRESHOLD, BitInput, CountingOracle

SUITES = ("simon", "or-gap", "majority", "parity", "bounds")


@dataclass
class Criterion:
    number: int
    name: str
    passed: bool
    measured: dict
    threshold: str

    def line(self) -> str:
        vals = ", ".join(f"{k}={_short(v)}" for k, v in self.measured.items())
        return f"{'PASS' if self.passed else 'FAIL'}  [{self.number}] {self.name}: {vals}  (need {self.threshold})"


@dataclass
class SuiteResult:
    suite: str
    criteria: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)  # experiment id -> harness CSV rows

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)


def _short(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(str(_short(x)) for x in v) + "]"
    return v


def _row(size, s: h.SummaryStats, seed):
    return {"size": size, "trials": s.trials, "mean_queries": s.mean_queries, "stderr": s.stderr,
            "min_success_rate": s.min_success_rate if s.min_success_rate is not None else s.success_rate,
            "mode": s.mode, "seed": seed}


# -- simon -----------------------------------------------------------------

def suite_simon(seed: int, trials: int = 10_000, dist_trials: int = 5000) -> SuiteResult:
    res = SuiteResult("simon")
    rows, means, errors, first = [], {}, 0, None
    for n in (3, 4, 5):
        s, recs = h.avg_complexity("simon_zero_error", SIMON(n), dist.simon_d1(n), trials, seed,
                                   experiment=f"simon/{n}", return_records=True)
        rows.append(_row(n, s, seed))
        means[n] = s.mean_queries
        errors += sum(not r.correct for r in recs)
        if n == 4:
            m = 22 * n
            first = sum(r.queries == m and r.output == 0 for r in recs) / len(recs)
    res.tables["simon_block_queries"] = rows
    res.criteria.append(Criterion(
        1, "simon mean block queries", all(means[n] <= 22 * n + 1 for n in means) and errors == 0,
        {"mean_n3": means[3], "mean_n4": means[4], "mean_n5": means[5], "errors": errors},
        "mean <= 22n+1 for n=3,4,5 and 0 errors"))
    p = 1 - 2**-4
    sigma = math.sqrt(p * (1 - p) / trials)
    res.criteria.append(Criterion(
        2, "simon first phase decides (n=4)", first >= p - 3 * sigma,
        {"fraction": first, "sigma": sigma}, f">= {p - 3 * sigma:.4f}"))
    small = h.distinguishing_experiment(8, 4, dist_trials, seed, "transcript", experiment="dist/4")
    big = h.distinguishing_experiment(8, 64, dist_trials, seed, "birthday", experiment="dist/64")
    ok = small.gap <= 0.05 + 3 * small.sigma and big.gap >= 1 / 3 - 3 * big.sigma
    res.criteria.append(Criterion(
        3, "D1/D2 distinguishing at n=8", ok,
        {"gap_m4": small.gap, "sigma_m4": small.sigma, "gap_m64": big.gap, "sigma_m64": big.sigma},
        "gap(m=4) <= 0.05+3s, gap(m=64) >= 1/3-3s"))
    return res


# -- or-gap ------------------------------------------------------------------

def suite_or_gap(seed: int, trials: int = 6000) -> SuiteResult:
    res = SuiteResult("or-gap")
    sizes = [2**k for k in range(8, 15)]
    fam = lambda N: dist.or_alpha(N, 0.4)  # noqa: E731
    cl = h.scaling_sweep("classical_or_sampler", OR, fam, sizes, trials, seed, experiment="or/classical")
    qu = h.scaling_sweep("grover_or", OR, fam, sizes, trials, seed, experiment="or/grover")
    res.tables["or_classical"] = cl.rows(seed)
    res.tables["or_grover"] = qu.rows(seed)
    qmax = max(s.mean_queries for s in qu.stats)
    ok = abs(cl.slope - 0.4) <= 0.1 and abs(qu.slope) <= 0.1 and qmax <= 40
    res.criteria.append(Criterion(
        6, "OR gap under or_alpha(0.4)", ok,
        {"classical_slope": cl.slope, "grover_slope": qu.slope, "grover_max_mean": qmax},
        "classical 0.4+-0.1, grover 0.0+-0.1, grover mean <= 40"))
    return res


# -- majority ----------------------------------------------------------------

def qcount_guarantee(seed: int, N: int = 16, T: int = 16, trials: int = 10_000):
    """Empirical Pr[|t - estimate| <= bound] for every weight t."""
    rates = []
    for t in range(N + 1):
        rng = h.derive_rng(seed, "qcount", t)
        oracle = CountingOracle(BitInput.from_int((1 << t) - 1, N))
        bound = counting.qcount_bound(t, N, T, 1)
        hits = sum(abs(t - counting.qcount(oracle, T, 1, rng, "closed_form")) <= bound + 1e-9
                   for _ in range(trials))
        rates.append(hits / trials)
    return rates


def circuit_tv(N: int = 8, T: int = 8) -> float:
    worst = 0.0
    for t in range(N + 1):
        X = BitInput.from_int((1 << t) - 1, N)
        a = counting.circuit_outcome_distribution(CountingOracle(X), T)
        b = counting.outcome_distribution(N, T, t)
        worst = max(worst, 0.5 * float(np.abs(a - b).sum()))
    return worst


def suite_majority(seed: int, qc_trials: int = 10_000, mc_trials: int = 10_000) -> SuiteResult:
    res = SuiteResult("majority")
    rates = qcount_guarantee(seed, trials=qc_trials)
    tv = circuit_tv()
    floor = 8 / math.pi**2 - 0.03
    res.criteria.append(Criterion(
        4, "QCount guarantee N=16 T=16", min(rates) >= floor and tv <= 1e-6,
        {"min_rate": min(rates), "worst_t": int(np.argmin(rates)), "circuit_tv": tv},
        f"every rate >= {floor:.4f}, TV <= 1e-6"))

    sizes = [16, 32, 64, 128, 256]
    means = [counting.majority_uniform_average(N) for N in sizes]
    slope, se, _, ci = h.fit_loglog(sizes, means)
    res.tables["majority_uniform_exact"] = [
        {"size": N, "trials": 0, "mean_queries": m, "stderr": 0.0, "min_success_rate": "", "mode": "exact-profile",
         "seed": seed} for N, m in zip(sizes, means)]
    # Monte Carlo run of the real algorithm must agree with the exact profile
    mc = h.avg_complexity("majority_avg", MAJ(16), dist.uniform(16), 2000, seed, experiment="maj/mc16")
    mc_ok = abs(mc.mean_queries - means[0]) <= 3 * mc.stderr
    N, T = 1024, math.ceil(1024 / 10)
    err_half = float(counting.majority_sampler_tail(N, N // 2, T))
    err_above = 1 - float(counting.majority_sampler_tail(N, N // 2 + 32, T))
    mc_err = []
    for w, exact in ((N // 2, err_half), (N // 2 + 32, err_above)):
        rng = h.derive_rng(seed, "classical-sampler", w)
        truth = int(2 * w > N)
        X = BitInput.from_int((1 << w) - 1, N)
        wrong = sum(counting.classical_majority_sampler(CountingOracle(X), T, rng) != truth for _ in range(mc_trials))
        rate = wrong / mc_trials
        mc_err.append((rate, abs(rate - exact) <= 3 * math.sqrt(exact * (1 - exact) / mc_trials)))
    classical_ok = min(err_half, err_above) >= 0.25 and all(ok for _, ok in mc_err)
    res.criteria.append(Criterion(
        5, "MAJORITY scaling and classical sampling error", 0.5 <= slope <= 0.75 and mc_ok and classical_ok,
        {"slope": slope, "slope_ci": [float(ci[0]), float(ci[1])], "mc16_agrees": mc_ok,
         "classical_err_half": err_half, "classical_err_above": err_above,
         "mc_err": [r for r, _ in mc_err]},
        "slope in [0.5, 0.75]; classical errors >= 0.25 (exact, MC within 3s)"))
    return res


# -- parity ------------------------------------------------------------------

ADVERSARIAL = ["000000", "111111", "101010", "010101", "100000", "000001", "110000", "111110", "011011", "100100"]


def suite_parity(seed: int, wrapper_trials: int = 10_000, reduce_trials: int = 2000) -> SuiteResult:
    res = SuiteResult("parity")
    exact_ok = True
    for k, X in enumerate(h.all_inputs(8)):
        for r in range(3):
            rec = h.run_once(algs.get("parity_exact_quantum"), PARITY(8), X, h.derive_rng(seed, "pex", k, r), {})
            exact_ok &= rec.correct and rec.queries == 4
    cert = h.certify_bounded_error("parity_third_wrapper", PARITY(6), h.all_inputs(6), wrapper_trials, seed,
                                   experiment="wrapper")
    rates = np.array(cert.rates)
    mean_ok = abs(cert.mean_queries - 1.0) <= 0.02
    rate_ok = bool(np.all(np.abs(rates - 2 / 3) <= 0.02))
    spec = algs.get("parity_self_reduce")
    tun = spec.tunables(PARITY(6))
    qs = []
    for k, text in enumerate(ADVERSARIAL):
        X = BitInput(np.array([int(c) for c in text], dtype=np.uint8))
        for r in range(reduce_trials):
            qs.append(h.run_once(spec, PARITY(6), X, h.derive_rng(seed, "reduce", k, r), tun).queries)
    red_mean = float(np.mean(qs))
    red_ok = abs(red_mean - cert.mean_queries) <= 0.05 * cert.mean_queries
    res.tables["parity_wrapper_n6"] = [{"size": 6, "trials": cert.inputs * wrapper_trials,
                                        "mean_queries": cert.mean_queries, "stderr": "",
                                        "min_success_rate": cert.min_rate, "mode": "exhaustive", "seed": seed}]
    res.criteria.append(Criterion(
        7, "PARITY exact, wrapper and self-reduction", exact_ok and mean_ok and rate_ok and red_ok,
        {"exact_n8_ok": exact_ok, "wrapper_mean": cert.mean_queries, "rate_min": float(rates.min()),
         "rate_max": float(rates.max()), "self_reduce_mean": red_mean},
        "exact 4 queries always; mean 1 +-2%; rates 2/3 +-0.02; self-reduce within 5%"))
    return res


# -- bounds ------------------------------------------------------------------

BS_BOUND_PAIRS = [
    # algorithm, function, distribution, bs mode; costs are compared in bit queries
    ("threshold_sampler", lambda: THRESHOLD(1024), lambda: dist.uniform(1024), "linear"),
    ("classical_or_sampler", lambda: OR(1024), lambda: dist.or_alpha(1024, 0.4), "linear"),
    ("grover_or", lambda: OR(1024), lambda: dist.or_alpha(1024, 0.4), "sqrt"),
    ("majority_avg", lambda: MAJ(16), lambda: dist.uniform(16), "sqrt"),
    ("parity_exact_quantum", lambda: PARITY(8), lambda: dist.uniform(8), "sqrt"),
    ("parity_third_wrapper", lambda: PARITY(8), lambda: dist.uniform(8), "sqrt"),
    ("simon_zero_error", lambda: SIMON(2), lambda: dist.simon_d1(2), "sqrt"),
]


def bs_bound_constants(seed: int, trials: int = 2000) -> dict:
    out = {}
    for name, f, mu, mode in BS_BOUND_PAIRS:
        f, mu = f(), mu()
        s = h.avg_complexity(name, f, mu, trials, seed, experiment=f"t5/{name}")
        e = bounds.expected_bs(f, mu, mode).value
        out[name] = s.mean_bit_queries / e
    return out


def suite_bounds(seed: int, thr_trials: int = 2000, cert_trials: int = 200) -> SuiteResult:
    res = SuiteResult("bounds")
    bs_ok = all(bounds.block_sensitivity(PARITY(10), X, generic=True) == 10 for X in h.all_inputs(10))
    counts = [bounds.simon_one_inputs_count(n) for n in (1, 2)]
    count_ok = all(c.within_bounds for c in counts)
    dval, _ = bounds.optimal_avg_dtree(PARITY(6), dist.uniform(6))
    consts = bs_bound_constants(seed)
    c_min = min(consts.values())
    res.criteria.append(Criterion(
        8, "bounds toolkit", bs_ok and count_ok and dval == 6 and c_min >= 0.1,
        {"bs_parity_n10_all_10": bs_ok, "simon_counts": [c.count for c in counts], "dtree_parity6": dval,
         "c_min": c_min, "c_argmin": min(consts, key=consts.get)},
        "bs=N everywhere; counts within bounds; D=6; c >= 1/10"))
    sweep_sizes = [2**k for k in range(8, 13)]
    stats = [h.avg_complexity("threshold_sampler", THRESHOLD(N), dist.uniform(N), thr_trials, seed,
                              experiment=f"thr/{N}") for N in sweep_sizes]
    res.tables["threshold_uniform"] = [_row(N, s, seed) for N, s in zip(sweep_sizes, stats)]
    cert = h.certify_bounded_error("threshold_sampler", THRESHOLD(10), h.all_inputs(10), cert_trials, seed,
                                   experiment="thr/cert")
    worst = max(s.mean_queries for s in stats)
    res.criteria.append(Criterion(
        9, "threshold sampler constant cost", worst <= 30 and cert.passed,
        {"max_mean": worst, "cert_min_rate": cert.min_rate, "cert_sigma": cert.sigma},
        "mean <= 30 for N=2^8..2^12; certified at N=10"))
    return res


RUNNERS = {"simon": suite_simon, "or-gap": suite_or_gap, "majority": suite_majority,
           "parity": suite_parity, "bounds": suite_bounds}


def run_suite(name: str, seed: int) -> list[SuiteResult]:
    names = SUITES if name == "all" else (name,)
    unknown = [n for n in names if n not in RUNNERS]
    if unknown:
        raise KeyError(f"unknown suite {unknown[0]!r}; choose from {', '.join(SUITES + ('all',))}")
    return [RUNNERS[n](seed) for n in names]


def write_results(results: list[SuiteResult], out: Path, seed: int) -> None:
    out.mkdir(parents=True, exist_ok=True)
    summary = {"seed": seed, "suites": {}}
    for r in results:
        for exp, rows in r.tables.items():
            h.write_csv(rows, out / f"{exp}.csv")
        summary["suites"][r.suite] = {
            "passed": r.passed,
            "criteria": [{"number": c.number, "name": c.name, "passed": c.passed, "measured": c.measured,
                          "threshold": c.threshold} for c in r.criteria],
            "tables": sorted(r.tables),
        }
    h.write_summary(summary, out / "verify_summary.json")
