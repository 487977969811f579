"""Exact combinatorial quantities behind the average-case bounds."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import distributions as dist
from .oracle import (
    BitInput, BooleanFunction, InputShapeError, SizeCapError, periods, simon_value,
)

GENERIC_BS_CAP = 16
DTREE_CAP = 14


# -- block sensitivity -----------------------------------------------------

def symmetric_block_sensitivity(f: BooleanFunction, w: int) -> int:
    """bs_X(f) for symmetric f on any X of weight w.

    A sensitive block that flips a ones and b zeros moves the weight by
    b - a, and the pure block of |b - a| bits of one kind inside it moves it
    the same way, so minimal blocks are pure.  The best packing therefore
    uses the smallest sensitive size on each side.
    """
    N = f.arity
    v = f.weight_profile()
    here = v[w]
    a_min = next((a for a in range(1, w + 1) if v[w - a] != here), None)
    b_min = next((b for b in range(1, N - w + 1) if v[w + b] != here), None)
    return (w // a_min if a_min else 0) + ((N - w) // b_min if b_min else 0)


def minimal_sensitive_blocks(f: BooleanFunction, X: BitInput) -> list[int]:
    """Bitmasks S, minimal under inclusion, with f(X^S) != f(X)."""
    N = X.N
    if N > GENERIC_BS_CAP:
        raise SizeCapError(f"generic block sensitivity is capped at N = {GENERIC_BS_CAP}")
    tt = f.truth_table()
    x = X.to_int()
    S = np.arange(1 << N, dtype=np.int64)
    sens = tt[x ^ S] != tt[x]
    # has[S]: some subset of S (S included) is sensitive
    has = sens.copy()
    for i in range(N):
        bit = 1 << i
        up = (S & bit) != 0
        has[up] |= has[S[up] ^ bit]
    proper = np.zeros_like(has)
    for i in range(N):
        bit = 1 << i
        up = (S & bit) != 0
        proper[up] |= has[S[up] ^ bit]
    return [int(s) for s in np.flatnonzero(sens & ~proper)]


def max_disjoint_packing(blocks: Sequence[int], N: int) -> int:
    by_low: dict[int, list[int]] = {}
    for b in blocks:
        by_low.setdefault((b & -b).bit_length() - 1, []).append(b)
    memo: dict[int, int] = {}

    def best(avail: int) -> int:
        if avail == 0:
            return 0
        if avail in memo:
            return memo[avail]
        low = avail & -avail
        e = low.bit_length() - 1
        rest = avail ^ low
        # blocks whose lowest element is below e no longer fit, since e is the lowest free bit
        result = best(rest)
        for b in by_low.get(e, ()):
            if b & avail == b:
                result = max(result, 1 + best(avail ^ b))
        memo[avail] = result
        return result

    return best((1 << N) - 1)


def block_sensitivity(f: BooleanFunction, X: BitInput, generic: bool = False) -> int:
    if f.arity != X.N:
        raise InputShapeError("arity mismatch")
    if f.is_symmetric and not generic:
        return symmetric_block_sensitivity(f, X.weight)
    return max_disjoint_packing(minimal_sensitive_blocks(f, X), X.N)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    exact: bool

    def __float__(self):
        return self.value


def expected_bs(f: BooleanFunction, mu: dist.InputDistribution, mode: str = "linear",
                trials: int = 2000, rng: Optional[np.random.Generator] = None) -> Estimate:
    """E_mu[bs_X(f)] (mode 'linear') or E_mu[sqrt(bs_X(f))] (mode 'sqrt')."""
    if mode not in ("linear", "sqrt"):
        raise ValueError(f"mode must be 'linear' or 'sqrt', not {mode!r}")
    g = (lambda b: b) if mode == "linear" else math.sqrt
    if f.arity != mu.N:
        raise InputShapeError("arity mismatch")
    if f.is_symmetric and mu.exchangeable:
        p = mu.weight_pmf()
        vals = [g(symmetric_block_sensitivity(f, w)) for w in range(f.arity + 1)]
        return Estimate(math.fsum(pi * vi for pi, vi in zip(p, vals)), 0.0, True)
    limit = dist.ENUMERATION_CAP if f.is_symmetric else GENERIC_BS_CAP
    if mu.N <= limit or mu.kind == "table":
        total = math.fsum(p * g(block_sensitivity(f, X)) for X, p in dist.support_enumerate(mu, cap=limit))
        return Estimate(total, 0.0, True)
    if rng is None:
        raise SizeCapError(f"{mu} is not enumerable; pass rng for a Monte Carlo estimate")
    xs = np.array([g(block_sensitivity(f, dist.sample(mu, rng))) for _ in range(trials)])
    return Estimate(float(xs.mean()), float(xs.std(ddof=1) / math.sqrt(trials)), False)


# -- optimal average-case deterministic decision trees ---------------------

def tree_evaluate(tree, x: int) -> int:
    while tree[0] == "query":
        _, i, zero, one = tree
        tree = one if (x >> i) & 1 else zero
    return tree[1]


def tree_depth_cost(tree, x: int) -> int:
    q = 0
    while tree[0] == "query":
        q += 1
        tree = tree[3] if (x >> tree[1]) & 1 else tree[2]
    return q


def tree_text(tree, indent: str = "") -> str:
    if tree[0] == "leaf":
        return f"{indent}-> {tree[1]}\n"
    _, i, zero, one = tree
    return (f"{indent}x{i} = 0:\n" + tree_text(zero, indent + "  ")
            + f"{indent}x{i} = 1:\n" + tree_text(one, indent + "  "))


def optimal_avg_dtree(f: BooleanFunction, mu: dist.InputDistribution, cap: int = DTREE_CAP):
    """Minimal mu-expected query count over trees correct on every input.

    Memoised recursion over restriction states (queried mask, answers).  The
    stored value is mass(state) times the optimal conditional remaining cost,
    so mu-null states cost 0 yet still receive a correct subtree.
    Returns (value, tree) with trees as ('leaf', b) / ('query', i, t0, t1).
    """
    N = f.arity
    if N > cap:
        raise SizeCapError(f"decision-tree DP is capped at N = {cap}")
    if mu.N != N:
        raise InputShapeError("arity mismatch")
    tt = f.truth_table().astype(np.int8)
    pm = dist.pmf_vector(mu)
    full = np.arange(1 << N, dtype=np.int64)
    memo: dict = {}

    def solve(mask: int, vals: int, idx: np.ndarray):
        key = (mask, vals)
        if key in memo:
            return memo[key]
        sub = tt[idx]
        if sub.min() == sub.max():
            res = (0.0, ("leaf", int(sub[0])))
            memo[key] = res
            return res
        mass = float(pm[idx].sum())
        best = None
        for i in range(N):
            bit = 1 << i
            if mask & bit:
                continue
            one = (idx & bit) != 0
            c0, t0 = solve(mask | bit, vals, idx[~one])
            c1, t1 = solve(mask | bit, vals | bit, idx[one])
            cost = mass + c0 + c1
            if best is None or cost < best[0] - 1e-15:
                best = (cost, ("query", i, t0, t1))
            if mass == 0.0:
                break  # any correct subtree is optimal on a null state
        memo[key] = best
        return best

    value, tree = solve(0, 0, full)
    for x in range(1 << N):
        if tree_evaluate(tree, x) != tt[x]:
            raise AssertionError("decision tree disagrees with f")
    return value, tree


# -- Simon-variant counts --------------------------------------------------

@dataclass(frozen=True)
class SimonCount:
    n: int
    count: int
    total: int
    bound: int
    fraction: Fraction
    fraction_bound: Fraction

    @property
    def within_bounds(self) -> bool:
        return self.count <= self.bound and self.fraction < self.fraction_bound


def simon_one_inputs_count(n: int) -> SimonCount:
    """Exact number of 1-inputs of SIMON(n) by full enumeration (n <= 3)."""
    if n < 1 or n > 3:
        raise SizeCapError("simon_one_inputs_count enumerates 2^(n 2^n) inputs; n must be 1..3")
    count = 0
    for bits, _ in dist._simon_chunks(n):
        count += int(np.count_nonzero(dist._period_counts(dist._blocks(bits, n), n) > 0))
    total = 1 << (n * 2**n)
    half = 2**n // 2
    bound = (2**n - 1) * (2**n) ** half
    fraction_bound = Fraction(1, 2 ** (n * (half - 1)))
    res = SimonCount(n, count, total, bound, Fraction(count, total), fraction_bound)
    return res


def simon_one_inputs_recount(n: int) -> int:
    """Second, independent count that tests every input with simon_value."""
    if n > 2:
        raise SizeCapError("recount is for n <= 2")
    N = n * 2**n
    return sum(simon_value(BitInput.from_int(v, N, n)) for v in range(1 << N))


# -- D1 / D2 distinguishing statistics ---------------------------------------

@dataclass(frozen=True)
class DistinguishingReport:
    n: int
    m: int
    trials: int
    all_distinct_d1: float
    all_distinct_d2: float
    pair_hit_d2: float
    d1_floor: float
    pair_hit_ceiling: float

    def sigma(self, p: float) -> float:
        return math.sqrt(max(p * (1 - p), 0.0) / self.trials)

    @property
    def d1_ok(self) -> bool:
        return self.all_distinct_d1 >= self.d1_floor - 3 * max(self.sigma(self.all_distinct_d1), 1 / self.trials)

    @property
    def pair_hit_ok(self) -> bool:
        return self.pair_hit_d2 <= self.pair_hit_ceiling + 3 * max(self.sigma(self.pair_hit_d2), 1 / self.trials)


def distinguishing_statistics(n: int, m: int, trials: int, rng: np.random.Generator) -> DistinguishingReport:
    """Answers to m random distinct block queries under D1 and D2."""
    size = 2**n
    if not 1 <= m <= size:
        raise ValueError(f"m must lie in [1, {size}]")
    d1, d2 = dist.simon_d1(n), dist.simon_d2(n)
    distinct1 = distinct2 = hits = 0
    for _ in range(trials):
        q = rng.choice(size, m, replace=False)
        b1 = dist.sample(d1, rng).blocks[q]
        X2 = dist.sample(d2, rng)
        b2 = X2.blocks[q]
        k = int(periods(X2.blocks, n)[0])
        distinct1 += np.unique(b1).size == m
        distinct2 += np.unique(b2).size == m
        qs = set(int(v) for v in q)
        hits += any((i ^ k) in qs for i in qs)
    return DistinguishingReport(
        n, m, trials,
        distinct1 / trials, distinct2 / trials, hits / trials,
        d1_floor=1 - m * (m - 1) / 2 ** (n + 1),
        pair_hit_ceiling=math.comb(m, 2) / (size - 1),
    )


# -- averaging a pointwise concave relation --------------------------------

@dataclass(frozen=True)
class JensenReport:
    pointwise: bool
    aggregate: bool
    lhs: float
    rhs: float

    @property
    def verdict(self) -> bool:
        return (not self.pointwise) or self.aggregate


def jensen_check(pairs: Sequence[tuple], weights: Sequence[float], phi: Callable[[float], float],
                 tol: float = 1e-12) -> JensenReport:
    """Check that T_A <= phi(T_B) pointwise carries over to the mu-averages."""
    if len(pairs) != len(weights):
        raise InputShapeError("need one weight per support point")
    if not math.isclose(math.fsum(weights), 1.0, abs_tol=1e-9):
        raise InputShapeError("weights do not cover the support (sum != 1)")
    pointwise = all(a <= phi(b) + tol for a, b in pairs)
    lhs = math.fsum(w * a for w, (a, _) in zip(weights, pairs))
    rhs = phi(math.fsum(w * b for w, (_, b) in zip(weights, pairs)))
    return JensenReport(pointwise, lhs <= rhs + tol, lhs, rhs)


def write_report_csv(rows: Sequence[tuple], path) -> None:
    """Rows of (quantity, exact-or-estimate, value, margin)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["quantity", "kind", "value", "margin"])
        for r in rows:
            w.writerow(r)
