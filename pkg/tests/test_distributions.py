import math

import numpy as np
import pytest
from scipy import stats

from avgquery import bounds
from avgquery import distributions as d
from avgquery.oracle import BitInput, ParameterError, periods, simon_value

C_1024 = 0.6062687194761054  # exact normaliser at N = 2^10, alpha = 0.4, from direct summation


def test_uniform_pmf():
    assert d.pmf(d.uniform(4), BitInput.from_int(5, 4)) == pytest.approx(1 / 16)


def test_or_alpha_weight_classes_sum_to_one():
    assert math.fsum(d.or_alpha(16, 0.4).weight_pmf()) == pytest.approx(1.0, abs=1e-9)


def test_or_alpha_pmf_sums_over_inputs():
    mu = d.or_alpha(10, 0.3)
    assert math.fsum(p for _, p in d.support_enumerate(mu)) == pytest.approx(1.0, abs=1e-9)


def test_or_alpha_normaliser_close_to_one_minus_alpha():
    c = d.or_alpha(1024, 0.4).normalizer()
    assert c == pytest.approx(C_1024, rel=1e-12)
    assert abs(c - 0.6) / 0.6 < 0.10


def test_or_alpha_normaliser_independent_sum():
    N, a = 1024, 0.4
    total = math.fsum((t + 1) ** -a * (N + 1) ** (a - 1) for t in range(N + 1))
    assert d.or_alpha_constant(N, a) == pytest.approx(1 / total, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 0.5, 0.7, -0.1])
def test_or_alpha_rejects_alpha(alpha):
    with pytest.raises(ParameterError):
        d.or_alpha(16, alpha)


def test_exchangeable_pmf(rng):
    mu = d.or_alpha(12, 0.4)
    for _ in range(20):
        X = d.sample(mu, rng)
        Y = BitInput(rng.permutation(X.bits))
        assert d.pmf(mu, X) == pytest.approx(d.pmf(mu, Y))


def test_uniform_mean_weight(rng):
    ws = [d.sample(d.uniform(8), rng).weight for _ in range(100_000)]
    assert abs(np.mean(ws) - 4) < 0.05


def test_sampler_matches_pmf_chi_square(rng):
    mu = d.or_alpha(6, 0.4)
    n = 200_000
    counts = np.bincount([d.sample(mu, rng).to_int() for _ in range(n)], minlength=64)
    expected = n * d.pmf_vector(mu)
    assert stats.chisquare(counts, expected).pvalue > 0.001


def test_d2_emits_unique_period(rng):
    mu = d.simon_d2(2)
    for _ in range(500):
        X = d.sample(mu, rng)
        assert simon_value(X) == 1 and len(periods(X.blocks, 2)) == 1


@pytest.mark.parametrize("n", [2, 3])
def test_d2_acceptance_rate(n, rng):
    mu = d.simon_d2(n)
    for _ in range(2000):
        d.sample(mu, rng)
    assert mu.stats["accepted"] / mu.stats["attempts"] >= 0.5


def test_d1_one_fraction_matches_exact_count(rng):
    exact = bounds.simon_one_inputs_count(2).fraction
    n = 100_000
    hits = sum(simon_value(d.sample(d.simon_d1(2), rng)) for _ in range(n))
    sigma = math.sqrt(float(exact) * (1 - float(exact)) / n)
    assert abs(hits / n - float(exact)) <= 3 * sigma


def test_support_enumerate_small_cases():
    pairs = list(d.support_enumerate(d.uniform(3)))
    assert len(pairs) == 8 and all(p == pytest.approx(1 / 8) for _, p in pairs)
    X0 = BitInput.from_int(3, 4)
    assert [(X, p) for X, p in d.support_enumerate(d.table({X0: 1.0}))] == [(X0, 1.0)]


def test_d2_support_matches_direct_count():
    direct = 0
    for v in range(256):
        blocks = [(v >> (2 * i)) & 3 for i in range(4)]
        ks = [k for k in range(1, 4) if all(blocks[i ^ k] == blocks[i] for i in range(4))]
        direct += len(ks) == 1
    support = list(d.support_enumerate(d.simon_d2(2)))
    assert len(support) == direct == d.simon_d2_support_size(2) == 36
    assert math.fsum(p for _, p in support) == pytest.approx(1.0)


def test_enumeration_cap():
    with pytest.raises(ValueError):
        list(d.support_enumerate(d.uniform(24)))


def test_weight_csv(tmp_path):
    path = tmp_path / "w.csv"
    d.export_weight_csv(d.or_alpha(8, 0.4), path)
    lines = path.read_text().splitlines()
    assert len(lines) == 10
