import math

import numpy as np
import pytest

from avgquery.algorithms.search import (
    classical_or_sampler, grover_attempt_statevector, grover_or, grover_success_probability,
)
from avgquery.oracle import BitInput, CountingOracle


def weight_input(N, t, rng):
    bits = np.zeros(N, dtype=np.uint8)
    bits[rng.choice(N, t, replace=False)] = 1
    return BitInput(bits)


class TestClassicalOR:
    def test_zero_input_reads_everything(self, rng):
        o = CountingOracle(BitInput.from_int(0, 64))
        assert classical_or_sampler(o, rng) == (0, 64)

    def test_half_weight_expectation(self, rng):
        N, t = 64, 32
        X = weight_input(N, t, rng)
        qs = [classical_or_sampler(CountingOracle(X), rng)[1] for _ in range(100_000)]
        exact = (N + 1) / (t + 1)
        assert abs(np.mean(qs) - exact) / exact < 0.10
        assert abs(np.mean(qs) - exact) < 4 * np.std(qs) / math.sqrt(len(qs))

    def test_zero_error(self, rng):
        for t in range(0, 9):
            X = weight_input(8, t, rng)
            assert classical_or_sampler(CountingOracle(X), rng)[0] == int(t > 0)


class TestGrover:
    def test_zero_input(self, rng):
        for N in (16, 256, 4096):
            o = CountingOracle(BitInput.from_int(0, N))
            out, q = grover_or(o, rng)
            assert out == 0 and q == o.total_queries
            assert q >= math.floor(3 * math.sqrt(N))

    def test_all_ones_cheap(self, rng):
        qs = []
        for _ in range(200):
            out, q = grover_or(CountingOracle(BitInput(np.ones(256, dtype=np.uint8))), rng)
            assert out == 1
            qs.append(q)
        assert np.mean(qs) < 3

    def test_statevector_matches_formula(self, rng):
        N, t = 16, 3
        X = weight_input(N, t, rng)
        for j in range(5):
            hits = sum(int(X.bits[grover_attempt_statevector(CountingOracle(X), j, rng)]) for _ in range(3000))
            p = grover_success_probability(N, t, j)
            assert abs(hits / 3000 - p) < 4 * math.sqrt(p * (1 - p) / 3000) + 1e-9

    @pytest.mark.parametrize("method", ["statevector", "subspace"])
    def test_bounded_error_single_marked(self, method, rng):
        N = 256
        X = weight_input(N, 1, rng)
        wins = sum(grover_or(CountingOracle(X), rng, method=method)[0] for _ in range(300))
        assert wins / 300 >= 2 / 3

    def test_subspace_and_statevector_query_laws_agree(self, rng):
        X = weight_input(64, 2, rng)
        a = [grover_or(CountingOracle(X), rng, method="statevector")[1] for _ in range(2000)]
        b = [grover_or(CountingOracle(X), rng, method="subspace")[1] for _ in range(2000)]
        se = math.sqrt(np.var(a) / 2000 + np.var(b) / 2000)
        assert abs(np.mean(a) - np.mean(b)) < 4 * se

    def test_expected_queries_scale_with_weight(self, rng):
        N = 1024
        means = []
        for t in (1, 16, 256):
            X = weight_input(N, t, rng)
            means.append(np.mean([grover_or(CountingOracle(X), rng)[1] for _ in range(300)]))
        assert means[0] > means[1] > means[2]
        assert means[0] < 4 * math.sqrt(N)
