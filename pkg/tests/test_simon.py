import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from avgquery import distributions as d
from avgquery.algorithms.gf2 import gf2_rank, gf2_span
from avgquery.algorithms.simon import round_distribution, sample_rounds, simon_zero_error
from avgquery.oracle import BitInput, CountingOracle, InputShapeError, Unit, simon_value


class TestGF2Rank:
    def test_empty(self):
        assert gf2_rank([], 3) == (0, False)

    def test_full_plane(self):
        assert gf2_rank([0b01, 0b10], 2) == (2, True)

    def test_dependent_triple(self):
        assert gf2_rank([0b011, 0b101, 0b110], 3) == (2, False)

    @given(st.lists(st.integers(0, 31), max_size=8))
    def test_rank_matches_span_size(self, vs):
        rank, full = gf2_rank(vs, 5)
        assert len(gf2_span(vs, 5)) == 2**rank
        assert full == (rank == 5)

    def test_rank_against_numpy_elimination(self, rng):
        for _ in range(200):
            rows = [int(v) for v in rng.integers(0, 16, rng.integers(0, 7))]
            # independent count: size of the span by brute force over all subsets
            span = {0}
            for r in range(1, len(rows) + 1):
                for sub in itertools.combinations(rows, r):
                    acc = 0
                    for v in sub:
                        acc ^= v
                    span.add(acc)
            assert 2 ** gf2_rank(rows, 4)[0] == len(span)


def oracle(X):
    return CountingOracle(X, Unit.BLOCK)


class TestSimonZeroError:
    def test_one_inputs_always_fall_through(self, rng):
        for _ in range(30):
            X = d.sample(d.simon_d2(3), rng)
            out, q = simon_zero_error(oracle(X), rng)
            assert out == 1 and q == 22 * 3 + 8

    def test_exhaustive_n2_zero_error(self, rng):
        for v in range(256):
            X = BitInput.from_int(v, 8, 2)
            o = oracle(X)
            out, q = simon_zero_error(o, rng)
            assert out == simon_value(X)
            assert q == o.total_queries <= 22 * 2 + 4

    def test_distinct_blocks_full_span_probability(self, rng):
        X = BitInput.from_blocks([0, 1, 2, 3], 2)
        trials = 4000
        decided = sum(simon_zero_error(oracle(X), rng)[1] == 44 for _ in range(trials))
        assert decided / trials >= 1 - 2**-2

    def test_program_and_distribution_methods_agree(self, rng):
        X = BitInput.from_blocks([0, 1, 1, 0], 2)
        p = round_distribution(oracle(X))
        counts = np.zeros(4)
        o = oracle(X)
        counts += np.bincount(sample_rounds(o, 3000, rng, "program"), minlength=4)
        assert o.total_queries == 3000
        assert np.all(np.abs(counts / 3000 - p) < 4 * np.sqrt(p * (1 - p) / 3000) + 1e-12)

    def test_query_count_structure(self, rng):
        for _ in range(50):
            X = d.sample(d.simon_d1(3), rng)
            _, q = simon_zero_error(oracle(X), rng)
            assert q in (66, 66 + 8)

    def test_needs_block_oracle(self, rng):
        with pytest.raises(InputShapeError):
            simon_zero_error(CountingOracle(BitInput.from_int(0, 8, 2)), rng)
