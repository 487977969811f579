import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from avgquery.algorithms import counting as c
from avgquery.oracle import BitInput, CountingOracle, ParameterError


def weight_oracle(N, t):
    return CountingOracle(BitInput.from_int((1 << t) - 1, N))


class TestOutcomeLaw:
    def test_no_marked_items(self):
        p = c.outcome_distribution(16, 16, 0)
        assert p[0] == pytest.approx(1.0)

    def test_all_marked(self):
        p = c.outcome_distribution(16, 16, 16)
        assert p[8] == pytest.approx(1.0)
        assert c.estimate_from_outcome(16, 16, 8) == pytest.approx(16.0)

    @pytest.mark.parametrize("N,T", [(8, 8), (8, 4), (16, 16)])
    def test_circuit_matches_closed_form(self, N, T):
        for t in range(N + 1):
            a = c.circuit_outcome_distribution(weight_oracle(N, t), T)
            b = c.outcome_distribution(N, T, t)
            assert 0.5 * np.abs(a - b).sum() <= 1e-6

    def test_windowed_sampler_is_exact(self, rng):
        T, w = 256, 37.3
        n = 100_000
        ys = np.array([c._sample_kernel(w, T, rng) for _ in range(n)])
        p = c._fejer(w - np.arange(T), T)
        p /= p.sum()
        keep = p * n >= 5
        obs = np.bincount(ys, minlength=T)
        f_obs = np.append(obs[keep], obs[~keep].sum())
        f_exp = np.append(n * p[keep], n * p[~keep].sum())
        assert stats.chisquare(f_obs, f_exp).pvalue > 0.001


class TestQCount:
    def test_power_of_two_required(self, rng):
        with pytest.raises(ParameterError):
            c.qcount(weight_oracle(16, 3), 12, 1, rng)

    @pytest.mark.parametrize("method", ["circuit", "closed_form"])
    def test_charges_T_minus_one(self, method, rng):
        o = weight_oracle(16, 5)
        c.qcount(o, 16, 1, rng, method)
        assert o.quantum_queries == 15 and o.classical_queries == 0

    def test_guarantee_small_sample(self, rng):
        N, T = 16, 16
        for t in range(N + 1):
            o = weight_oracle(N, t)
            bound = c.qcount_bound(t, N, T)
            hits = sum(abs(t - c.qcount(o, T, 1, rng, "closed_form")) <= bound + 1e-9 for _ in range(1500))
            assert hits / 1500 >= 8 / math.pi**2 - 0.05

    def test_confidence_values(self):
        assert c.qcount_confidence(1) == pytest.approx(8 / math.pi**2)
        assert c.qcount_confidence(3) == pytest.approx(0.75)


class TestMajority:
    def test_stage_budget_is_rounded_power_of_two(self):
        assert c.stage_budget(1, 16) == 1024
        assert c.stage_budget(2, 256) == 4096

    def test_all_ones_stops_once_the_rule_can_fire(self, rng):
        # at i = 1 the strict rule |est - N/2| > N/2 cannot hold, so stage 2 decides
        N = 16
        R = c.default_repetitions(N)
        out, q = c.majority_avg(weight_oracle(N, N), rng)
        assert out == 1 and q == R * (c.stage_budget(1, N) - 1 + c.stage_budget(2, N) - 1)

    def test_half_weight_outputs_zero(self, rng):
        outs = [c.majority_avg(weight_oracle(16, 8), rng)[0] for _ in range(100)]
        assert np.mean(np.array(outs) == 0) >= 2 / 3

    def test_profile_success_on_every_weight(self):
        for t in range(17):
            _, success = c.majority_profile(16, t)
            assert success >= 2 / 3

    def test_profile_matches_simulation(self, rng):
        N, t = 16, 9
        exact_q, exact_s = c.majority_profile(N, t)
        runs = [c.majority_avg(weight_oracle(N, t), rng) for _ in range(1500)]
        qs = np.array([q for _, q in runs], dtype=float)
        assert abs(qs.mean() - exact_q) <= 4 * qs.std() / math.sqrt(len(qs)) + 1e-9
        ok = np.mean([o == 1 for o, _ in runs])
        assert abs(ok - exact_s) <= 4 * math.sqrt(exact_s * (1 - exact_s) / 1500) + 1e-3


class TestClassicalMajority:
    def test_full_information(self, rng):
        N = 64
        assert c.classical_majority_sampler(weight_oracle(N, 32), N, rng) == 0
        assert c.classical_majority_sampler(weight_oracle(N, 40), N, rng) == 1

    @pytest.mark.parametrize("K,T", [(512, 103), (544, 50), (10, 20), (0, 5)])
    def test_hypergeometric_tail_against_scipy(self, K, T):
        N = 1024
        thr = Fraction(3, 5)
        lo = math.ceil(thr * T)
        ref = stats.hypergeom.sf(lo - 1, N, K, T)
        assert float(c.hypergeometric_upper_tail(N, K, T, thr)) == pytest.approx(ref, rel=1e-9, abs=1e-15)

    def test_error_stays_constant_at_a_tenth(self):
        N, T = 1024, math.ceil(1024 / 10)
        p1_half = float(c.majority_sampler_tail(N, N // 2, T))
        p0_above = 1 - float(c.majority_sampler_tail(N, N // 2 + 32, T))
        assert 0.25 < p1_half < 0.5
        assert 0.25 < p0_above < 0.5

    def test_tail_matches_sampler(self, rng):
        N, T, w = 1024, 103, 512
        exact = float(c.majority_sampler_tail(N, w, T))
        o = weight_oracle(N, w)
        hits = sum(c.classical_majority_sampler(o, T, rng) for _ in range(4000))
        assert abs(hits / 4000 - exact) <= 3 * math.sqrt(exact * (1 - exact) / 4000)
