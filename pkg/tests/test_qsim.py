import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from avgquery.algorithms.simon import round_program, round_state, sample_rounds
from avgquery.oracle import BitInput, CountingOracle, InputShapeError, SizeCapError, Unit, periods
from avgquery import distributions as d
from avgquery.qsim import (
    Query, QueryProgram, QuantumState, Unitary, apply_hadamard, apply_query, expected_queries, measure,
    program_distribution, run_program,
)

S = 1 / math.sqrt(2)


def basis(state: QuantumState, **values):
    s = QuantumState([(r, state.widths[r]) for r in state.names])
    for r, v in values.items():
        for q in range(s.widths[r]):
            if (v >> q) & 1:
                s.x(r, q)
    return s


class TestGates:
    def test_hadamard_on_zero(self):
        s = apply_hadamard(QuantumState([("a", 1)]), "a")
        assert np.allclose(s.vector(), [S, S])

    def test_hadamard_on_one(self):
        s = QuantumState([("a", 1)]).x("a").hadamard("a")
        assert np.allclose(s.vector(), [S, -S])

    @given(st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_hadamard_involution(self, w, seed):
        r = np.random.default_rng(seed)
        s = QuantumState([("a", w), ("b", 2)])
        v = r.normal(size=s.amps.shape) + 1j * r.normal(size=s.amps.shape)
        s.amps = v / np.linalg.norm(v)
        before = s.amps.copy()
        s.hadamard("a").hadamard("a")
        assert np.max(np.abs(s.amps - before)) < 1e-12

    def test_qft_inverse_round_trip(self):
        s = QuantumState([("p", 3)]).x("p", 1).hadamard("p", [0])
        before = s.amps.copy()
        s.qft("p").qft("p", inverse=True)
        assert np.allclose(s.amps, before)

    def test_diffusion_reflects_about_uniform(self):
        s = QuantumState([("i", 2)]).hadamard("i")
        s.diffusion("i")
        assert np.allclose(s.probabilities("i"), 0.25)

    def test_cap(self):
        with pytest.raises(SizeCapError):
            QuantumState([("a", 25)])

    def test_norm_checked_after_every_gate(self):
        s = QuantumState([("a", 3), ("b", 1)], check_norm=True)
        s.hadamard("a").x("b").cz(("a", 0), ("b", 0)).qft("a").diffusion("a")
        assert s.norm() == pytest.approx(1.0, abs=1e-9)


class TestQuery:
    def test_basis_action(self):
        o = CountingOracle(BitInput.from_int(0b0100, 4))
        s = basis(QuantumState([("index", 2), ("target", 1)]), index=2)
        apply_query(s, o)
        assert s.joint_probabilities(["index", "target"])[2, 1] == pytest.approx(1.0)
        assert o.quantum_queries == 1

    def test_block_oracle_entangles_answers(self):
        X = BitInput.from_blocks([3, 0, 2, 1], 2)
        s = QuantumState([("index", 2), ("target", 2)]).hadamard("index")
        s.query(CountingOracle(X, Unit.BLOCK))
        joint = s.joint_probabilities(["index", "target"])
        for i, x in enumerate(X.blocks):
            assert joint[i, x] == pytest.approx(0.25)

    def test_query_is_involution(self):
        o = CountingOracle(BitInput.from_int(0b1011, 4))
        s = QuantumState([("index", 2), ("target", 1)]).hadamard("index")
        before = s.amps.copy()
        s.query(o).query(o)
        assert np.allclose(s.amps, before) and o.quantum_queries == 2

    def test_width_mismatch(self):
        o = CountingOracle(BitInput.from_int(0, 8))
        with pytest.raises(InputShapeError):
            QuantumState([("index", 2), ("target", 1)]).query(o)
        with pytest.raises(InputShapeError):
            QuantumState([("index", 3), ("target", 2)]).query(o)


class TestMeasure:
    def test_zero_state(self, rng):
        out, s = measure(QuantumState([("a", 2)]), "a", rng)
        assert out == 0 and s.norm() == pytest.approx(1.0)

    def test_answer_register_law_and_collapse(self, rng):
        X = BitInput.from_blocks([1, 1, 2, 1], 2)
        s = QuantumState([("index", 2), ("target", 2)]).hadamard("index")
        s.query(CountingOracle(X, Unit.BLOCK))
        assert np.allclose(s.probabilities("target"), [0, 0.75, 0.25, 0])
        s.project("target", 1)
        assert np.allclose(s.probabilities("index"), [1 / 3, 1 / 3, 0, 1 / 3])
        assert s.norm() == pytest.approx(1.0, abs=1e-9)

    def test_impossible_projection_is_a_bug(self):
        with pytest.raises(RuntimeError):
            QuantumState([("a", 1)]).project("a", 1)


def _program(steps):
    return QueryProgram([("index", 1), ("target", 1), ("flag", 1), ("output", 1)], steps)


class TestRunProgram:
    def test_immediate_stop(self, rng):
        o = CountingOracle(BitInput.from_int(1, 2))
        res = run_program(_program([Unitary(lambda s: s.x("flag")), Query(), Query()]), o, rng)
        assert res.queries == 0 and o.total_queries == 0

    def test_fixed_T(self, rng):
        T = 5
        steps = [Unitary(lambda s: None)]
        for _ in range(T):
            steps += [Query(), Unitary(lambda s: None)]
        steps.append(Unitary(lambda s: s.x("flag")))
        o = CountingOracle(BitInput.from_int(2, 2))
        assert all(run_program(_program(steps), o, rng).queries == T for _ in range(5))

    def test_flag_measurement_is_projective(self, rng):
        # flag in |+>: stops after U_0 with probability 1/2, otherwise after one query
        steps = [Unitary(lambda s: s.hadamard("flag")), Query(), Unitary(lambda s: s.x("flag"))]
        law = program_distribution(_program(steps), CountingOracle(BitInput.from_int(1, 2)))
        assert law == pytest.approx({(0, 0): 0.5, (0, 1): 0.5})
        assert expected_queries(law) == pytest.approx(0.5)

    def test_simon_round_uses_one_block_query(self, rng):
        X = BitInput.from_blocks([0, 3, 0, 3], 2)
        o = CountingOracle(X, Unit.BLOCK)
        res = run_program(round_program(2), o, rng)
        assert res.queries == 1 and set(res.measurements) == {"i", "j"}


def _dot(a, b):
    return bin(a & b).count("1") & 1


class TestSimonRoundOrthogonality:
    def test_exhaustive_d2_support_n2(self):
        for X, _ in d.support_enumerate(d.simon_d2(2)):
            k = int(periods(X.blocks, 2)[0])
            p = round_state(CountingOracle(X, Unit.BLOCK)).probabilities("index")
            for i in range(4):
                if _dot(k, i):
                    assert p[i] < 1e-15

    @pytest.mark.parametrize("n", [3, 4])
    def test_sampled_rounds(self, n, rng):
        X = d.sample(d.simon_d2(n), rng)
        k = int(periods(X.blocks, n)[0])
        o = CountingOracle(X, Unit.BLOCK)
        prog = round_program(n)
        outcomes = [run_program(prog, o, rng).measurements["i"] for _ in range(2000 if n == 4 else 5000)]
        outcomes += sample_rounds(o, 10_000 - len(outcomes), rng)
        assert all(_dot(k, i) == 0 for i in outcomes)


def test_dump_csv(tmp_path):
    s = QuantumState([("a", 1)]).hadamard("a")
    s.dump_csv(tmp_path / "s.csv")
    assert len((tmp_path / "s.csv").read_text().splitlines()) == 3
