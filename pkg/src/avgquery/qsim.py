"""Dense state-vector simulation of the quantum query model.

A state is a complex tensor with one axis per named register; register
``r`` of width ``w`` is an axis of length ``2**w`` whose index is the
register value, qubit ``j`` being bit ``j`` of that value.  Flattening in
C order gives the usual amplitude vector with the first register most
significant.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .oracle import CountingOracle, InputShapeError, SizeCapError

QUBIT_CAP = 24
NORM_TOL = 1e-9


class QuantumState:
    def __init__(self, registers: Sequence[tuple], cap: int = QUBIT_CAP, check_norm: bool = False):
        self.names = [name for name, _ in registers]
        self.widths = {name: int(w) for name, w in registers}
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate register name")
        if any(w < 0 for w in self.widths.values()):
            raise ValueError("negative register width")
        m = sum(self.widths.values())
        if m > cap:
            raise SizeCapError(f"{m} qubits exceed the simulator cap of {cap}")
        shape = tuple(1 << self.widths[nm] for nm in self.names)
        self.amps = np.zeros(shape, dtype=np.complex128)
        self.amps[(0,) * len(shape)] = 1.0
        self.check_norm = check_norm

    # -- bookkeeping -------------------------------------------------------
    @property
    def m(self) -> int:
        return sum(self.widths.values())

    def axis(self, reg: str) -> int:
        try:
            return self.names.index(reg)
        except ValueError:
            raise InputShapeError(f"no register named {reg!r}") from None

    def vector(self) -> np.ndarray:
        return self.amps.reshape(-1)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amps, self.amps).real))

    def copy(self) -> "QuantumState":
        new = object.__new__(QuantumState)
        new.names = list(self.names)
        new.widths = dict(self.widths)
        new.amps = self.amps.copy()
        new.check_norm = self.check_norm
        return new

    def _done(self):
        if self.check_norm and abs(self.norm() - 1.0) > NORM_TOL:
            raise AssertionError(f"norm drifted to {self.norm()!r}")
        return self

    def _bit_mask(self, reg: str, qubit: int) -> np.ndarray:
        """0/1 array over ``reg``'s axis giving the value of one of its qubits."""
        w = self.widths[reg]
        if not 0 <= qubit < w:
            raise InputShapeError(f"qubit {qubit} outside register {reg!r} of width {w}")
        shape = [1] * self.amps.ndim
        shape[self.axis(reg)] = 1 << w
        return ((np.arange(1 << w) >> qubit) & 1).reshape(shape)

    # -- gates -------------------------------------------------------------
    def hadamard(self, reg: str, qubits: Optional[Sequence[int]] = None) -> "QuantumState":
        ax = self.axis(reg)
        w = self.widths[reg]
        qubits = range(w) if qubits is None else list(qubits)
        shape = self.amps.shape
        before, after = math.prod(shape[:ax]), math.prod(shape[ax + 1:])
        # fresh copy: controlled apply() keeps a reference to the old amplitudes
        a = np.array(self.amps, copy=True, order="C")
        s = 1 / math.sqrt(2)
        for q in qubits:
            b = a.reshape(before, 1 << (w - q - 1), 2, 1 << q, after)
            lo = b[:, :, 0].copy()
            hi = b[:, :, 1]
            b[:, :, 0] = (lo + hi) * s
            b[:, :, 1] = (lo - hi) * s
        self.amps = a
        return self._done()

    def x(self, reg: str, qubit: int = 0) -> "QuantumState":
        ax = self.axis(reg)
        perm = np.arange(1 << self.widths[reg]) ^ (1 << qubit)
        self.amps = np.take(self.amps, perm, axis=ax)
        return self._done()

    def z(self, reg: str, qubit: int = 0) -> "QuantumState":
        self.amps = self.amps * (1 - 2 * self._bit_mask(reg, qubit))
        return self._done()

    def cz(self, a: tuple, b: tuple) -> "QuantumState":
        sign = 1 - 2 * (self._bit_mask(*a) * self._bit_mask(*b))
        self.amps = self.amps * sign
        return self._done()

    def phase_flip_zero(self, reg: str) -> "QuantumState":
        """I - 2|0><0| on one register."""
        idx = [slice(None)] * self.amps.ndim
        idx[self.axis(reg)] = 0
        self.amps[tuple(idx)] *= -1
        return self._done()

    def diffusion(self, reg: str, control: Optional[tuple] = None) -> "QuantumState":
        """Inversion about the mean, 2|u><u| - I with |u> uniform on ``reg``."""
        ax = self.axis(reg)
        new = 2 * self.amps.mean(axis=ax, keepdims=True) - self.amps
        if control is None:
            self.amps = new
        else:
            self.amps = np.where(self._bit_mask(*control) == 1, new, self.amps)
        return self._done()

    def qft(self, reg: str, inverse: bool = False) -> "QuantumState":
        """QFT |y> -> T^-1/2 sum_k e^{2 pi i yk/T} |k> over the register value."""
        ax = self.axis(reg)
        fn = np.fft.fft if inverse else np.fft.ifft
        self.amps = np.ascontiguousarray(fn(self.amps, axis=ax, norm="ortho"))
        return self._done()

    def apply(self, fn: Callable[["QuantumState"], object], control: Optional[tuple] = None):
        """Apply a sequence of gates, optionally conditioned on one qubit being 1."""
        if control is None:
            fn(self)
            return self._done()
        old = self.amps
        fn(self)
        self.amps = np.where(self._bit_mask(*control) == 1, self.amps, old)
        return self._done()

    def query(self, oracle: CountingOracle, index: str = "index", target: str = "target",
              base: Optional[int] = None):
        """|i, b> -> |i, b xor x_{base+i}>; one quantum query.

        Without ``base`` the index register must address the whole oracle;
        with it the register addresses the window ``base .. base + 2**w - 1``.
        """
        D = 1 << self.widths[index]
        B = 1 << self.widths[target]
        if B != 1 << oracle.value_bits:
            raise InputShapeError(
                f"target register of {self.widths[target]} qubits for {oracle.value_bits}-bit answers"
            )
        if base is None:
            if D != oracle.size:
                raise InputShapeError(f"index register addresses {D} positions, oracle has {oracle.size}")
            base = 0
        elif base < 0 or base + D > oracle.size:
            raise InputShapeError(f"window [{base}, {base + D}) outside oracle of size {oracle.size}")
        oracle.charge_quantum(1)
        x = np.asarray(oracle.values[base:base + D], dtype=np.int64)
        ia, ta = self.axis(index), self.axis(target)
        a = np.moveaxis(self.amps, (ia, ta), (0, 1))
        perm = np.arange(B)[None, :] ^ x[:, None]
        a = a[np.arange(D)[:, None], perm]
        self.amps = np.ascontiguousarray(np.moveaxis(a, (0, 1), (ia, ta)))
        return self._done()

    # -- measurement -------------------------------------------------------
    def probabilities(self, reg: str) -> np.ndarray:
        ax = self.axis(reg)
        p = np.abs(self.amps) ** 2
        other = tuple(i for i in range(p.ndim) if i != ax)
        return p.sum(axis=other)

    def joint_probabilities(self, regs: Sequence[str]) -> np.ndarray:
        """Born distribution of several registers, axes in the given order."""
        axes = [self.axis(r) for r in regs]
        p = np.abs(self.amps) ** 2
        other = tuple(i for i in range(p.ndim) if i not in axes)
        p = p.sum(axis=other)
        order = sorted(axes)
        return np.transpose(p, [order.index(a) for a in axes])

    def project(self, reg: str, value: int) -> float:
        """Project ``reg`` onto ``value`` and renormalise; returns the outcome probability."""
        ax = self.axis(reg)
        idx = [slice(None)] * self.amps.ndim
        idx[ax] = value
        kept = self.amps[tuple(idx)]
        prob = float(np.vdot(kept, kept).real)
        if prob <= 1e-300:
            raise RuntimeError(f"projection of {reg!r} onto {value} has zero probability")
        new = np.zeros_like(self.amps)
        new[tuple(idx)] = kept / math.sqrt(prob)
        self.amps = new
        return prob

    def measure(self, reg: str, rng: np.random.Generator) -> int:
        p = self.probabilities(reg)
        c = np.cumsum(p)
        outcome = int(np.searchsorted(c, rng.random() * c[-1], side="right"))
        outcome = min(outcome, p.size - 1)
        while p[outcome] <= 0:  # guard against landing on a zero bin at the cdf edge
            outcome -= 1
        self.project(reg, outcome)
        return outcome

    def dump_csv(self, path) -> None:
        """Write (basis index, re, im) rows; meant for tiny states only."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["basis", "re", "im"])
            for k, a in enumerate(self.vector()):
                w.writerow([k, repr(float(a.real)), repr(float(a.imag))])


# -- functional wrappers ---------------------------------------------------

def apply_query(state: QuantumState, oracle: CountingOracle, index="index", target="target", base=None):
    return state.query(oracle, index, target, base)


def apply_hadamard(state: QuantumState, register: str, qubits=None):
    return state.hadamard(register, qubits)


def measure(state: QuantumState, register: str, rng: np.random.Generator):
    outcome = state.measure(register, rng)
    return outcome, state


# -- query programs --------------------------------------------------------

@dataclass(frozen=True)
class Unitary:
    fn: Callable[[QuantumState], object]
    label: str = "U"


@dataclass(frozen=True)
class Query:
    index: str = "index"
    target: str = "target"


@dataclass(frozen=True)
class Measure:
    register: str
    key: Optional[str] = None


Step = Union[Unitary, Query, Measure]


@dataclass
class QueryProgram:
    """U_0, O, U_1, ... with a flag qubit measured after every unitary."""

    registers: list
    steps: list
    flag: str = "flag"
    output: str = "output"
    cap: int = QUBIT_CAP
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        names = [r for r, _ in self.registers]
        for reg in (self.flag, self.output):
            if reg not in names:
                raise InputShapeError(f"program lacks the {reg!r} register")
        if dict(self.registers)[self.flag] != 1:
            raise InputShapeError("flag register must be a single qubit")
        for s in self.steps:
            if not isinstance(s, (Unitary, Query, Measure)):
                raise TypeError(f"unknown program step {s!r}")

    @property
    def query_count(self) -> int:
        return sum(isinstance(s, Query) for s in self.steps)


class ProgramResult(NamedTuple):
    output: int
    queries: int
    measurements: dict


def run_program(program: QueryProgram, oracle: CountingOracle, rng: np.random.Generator,
                check_norm: bool = False) -> ProgramResult:
    """Execute ``program``; stops as soon as the flag qubit is measured as 1."""
    state = QuantumState(program.registers, cap=program.cap, check_norm=check_norm)
    start = oracle.quantum_queries
    record: dict = {}
    for step in program.steps:
        if isinstance(step, Query):
            state.query(oracle, step.index, step.target)
        elif isinstance(step, Measure):
            record[step.key or step.register] = state.measure(step.register, rng)
        else:
            step.fn(state)
            state._done()
            if state.measure(program.flag, rng) == 1:
                break
    out = state.measure(program.output, rng)
    return ProgramResult(out, oracle.quantum_queries - start, record)


def program_distribution(program: QueryProgram, oracle: CountingOracle, max_branches: int = 10**6):
    """Exact law of (output, queries) by enumerating every measurement branch.

    Returns a dict mapping (output, queries) to probability.  The caller's
    oracle counters are not touched.
    """
    scratch = CountingOracle(oracle.input, oracle.unit)
    dist: dict = {}
    branches = [0]

    def branch(state: QuantumState, reg: str):
        p = state.probabilities(reg)
        for v in np.flatnonzero(p > 1e-14):
            branches[0] += 1
            if branches[0] > max_branches:
                raise SizeCapError(f"more than {max_branches} measurement branches")
            s = state.copy()
            prob = s.project(reg, int(v))
            yield int(v), prob, s

    def walk(state, pos, weight, queries):
        for k in range(pos, len(program.steps)):
            step = program.steps[k]
            if isinstance(step, Query):
                state.query(scratch, step.index, step.target)
                queries += 1
            elif isinstance(step, Measure):
                for _, prob, s in branch(state, step.register):
                    walk(s, k + 1, weight * prob, queries)
                return
            else:
                step.fn(state)
                for v, prob, s in branch(state, program.flag):
                    if v == 1:
                        finish(s, weight * prob, queries)
                    else:
                        walk(s, k + 1, weight * prob, queries)
                return
        finish(state, weight, queries)

    def finish(state, weight, queries):
        for v, prob, _ in branch(state, program.output):
            key = (v, queries)
            dist[key] = dist.get(key, 0.0) + weight * prob

    walk(QuantumState(program.registers, cap=program.cap), 0, 1.0, 0)
    return dist


def expected_queries(dist: dict) -> float:
    return sum(q * p for (_, q), p in dist.items())
