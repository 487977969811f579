"""Boolean functions, oracle inputs and query accounting.

Bit ``i`` of an input is ``x_i``.  For the Simon-variant function the input of
``N = n * 2**n`` bits is viewed as ``2**n`` blocks of ``n`` bits; block ``i``
is ``bits[i*n:(i+1)*n]`` read most-significant-bit first, so the block
``(0, 1)`` has value ``0b01``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np


class InputShapeError(ValueError):
    """Arity or block-layout mismatch between a function, input or oracle."""


class ParameterError(ValueError):
    """An algorithm or distribution parameter is outside its legal range."""


class SizeCapError(ValueError):
    """An exact computation was asked for above its enumeration cap."""


class QueryBudgetExceeded(RuntimeError):
    """Raised by an oracle whose query budget has been used up."""


def simon_width(N: int) -> Optional[int]:
    """Return n with N == n * 2**n, or None."""
    n = 1
    while n * 2**n < N:
        n += 1
    return n if n * 2**n == N else None


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BitInput:
    bits: np.ndarray
    block_width: Optional[int] = None

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size < 1:
            raise InputShapeError("input must be a non-empty bit vector")
        if np.any(bits > 1):
            raise InputShapeError("input bits must be 0 or 1")
        n = self.block_width
        if n is not None and (n < 1 or n * 2**n != bits.size):
            raise InputShapeError(f"block width {n} needs N = {n}*2^{n}, got N = {bits.size}")
        object.__setattr__(self, "bits", _frozen(bits.copy() if bits is self.bits else bits))

    @classmethod
    def from_blocks(cls, blocks, n: int) -> "BitInput":
        blocks = np.asarray(blocks, dtype=np.int64)
        if blocks.shape != (2**n,):
            raise InputShapeError(f"need {2**n} blocks for n = {n}")
        shifts = np.arange(n - 1, -1, -1)
        bits = ((blocks[:, None] >> shifts) & 1).astype(np.uint8).ravel()
        return cls(bits, n)

    @classmethod
    def from_int(cls, value: int, N: int, block_width: Optional[int] = None) -> "BitInput":
        """Input whose bit i is bit i (LSB = 0) of ``value``."""
        bits = np.array([(value >> i) & 1 for i in range(N)], dtype=np.uint8)
        return cls(bits, block_width)

    @classmethod
    def from_hex(cls, text: str, N: int, block_width: Optional[int] = None) -> "BitInput":
        value = int(text, 16)
        if value >> N:
            raise InputShapeError(f"hex value has more than {N} bits")
        return cls.from_int(value, N, block_width)

    def to_int(self) -> int:
        return int.from_bytes(np.packbits(self.bits, bitorder="little").tobytes(), "little")

    def to_hex(self) -> str:
        return format(self.to_int(), "x")

    @property
    def N(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.N

    @property
    def weight(self) -> int:
        return int(self.bits.sum())

    def hamming_weight(self) -> int:
        return self.weight

    @property
    def blocks(self) -> np.ndarray:
        n = self.block_width
        if n is None:
            raise InputShapeError("input has no block layout")
        weights = 1 << np.arange(n - 1, -1, -1)
        return self.bits.reshape(2**n, n).astype(np.int64) @ weights

    def with_blocks(self, n: int) -> "BitInput":
        return BitInput(self.bits, n)

    def __eq__(self, other):
        if not isinstance(other, BitInput):
            return NotImplemented
        return self.block_width == other.block_width and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bits.tobytes(), self.block_width))

    def __repr__(self):
        return f"BitInput(N={self.N}, hex={self.to_hex()!r}, block_width={self.block_width})"


class Kind(str, enum.Enum):
    OR = "or"
    MAJ = "maj"
    PARITY = "parity"
    THRESHOLD = "threshold"
    SIMON = "simon"
    TABLE = "table"


SYMMETRIC_KINDS = frozenset({Kind.OR, Kind.MAJ, Kind.PARITY, Kind.THRESHOLD})


@dataclass(frozen=True)
class BooleanFunction:
    kind: Kind
    arity: int
    theta: Fraction = Fraction(1, 10)
    n: Optional[int] = None
    table: Optional[bytes] = field(default=None, repr=False)

    def __post_init__(self):
        if self.arity < 1:
            raise InputShapeError("arity must be >= 1")
        if self.kind is Kind.SIMON and (self.n is None or self.n * 2**self.n != self.arity):
            raise InputShapeError("SIMON(n) has arity n*2^n")
        if self.kind is Kind.THRESHOLD and not 0 <= self.theta <= 1:
            raise ParameterError("threshold fraction must lie in [0, 1]")
        if self.kind is Kind.TABLE and (self.table is None or len(self.table) != 2**self.arity):
            raise InputShapeError("truth table needs 2^N entries")

    @property
    def is_symmetric(self) -> bool:
        return self.kind in SYMMETRIC_KINDS

    def value_at_weight(self, w: int) -> int:
        """f on any input of Hamming weight w (symmetric kinds only)."""
        N = self.arity
        if self.kind is Kind.OR:
            return int(w >= 1)
        if self.kind is Kind.MAJ:
            return int(2 * w > N)
        if self.kind is Kind.PARITY:
            return w & 1
        if self.kind is Kind.THRESHOLD:
            return int(w * self.theta.denominator >= self.theta.numerator * N)
        raise InputShapeError(f"{self.kind.value} is not symmetric")

    def weight_profile(self) -> np.ndarray:
        """Array v with v[w] = f at weight w, w = 0..N."""
        return np.array([self.value_at_weight(w) for w in range(self.arity + 1)], dtype=np.uint8)

    def truth_table(self) -> np.ndarray:
        """Values on all 2^N inputs, indexed by the integer whose bit i is x_i."""
        N = self.arity
        if N > 24:
            raise SizeCapError(f"truth table of {N} variables is too large")
        if self.kind is Kind.TABLE:
            return np.frombuffer(self.table, dtype=np.uint8).copy()
        idx = np.arange(2**N, dtype=np.int64)
        if self.is_symmetric:
            return self.weight_profile()[popcount(idx)]
        bits = ((idx[:, None] >> np.arange(N)) & 1).astype(np.uint8)
        return simon_values(bits, self.n)

    def __str__(self):
        if self.kind is Kind.THRESHOLD:
            return f"threshold({self.theta})/{self.arity}"
        if self.kind is Kind.SIMON:
            return f"simon(n={self.n})"
        return f"{self.kind.value}/{self.arity}"


def OR(N: int) -> BooleanFunction:
    return BooleanFunction(Kind.OR, N)


def MAJ(N: int) -> BooleanFunction:
    return BooleanFunction(Kind.MAJ, N)


def PARITY(N: int) -> BooleanFunction:
    return BooleanFunction(Kind.PARITY, N)


def THRESHOLD(N: int, theta=Fraction(1, 10)) -> BooleanFunction:
    return BooleanFunction(Kind.THRESHOLD, N, theta=Fraction(theta))


def SIMON(n: int) -> BooleanFunction:
    return BooleanFunction(Kind.SIMON, n * 2**n, n=n)


def TABLE(values) -> BooleanFunction:
    values = np.asarray(values, dtype=np.uint8)
    N = int(np.log2(values.size))
    if 2**N != values.size:
        raise InputShapeError("truth table length must be a power of two")
    return BooleanFunction(Kind.TABLE, N, table=values.tobytes())


def popcount(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint64)
    return np.unpackbits(a.view(np.uint8).reshape(*a.shape, 8), axis=-1).sum(axis=-1)


_XOR_TABLES: dict = {}


def xor_index_table(n: int) -> np.ndarray:
    """Row k lists i XOR k for i = 0..2^n-1."""
    if n not in _XOR_TABLES:
        i = np.arange(2**n)
        _XOR_TABLES[n] = _frozen(i[None, :] ^ i[:, None])
    return _XOR_TABLES[n]


def periods(blocks: np.ndarray, n: int) -> np.ndarray:
    """All non-zero k with blocks[i ^ k] == blocks[i] for every i."""
    table = xor_index_table(n)[1:]
    ok = np.all(blocks[table] == blocks[None, :], axis=1)
    return np.flatnonzero(ok) + 1


def simon_value(X: BitInput) -> int:
    """1 iff some non-zero XOR shift k leaves the block table unchanged."""
    if X.block_width is None:
        raise InputShapeError("simon_value needs an input with a block layout")
    return int(periods(X.blocks, X.block_width).size > 0)


def simon_values(bits: np.ndarray, n: int) -> np.ndarray:
    """Vectorised simon_value over rows of a (M, n*2^n) bit array."""
    weights = 1 << np.arange(n - 1, -1, -1)
    blocks = bits.reshape(bits.shape[0], 2**n, n).astype(np.int64) @ weights
    table = xor_index_table(n)[1:]
    eq = blocks[:, table] == blocks[:, None, :]
    return np.any(np.all(eq, axis=2), axis=1).astype(np.uint8)


def evaluate(f: BooleanFunction, X: BitInput) -> int:
    if f.arity != X.N:
        raise InputShapeError(f"function arity {f.arity} != input length {X.N}")
    if f.is_symmetric:
        return f.value_at_weight(X.weight)
    if f.kind is Kind.SIMON:
        return simon_value(X if X.block_width == f.n else X.with_blocks(f.n))
    return int(f.table[X.to_int()])


class Unit(str, enum.Enum):
    BIT = "bit"
    BLOCK = "block"


class CountingOracle:
    """Query access to an input with separate classical and quantum counters.

    ``values`` exposes the oracle table to the state-vector simulator, which
    charges ``quantum_queries`` itself; nothing else should read it.
    """

    def __init__(self, X: BitInput, unit: Unit = Unit.BIT, budget: Optional[int] = None):
        unit = Unit(unit)
        if unit is Unit.BLOCK and X.block_width is None:
            raise InputShapeError("block queries need an input with a block layout")
        self.input = X
        self.unit = unit
        self.budget = budget
        self.classical_queries = 0
        self.quantum_queries = 0
        self._values = X.bits if unit is Unit.BIT else _frozen(X.blocks)

    @property
    def size(self) -> int:
        """Number of queryable positions."""
        return int(self._values.size)

    @property
    def value_bits(self) -> int:
        """Width of one answer: 1 for bits, n for blocks."""
        return 1 if self.unit is Unit.BIT else self.input.block_width

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def total_queries(self) -> int:
        return self.classical_queries + self.quantum_queries

    @property
    def bit_queries(self) -> int:
        """Queries converted to single-bit units (a block query costs n)."""
        return self.total_queries * self.value_bits

    def _charge(self, k: int):
        if self.budget is not None and self.total_queries + k > self.budget:
            raise QueryBudgetExceeded(f"query budget {self.budget} exhausted")

    def query(self, i: int) -> int:
        if not 0 <= i < self.size:
            raise IndexError(f"query index {i} outside [0, {self.size})")
        self._charge(1)
        self.classical_queries += 1
        return int(self._values[i])

    def charge_quantum(self, k: int = 1):
        self._charge(k)
        self.quantum_queries += k

    def reset(self):
        self.classical_queries = 0
        self.quantum_queries = 0


class MaskedOracle(CountingOracle):
    """Oracle for Y = X xor mask; every query is forwarded to (and paid on) ``base``."""

    def __init__(self, base: CountingOracle, mask: np.ndarray):
        if base.unit is not Unit.BIT:
            raise InputShapeError("masking is defined for bit oracles only")
        mask = np.asarray(mask, dtype=np.uint8)
        if mask.shape != base.values.shape:
            raise InputShapeError("mask length differs from oracle size")
        self.base = base
        self.mask = mask
        self.unit = Unit.BIT
        self.input = BitInput(base.values ^ mask)
        self._values = self.input.bits

    budget = property(lambda self: self.base.budget)
    classical_queries = property(lambda self: self.base.classical_queries)
    quantum_queries = property(lambda self: self.base.quantum_queries)

    def query(self, i: int) -> int:
        return self.base.query(i) ^ int(self.mask[i])

    def charge_quantum(self, k: int = 1):
        self.base.charge_quantum(k)

    def reset(self):
        self.base.reset()
