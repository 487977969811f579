"""Rank of bit vectors over GF(2)."""

from __future__ import annotations

from typing import Iterable


def gf2_rank(vectors: Iterable[int], n: int) -> tuple[int, bool]:
    """Return (rank, rank == n) for n-bit row vectors given as integers."""
    basis = [0] * n  # basis[b] has leading bit b, or is 0
    rank = 0
    for v in vectors:
        v = int(v)
        if v >> n:
            raise ValueError(f"vector {v:b} wider than {n} bits")
        for b in range(n - 1, -1, -1):
            if not (v >> b) & 1:
                continue
            if basis[b]:
                v ^= basis[b]
            else:
                basis[b] = v
                rank += 1
                break
        if rank == n:
            break
    return rank, rank == n


def gf2_span(vectors: Iterable[int], n: int) -> set[int]:
    """All vectors in the span; exponential in the rank, for small n only."""
    span = {0}
    for v in vectors:
        if v not in span:
            span |= {s ^ v for s in span}
    return span


def inner(a: int, b: int) -> int:
    """Inner product mod 2 of two bit strings."""
    return bin(a & b).count("1") & 1
