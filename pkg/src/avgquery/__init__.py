"""Instrumented query algorithms and harness for average-case query complexity."""

from .oracle import (
    MAJ, OR, PARITY, SIMON, TABLE, THRESHOLD, BitInput, BooleanFunction, CountingOracle, Kind, Unit,
    evaluate, simon_value,
)

__version__ = "0.1.0"

__all__ = [
    "BitInput", "BooleanFunction", "CountingOracle", "Kind", "Unit", "evaluate", "simon_value",
    "OR", "MAJ", "PARITY", "THRESHOLD", "SIMON", "TABLE",
]
