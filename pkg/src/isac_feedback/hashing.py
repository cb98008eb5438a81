"""Shared acknowledgment hash codebook.

The codebook has 2**b_p rows of length l with entries +-1/sqrt(l). Rows are
derived lazily from (codebook_seed, index) with a counter-mode stream, so
the full table is never stored; the same (seed, index) always reproduces
the same row. Entries are real but returned as complex for uniform algebra
with channel vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import substream

_ROW_LABEL = "hash-row"


@dataclass(frozen=True)
class HashCodebook:
    b_p: int
    l: int
    codebook_seed: int

    def __post_init__(self):
        if self.b_p < 1:
            raise ValueError(f"b_p must be >= 1, got {self.b_p}")
        if self.l < 1:
            raise ValueError(f"row length must be >= 1, got {self.l}")

    @property
    def n_rows(self) -> int:
        return 1 << self.b_p

    def row(self, index: int) -> np.ndarray:
        """Row `index` of the codebook: i.i.d. Rademacher scaled by 1/sqrt(l)."""
        if not 0 <= index < self.n_rows:
            raise ValueError(f"hash index {index} out of range [0, {self.n_rows})")
        rng = substream(self.codebook_seed, index, _ROW_LABEL)
        signs = rng.integers(0, 2, size=self.l) * 2 - 1
        return (signs / np.sqrt(self.l)).astype(complex)

    def materialize(self) -> np.ndarray:
        """Full (2**b_p, l) table; intended for small b_p only."""
        return np.vstack([self.row(i) for i in range(self.n_rows)])


def hash_row(cb: HashCodebook, index: int) -> np.ndarray:
    return cb.row(index)
