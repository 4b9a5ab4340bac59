"""Dense wavelet reconstruction matrix: approximation coefficients -> approximation.

The matrix is materialized column by column from `reconstruct_component`, so it
is consistent with the transform convention by construction.  Dense storage is
deliberate: the signals here index areas or regions, so the operator stays small.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .wavelet import FilterPair, _frozen, reconstruct_component


@dataclass(frozen=True)
class ReconstructionMatrix:
    """m x (m / 2**level) operator mapping coefficient vectors to approximations."""

    entries: np.ndarray
    length: int
    level: int
    filters: FilterPair = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen(self.entries))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def apply(self, coeffs) -> np.ndarray:
        """Matrix-vector product with a coefficient vector."""
        c = np.asarray(coeffs, dtype=np.float64)
        if c.shape != (self.shape[1],):
            raise ShapeError(f"expected {self.shape[1]} coefficients, got {c.shape}")
        return self.entries @ c

    def row(self, index: int) -> np.ndarray:
        """One row, 1-based to match signal positions."""
        if not 1 <= index <= self.length:
            raise ShapeError(f"row index {index} outside 1..{self.length}")
        return self.entries[index - 1]


def build_wrm(length: int, level: int, filters: FilterPair) -> ReconstructionMatrix:
    """Materialize the reconstruction operator for the approximation band.

    Column j is the reconstruction of the j-th unit coefficient vector.
    """
    if level < 1:
        raise ShapeError(f"level must be >= 1, got {level}")
    if length % (1 << level):
        raise ShapeError(f"length {length} is not divisible by 2**{level}")
    width = length >> level
    entries = np.zeros((length, width))
    for j in range(width):
        unit = np.zeros(width)
        unit[j] = 1.0
        entries[:, j] = reconstruct_component(unit, "approx", level, length, filters)
    return ReconstructionMatrix(entries=entries, length=length, level=level, filters=filters)
