"""Spatial data container."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .geometry import as_coords


@dataclass
class SpatialData:
    """``n`` locations in the plane paired with an ``(n, p)`` value matrix."""

    coords: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.coords = as_coords(self.coords)
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        if vals.ndim != 2:
            raise DataError(f"values must be a 2-d array, got shape {vals.shape}")
        if vals.shape[0] != self.coords.shape[0]:
            raise DataError(f"{self.coords.shape[0]} locations but {vals.shape[0]} value rows")
        if not np.all(np.isfinite(vals)):
            raise DataError("values contain non-finite entries")
        self.values = vals

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    def transformed(self, B, a=None) -> "SpatialData":
        """Affine image ``B x + a`` of every observation."""
        B = np.asarray(B, dtype=float)
        vals = self.values @ B.T
        if a is not None:
            vals = vals + np.asarray(a, dtype=float)
        return SpatialData(self.coords, vals)
