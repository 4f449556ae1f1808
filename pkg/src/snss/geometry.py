"""Sample locations, spatial kernels and sub-domain partitions.

Block labels are 0-based throughout: a partition with ``K`` blocks uses labels
``0 .. K-1``. Grid cells are half-open ``[lo, hi)`` except on the upper domain
edge, which is closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np

from .errors import ConfigError, DataError, EmptyBlockError

# 95% standard-normal quantile, fixed for bit-stable Gauss kernels.
GAUSS_Q = 1.6448536269514722


class Rect(NamedTuple):
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    @classmethod
    def square(cls, side: float) -> "Rect":
        return cls(0.0, 0.0, float(side), float(side))

    @classmethod
    def bounding(cls, coords: np.ndarray) -> "Rect":
        coords = as_coords(coords)
        lo = coords.min(axis=0)
        hi = coords.max(axis=0)
        return cls(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


def as_coords(points) -> np.ndarray:
    """Validate and return an ``(n, 2)`` float array of locations."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DataError(f"coordinates must have shape (n, 2), got {arr.shape}")
    if arr.shape[0] < 1:
        raise DataError("at least one location is required")
    if not np.all(np.isfinite(arr)):
        raise DataError("coordinates contain non-finite values")
    return arr


# ---------------------------------------------------------------------------
# coordinate patterns


def gen_uniform_coords(n_side: int, seed) -> np.ndarray:
    """``n_side**2`` locations uniform on ``[0, n_side]^2``."""
    if n_side < 1:
        raise ValueError("n_side must be >= 1")
    rng = np.random.default_rng(seed)
    n = n_side * n_side
    x = rng.uniform(size=n) * n_side
    y = rng.uniform(size=n) * n_side
    return np.column_stack([x, y])


def gen_skewed_coords(n_side: int, seed) -> np.ndarray:
    """``n_side**2`` locations with Beta(2, 5) x-values and uniform y-values."""
    if n_side < 1:
        raise ValueError("n_side must be >= 1")
    rng = np.random.default_rng(seed)
    n = n_side * n_side
    x = rng.beta(2.0, 5.0, size=n) * n_side
    y = rng.uniform(size=n) * n_side
    return np.column_stack([x, y])


def draw_centers(domain: Rect, seed, m: int = 3) -> np.ndarray:
    """``m`` cluster centers drawn uniformly on ``domain``."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(domain.xmin, domain.xmax, size=m)
    y = rng.uniform(domain.ymin, domain.ymax, size=m)
    return np.column_stack([x, y])


# ---------------------------------------------------------------------------
# kernels


@dataclass(frozen=True)
class Ball:
    r: float

    def __post_init__(self):
        if not self.r >= 0:
            raise ConfigError(f"ball radius must be >= 0, got {self.r}")

    @property
    def support(self) -> float:
        return self.r

    def weight(self, dist):
        return (np.asarray(dist) <= self.r).astype(float)

    @property
    def label(self) -> str:
        return f"ball:{_fmt(self.r)}"


@dataclass(frozen=True)
class Ring:
    r1: float
    r2: float

    def __post_init__(self):
        if not (0 <= self.r1 < self.r2):
            raise ConfigError(f"ring needs 0 <= r1 < r2, got ({self.r1}, {self.r2})")

    @property
    def support(self) -> float:
        return self.r2

    def weight(self, dist):
        d = np.asarray(dist)
        return ((d > self.r1) & (d <= self.r2)).astype(float)

    @property
    def label(self) -> str:
        return f"ring:{_fmt(self.r1)}:{_fmt(self.r2)}"


@dataclass(frozen=True)
class Gauss:
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ConfigError(f"gauss scale must be > 0, got {self.r}")

    @property
    def support(self) -> float:
        return math.inf

    def weight(self, dist):
        d = np.asarray(dist, dtype=float)
        return np.exp(-0.5 * (GAUSS_Q * d / self.r) ** 2)

    @property
    def label(self) -> str:
        return f"gauss:{_fmt(self.r)}"


@dataclass(frozen=True)
class F0:
    """Zero-lag kernel; turns a local covariance into a plain block covariance."""

    @property
    def support(self) -> float:
        return 0.0

    def weight(self, dist):
        return (np.asarray(dist) == 0).astype(float)

    @property
    def label(self) -> str:
        return "f0"


KernelSpec = Union[Ball, Ring, Gauss, F0]


def kernel_weight(spec: KernelSpec, diff) -> float:
    """Kernel weight of a single lag vector."""
    d = np.asarray(diff, dtype=float)
    return float(spec.weight(math.hypot(d[0], d[1])))


def parse_kernel(text: str) -> KernelSpec:
    """Parse ``ball:R``, ``ring:R1:R2``, ``gauss:R`` or ``f0``."""
    parts = text.strip().lower().split(":")
    try:
        if parts[0] == "f0" and len(parts) == 1:
            return F0()
        if parts[0] == "ball" and len(parts) == 2:
            return Ball(float(parts[1]))
        if parts[0] == "ring" and len(parts) == 3:
            return Ring(float(parts[1]), float(parts[2]))
        if parts[0] == "gauss" and len(parts) == 2:
            return Gauss(float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"bad kernel spec {text!r}: {exc}") from None
    raise ConfigError(f"unknown kernel spec {text!r}")


def _fmt(v: float) -> str:
    return repr(float(v)).removesuffix(".0")


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class HalveX:
    @property
    def label(self) -> str:
        return "halve-x"


@dataclass(frozen=True)
class HalveY:
    @property
    def label(self) -> str:
        return "halve-y"


@dataclass(frozen=True)
class GridBlocks:
    kx: int
    ky: int

    def __post_init__(self):
        if self.kx < 1 or self.ky < 1:
            raise ConfigError(f"grid needs kx, ky >= 1, got {self.kx}x{self.ky}")

    @property
    def label(self) -> str:
        return f"grid:{self.kx}x{self.ky}"


@dataclass(frozen=True)
class NearestCenters:
    centers: tuple

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=float)
        if c.ndim != 2 or c.shape[1] != 2 or c.shape[0] < 2:
            raise ConfigError("NearestCenters needs an (m, 2) array with m >= 2")
        if len({tuple(row) for row in c}) != c.shape[0]:
            raise ConfigError("cluster centers must be pairwise distinct")
        object.__setattr__(self, "centers", tuple(map(tuple, c)))

    @property
    def label(self) -> str:
        return f"centers:{len(self.centers)}"


PartitionSpec = Union[HalveX, HalveY, GridBlocks, NearestCenters]


@dataclass(frozen=True)
class Single:
    """Trivial one-block partition (whole domain)."""

    @property
    def label(self) -> str:
        return "none"


def parse_partition(text: str) -> PartitionSpec:
    """Parse ``halve-x``, ``halve-y``, ``grid:KxL`` or ``none``."""
    t = text.strip().lower()
    if t == "halve-x":
        return HalveX()
    if t == "halve-y":
        return HalveY()
    if t in ("none", "single"):
        return Single()
    if t.startswith("grid:"):
        dims = t[5:].split("x")
        if len(dims) == 2 and all(d.isdigit() for d in dims):
            return GridBlocks(int(dims[0]), int(dims[1]))
    raise ConfigError(f"unknown partition spec {text!r}")


@dataclass
class Partition:
    labels: np.ndarray
    n_blocks: int
    _blocks: list = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.intp)
        if self.labels.ndim != 1:
            raise ValueError("partition labels must be one-dimensional")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() >= self.n_blocks):
            raise ValueError("partition labels out of range")

    @classmethod
    def single(cls, n: int) -> "Partition":
        return cls(np.zeros(n, dtype=np.intp), 1)

    def blocks(self) -> list:
        """Index arrays of the blocks, in label order."""
        if self._blocks is None:
            self._blocks = [np.flatnonzero(self.labels == k) for k in range(self.n_blocks)]
        return self._blocks

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_blocks)


def _grid_labels(coords, domain: Rect, kx: int, ky: int) -> np.ndarray:
    w = domain.xmax - domain.xmin
    h = domain.ymax - domain.ymin
    if (kx > 1 and not w > 0) or (ky > 1 and not h > 0):
        raise DataError(f"domain {tuple(domain)} has non-positive side length")
    x, y = coords[:, 0], coords[:, 1]
    eps = 1e-12 * max(abs(w), abs(h), 1.0)
    outside = (x < domain.xmin - eps) | (x > domain.xmax + eps) | (y < domain.ymin - eps) | (y > domain.ymax + eps)
    if np.any(outside):
        i = int(np.flatnonzero(outside)[0])
        raise DataError(f"location {i} {tuple(coords[i])} lies outside domain {tuple(domain)}")
    ix = np.zeros(len(x), dtype=np.intp) if kx == 1 else np.floor((x - domain.xmin) / w * kx).astype(np.intp)
    iy = np.zeros(len(y), dtype=np.intp) if ky == 1 else np.floor((y - domain.ymin) / h * ky).astype(np.intp)
    ix = np.clip(ix, 0, kx - 1)
    iy = np.clip(iy, 0, ky - 1)
    return iy * kx + ix


def make_partition(coords, spec, domain: Rect | None = None, require_nonempty: bool = True) -> Partition:
    """Assign every location to a block.

    Grid blocks are numbered row-major from the lower-left cell
    (``label = iy * kx + ix``). ``NearestCenters`` ties go to the lowest
    center index. If ``domain`` is omitted the bounding box of ``coords`` is
    used.
    """
    coords = as_coords(coords)
    if domain is None:
        domain = Rect.bounding(coords)
    if isinstance(spec, Single):
        part = Partition.single(len(coords))
    elif isinstance(spec, HalveX):
        part = Partition(_grid_labels(coords, domain, 2, 1), 2)
    elif isinstance(spec, HalveY):
        part = Partition(_grid_labels(coords, domain, 1, 2), 2)
    elif isinstance(spec, GridBlocks):
        part = Partition(_grid_labels(coords, domain, spec.kx, spec.ky), spec.kx * spec.ky)
    elif isinstance(spec, NearestCenters):
        centers = np.asarray(spec.centers)
        d2 = ((coords[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        # argmin returns the first minimum, i.e. the lowest center index on ties
        part = Partition(np.argmin(d2, axis=1), len(centers))
    else:
        raise ConfigError(f"unsupported partition spec {spec!r}")
    if require_nonempty:
        sizes = part.sizes()
        empty = np.flatnonzero(sizes == 0)
        if empty.size:
            raise EmptyBlockError(f"partition {spec.label} leaves block {int(empty[0])} empty", block=int(empty[0]))
    return part
