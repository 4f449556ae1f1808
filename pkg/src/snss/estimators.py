"""Unmixing-matrix estimators for spatial (non-)stationary source separation.

All estimators return an :class:`UnmixingModel` whose location is the global
sample mean. Latent scores are ``(x - T) W'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import SpatialData
from .errors import ConfigError, DataError, EmptyBlockError, NotPositiveDefiniteError
from .geometry import F0, Partition, Rect, Single, make_partition, parse_kernel, parse_partition
from .jointdiag import fix_signs, givens_joint_diag, simultaneous_diag
from .loccov import block_cov, local_cov, sample_mean, whiten

METHODS = ("sd", "jd", "sjd", "sbss", "fobi")


@dataclass
class UnmixingModel:
    W: np.ndarray
    T: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return bool(self.diagnostics.get("converged", True))


def latent_scores(model: UnmixingModel, data: SpatialData) -> np.ndarray:
    if data.p != model.W.shape[1]:
        raise DataError(f"model expects p={model.W.shape[1]} columns, data has {data.p}")
    return (data.values - model.T) @ model.W.T


def _check_blocks(partition: Partition, n: int, min_size: int):
    if partition.labels.shape[0] != n:
        raise DataError(f"partition covers {partition.labels.shape[0]} locations, data has {n}")
    for k, size in enumerate(partition.sizes()):
        if size < min_size:
            raise EmptyBlockError(f"block {k} has {size} locations, need at least {min_size}", block=k)


def _whiten_block(m, block):
    try:
        return whiten(m)
    except NotPositiveDefiniteError as exc:
        raise NotPositiveDefiniteError(f"{block}: {exc}", eigenvalue=exc.eigenvalue) from None


def snss_sd(data: SpatialData, partition: Partition) -> UnmixingModel:
    """Simultaneous diagonalization of the covariances of two sub-domains."""
    if partition.n_blocks != 2:
        raise ConfigError(f"sd needs exactly 2 blocks, got {partition.n_blocks}")
    _check_blocks(partition, data.n, data.p)
    b1, b2 = partition.blocks()
    m1 = block_cov(data, b1)
    m2 = block_cov(data, b2)
    _whiten_block(m1, "block 0")
    res = simultaneous_diag(m1, m2)
    return UnmixingModel(W=res.W, T=sample_mean(data), method="sd", diagnostics={"D": res.D})


def _standardize(data: SpatialData):
    mu = sample_mean(data)
    root = _whiten_block(block_cov(data), "whole domain").root
    return SpatialData(data.coords, (data.values - mu) @ root), root, mu


def _joint(mats, labels, root, mu, method, tol, max_sweeps) -> UnmixingModel:
    res = givens_joint_diag(mats, tol=tol, max_sweeps=max_sweeps)
    diag = {
        "converged": res.converged,
        "sweeps": res.sweeps,
        "criterion": res.criterion,
        "matrices": labels,
        "diagonals": res.diagonals,
    }
    return UnmixingModel(W=res.U @ root, T=mu, method=method, diagnostics=diag)


def snss_jd(data: SpatialData, partition: Partition, tol: float = 1e-10, max_sweeps: int = 100) -> UnmixingModel:
    """Joint diagonalization of the block covariances of standardized data."""
    _check_blocks(partition, data.n, data.p)
    std, root, mu = _standardize(data)
    mats = [block_cov(std, b) for b in partition.blocks()]
    labels = [f"block{k}/f0" for k in range(partition.n_blocks)]
    return _joint(mats, labels, root, mu, "jd", tol, max_sweeps)


def snss_sjd(data: SpatialData, partition: Partition, kernels, tol: float = 1e-10, max_sweeps: int = 100) -> UnmixingModel:
    """Joint diagonalization of local covariances over all (block, kernel) pairs."""
    kernels = list(kernels)
    if not kernels:
        raise ConfigError("sjd needs at least one kernel")
    _check_blocks(partition, data.n, 1)
    std, root, mu = _standardize(data)
    mats, labels = [], []
    for k, b in enumerate(partition.blocks()):
        for f in kernels:
            mats.append(local_cov(std, b, f))
            labels.append(f"block{k}/{f.label}")
    return _joint(mats, labels, root, mu, "sjd", tol, max_sweeps)


def sbss(data: SpatialData, kernels, tol: float = 1e-10, max_sweeps: int = 100) -> UnmixingModel:
    """Stationary spatial BSS: local covariances over the undivided domain.

    Zero-lag kernels are dropped from ``kernels``.
    """
    kernels = [f for f in kernels if not isinstance(f, F0)]
    if not kernels:
        raise ConfigError("sbss needs at least one spatial kernel other than f0")
    std, root, mu = _standardize(data)
    mats = [local_cov(std, None, f) for f in kernels]
    labels = [f"all/{f.label}" for f in kernels]
    return _joint(mats, labels, root, mu, "sbss", tol, max_sweeps)


def fobi(data: SpatialData) -> UnmixingModel:
    """Fourth-order blind identification; ignores the locations."""
    std, root, mu = _standardize(data)
    z = std.values
    b = (z * np.sum(z * z, axis=1)[:, None]).T @ z / data.n
    evals, evecs = np.linalg.eigh(0.5 * (b + b.T))
    order = np.argsort(-evals, kind="stable")
    vt = fix_signs(evecs[:, order].T)
    return UnmixingModel(W=vt @ root, T=mu, method="fobi", diagnostics={"kurtosis": evals[order]})


# ---------------------------------------------------------------------------
# method specs: "name[@partition][/kernel+kernel...]"


@dataclass(frozen=True)
class MethodSpec:
    name: str
    partition: object = None
    kernels: tuple = ()

    def __post_init__(self):
        if self.name not in METHODS:
            raise ConfigError(f"unknown method {self.name!r}; expected one of {', '.join(METHODS)}")
        if self.name in ("sd", "jd", "sjd") and self.partition is None:
            raise ConfigError(f"method {self.name} needs a partition")
        if self.name in ("sjd", "sbss") and not self.kernels:
            raise ConfigError(f"method {self.name} needs at least one kernel")

    @property
    def partition_label(self) -> str:
        return self.partition.label if self.partition is not None else ""

    @property
    def kernels_label(self) -> str:
        return "+".join(k.label for k in self.kernels)

    @property
    def label(self) -> str:
        out = self.name
        if self.partition is not None:
            out += "@" + self.partition_label
        if self.kernels:
            out += "/" + self.kernels_label
        return out


def parse_method(text: str) -> MethodSpec:
    """Parse a method spec such as ``sjd@grid:2x2/f0+ball:2`` or ``fobi``."""
    t = text.strip()
    kernels = ()
    if "/" in t:
        t, ktext = t.split("/", 1)
        kernels = tuple(parse_kernel(k) for k in ktext.split("+") if k.strip())
    partition = None
    if "@" in t:
        t, ptext = t.split("@", 1)
        partition = parse_partition(ptext)
    return MethodSpec(t.strip().lower(), partition, kernels)


def fit(spec: MethodSpec, data: SpatialData, domain: Rect | None = None) -> UnmixingModel:
    """Run the estimator described by ``spec`` on ``data``."""
    partition = None
    if spec.partition is not None and not isinstance(spec.partition, Single):
        partition = make_partition(data.coords, spec.partition, domain)
    elif spec.partition is not None:
        partition = Partition.single(data.n)
    if spec.name == "sd":
        return snss_sd(data, partition)
    if spec.name == "jd":
        return snss_jd(data, partition)
    if spec.name == "sjd":
        return snss_sjd(data, partition, spec.kernels)
    if spec.name == "sbss":
        return sbss(data, spec.kernels)
    return fobi(data)
