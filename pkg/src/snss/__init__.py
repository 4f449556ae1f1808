"""Spatial non-stationary blind source separation."""

from .coda import clr, combined_loadings, ilr_pivot, moving_block_variance
from .data import SpatialData
from .estimators import UnmixingModel, fobi, latent_scores, sbss, snss_jd, snss_sd, snss_sjd
from .geometry import F0, Ball, Gauss, GridBlocks, HalveX, HalveY, NearestCenters, Ring, make_partition
from .jointdiag import givens_joint_diag, simultaneous_diag
from .loccov import local_cov, sample_mean, whiten
from .metrics import mdi

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "F0",
    "Gauss",
    "GridBlocks",
    "HalveX",
    "HalveY",
    "NearestCenters",
    "Ring",
    "SpatialData",
    "UnmixingModel",
    "clr",
    "combined_loadings",
    "fobi",
    "givens_joint_diag",
    "ilr_pivot",
    "latent_scores",
    "local_cov",
    "make_partition",
    "mdi",
    "moving_block_variance",
    "sample_mean",
    "sbss",
    "simultaneous_diag",
    "snss_jd",
    "snss_sd",
    "snss_sjd",
    "whiten",
]
