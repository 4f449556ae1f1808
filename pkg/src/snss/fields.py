"""Matern covariances and Gaussian latent-field simulation for settings 1-6."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.spatial.distance import cdist, pdist, squareform
from scipy.special import gamma, kv

from . import _settings
from .data import SpatialData
from .errors import ConfigError, NumericError
from .geometry import Partition, as_coords

N_COMPONENTS = 3
JITTER_BASE = 1e-10
JITTER_RETRIES = 3
# t**nu * K_nu(t) < 1e-24 beyond this argument for every nu in the settings
BESSEL_CUTOFF = 60.0


@dataclass(frozen=True)
class MaternParams:
    sigma2: float
    nu: float
    phi: float

    def __post_init__(self):
        if not (self.sigma2 > 0 and self.nu > 0 and self.phi > 0):
            raise ConfigError(f"Matern parameters must be positive, got {self}")


def _bessel_term(t, nu: float):
    """``t**nu * K_nu(t)`` with its limit ``Gamma(nu) 2**(nu-1)`` at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    nu = float(nu)
    out = np.zeros(t.shape)
    near = t <= BESSEL_CUTOFF
    ts = t[near]
    with np.errstate(under="ignore", invalid="ignore"):
        val = ts**nu * kv(nu, ts)
    # K_nu underflows to 0 for huge arguments; the product is 0 there
    val = np.where(np.isfinite(val), val, 0.0)
    val[ts == 0] = gamma(nu) * 2.0 ** (nu - 1.0)
    out[near] = val
    return out


def matern_cov(h, params: MaternParams):
    """Stationary isotropic Matern covariance at distance(s) ``h``."""
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise ValueError("distances must be non-negative")
    norm = params.sigma2 / (2.0 ** (params.nu - 1.0) * gamma(params.nu))
    out = norm * _bessel_term(h / params.phi, params.nu)
    return out if out.ndim else float(out)


def _nonstat_kernel(dist, a: MaternParams | tuple, b: MaternParams | tuple):
    """Non-stationary Matern between locations with local parameters ``a``, ``b``.

    ``a`` and ``b`` are scalar (variance, shape, range) triples.
    """
    s2a, nua, phia = a
    s2b, nub, phib = b
    qa = phia**2 / (8.0 * nua)
    qb = phib**2 / (8.0 * nub)
    q = qa + qb
    # each root factor is ((phi^2 / 4 nu) / (Gamma(nu) 2^(nu-1)))^(1/2)
    fa = np.sqrt(2.0 * qa / (gamma(nua) * 2.0 ** (nua - 1.0)))
    fb = np.sqrt(2.0 * qb / (gamma(nub) * 2.0 ** (nub - 1.0)))
    nu = 0.5 * (nua + nub)
    t = np.asarray(dist, dtype=float) / np.sqrt(q)
    return np.sqrt(s2a * s2b) * fa * fb / q * _bessel_term(t, nu)


def _as_tuple(p: MaternParams):
    return (p.sigma2, p.nu, p.phi)


@dataclass(frozen=True)
class ClusterParamField:
    """Piecewise-constant Matern parameters, one triple per cluster.

    A location's cluster is its nearest center (lowest index on ties); a
    field without centers must have exactly one parameter triple.
    """

    params: tuple
    centers: tuple | None = None

    def __post_init__(self):
        if not self.params:
            raise ConfigError("ClusterParamField needs at least one parameter triple")
        if self.centers is None and len(self.params) != 1:
            raise ConfigError("centers are required for more than one cluster")
        if self.centers is not None and len(self.centers) != len(self.params):
            raise ConfigError("one parameter triple per cluster center is required")

    def cluster_of(self, point) -> int:
        if self.centers is None:
            return 0
        c = np.asarray(self.centers, dtype=float)
        return int(np.argmin(((c - np.asarray(point, dtype=float)) ** 2).sum(axis=1)))

    def at(self, point) -> MaternParams:
        return self.params[self.cluster_of(point)]


def nonstat_matern_cov(s, s2, fld: ClusterParamField) -> float:
    """Non-stationary Matern covariance between two locations."""
    s = np.asarray(s, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    dist = float(np.hypot(*(s - s2)))
    return float(_nonstat_kernel(dist, _as_tuple(fld.at(s)), _as_tuple(fld.at(s2))))


# ---------------------------------------------------------------------------
# settings


@dataclass(frozen=True)
class SettingSpec:
    id: int
    A: np.ndarray = field(default_factory=lambda: np.eye(N_COMPONENTS))
    b: np.ndarray = field(default_factory=lambda: np.zeros(N_COMPONENTS))

    def __post_init__(self):
        if self.id not in range(1, 7):
            raise ConfigError(f"setting id must be in 1..6, got {self.id}")
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.shape != (N_COMPONENTS, N_COMPONENTS) or b.shape != (N_COMPONENTS,):
            raise ConfigError("mixing matrix must be 3x3 and shift a 3-vector")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    def variance(self, component: int, cluster: int) -> float:
        return _lookup(_settings.WHITE_NOISE_VAR, cluster, component, self.id)

    def cluster_params(self, component: int, cluster: int) -> MaternParams:
        """Matern triple of ``component`` in ``cluster`` (settings 2-5)."""
        s2, nu, phi = _lookup(_settings.CLUSTER_MATERN, component, cluster, self.id)
        if self.id in (3, 5):
            s2 = self.variance(component, cluster)
        return MaternParams(s2, nu, phi)

    def stationary_params(self, component: int) -> MaternParams:
        return MaternParams(*_lookup(_settings.STATIONARY_MATERN, component, None, self.id))


def _lookup(table, i, j, setting_id):
    try:
        row = table[i]
        return row if j is None else row[j]
    except IndexError:
        raise ConfigError(f"setting {setting_id}: no parameters for index ({i}, {j})") from None


def build_component_cov(coords, clusters: Partition, setting: SettingSpec, component: int) -> np.ndarray:
    """Covariance matrix of latent component ``component`` (0-based) at ``coords``."""
    coords = as_coords(coords)
    labels = clusters.labels
    n = coords.shape[0]
    if labels.shape[0] != n:
        raise ConfigError("cluster labels do not match the number of locations")
    sid = setting.id
    if sid == 1:
        var = np.array([setting.variance(component, c) for c in range(clusters.n_blocks)])
        return np.diag(var[labels])
    if sid == 6:
        cov = squareform(matern_cov(pdist(coords), setting.stationary_params(component)))
        cov[np.diag_indices(n)] = setting.stationary_params(component).sigma2
        return cov
    if sid in (2, 3):
        cov = np.zeros((n, n))
        for c, idx in enumerate(clusters.blocks()):
            if idx.size:
                prm = setting.cluster_params(component, c)
                block = squareform(matern_cov(pdist(coords[idx]), prm))
                block[np.diag_indices(idx.size)] = prm.sigma2
                cov[np.ix_(idx, idx)] = block
        return cov
    params = [_as_tuple(setting.cluster_params(component, c)) for c in range(clusters.n_blocks)]
    blocks = clusters.blocks()
    cov = np.empty((n, n))
    for a, ia in enumerate(blocks):
        for b in range(a, len(blocks)):
            ib = blocks[b]
            if not (ia.size and ib.size):
                continue
            if a == b:
                vals = squareform(_nonstat_kernel(pdist(coords[ia]), params[a], params[a]))
                vals[np.diag_indices(ia.size)] = params[a][0]
                cov[np.ix_(ia, ia)] = vals
                continue
            vals = _nonstat_kernel(cdist(coords[ia], coords[ib]), params[a], params[b])
            cov[np.ix_(ia, ib)] = vals
            cov[np.ix_(ib, ia)] = vals.T
    return cov


def factorize(cov: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor, adding escalating diagonal jitter on failure."""
    n = cov.shape[0]
    base = JITTER_BASE * np.trace(cov) / n
    for attempt in range(JITTER_RETRIES + 1):
        jitter = 0.0 if attempt == 0 else base * 10.0 ** (attempt - 1)
        try:
            return linalg.cholesky(cov + jitter * np.eye(n), lower=True, check_finite=False)
        except linalg.LinAlgError:
            continue
    raise NumericError(f"covariance factorization failed after {JITTER_RETRIES} jitter retries")


def sample_setting(coords, clusters: Partition, setting: SettingSpec, seed) -> SpatialData:
    """Draw one realization ``x = A z + b`` of the given setting at ``coords``."""
    coords = as_coords(coords)
    rng = np.random.default_rng(seed)
    n = coords.shape[0]
    z = np.empty((n, N_COMPONENTS))
    for j in range(N_COMPONENTS):
        e = rng.standard_normal(n)
        if setting.id == 1:
            var = np.array([setting.variance(j, c) for c in range(clusters.n_blocks)])
            z[:, j] = np.sqrt(var[clusters.labels]) * e
        else:
            z[:, j] = factorize(build_component_cov(coords, clusters, setting, j)) @ e
    return SpatialData(coords, z @ setting.A.T + setting.b)
