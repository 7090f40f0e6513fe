"""Geometric mmWave channel generation and truncated SVD.

The channel is a clustered line-of-sight model on uniform linear arrays:
one deterministic LOS ray plus Gaussian-gain scattered rays spread around a
few cluster centres. Only the singular structure of ``H`` is consumed
downstream, so the model stops at what is needed for a realistic decaying
singular-value profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from os import PathLike
from typing import Optional, Union

import numpy as np

from .errors import ConfigurationError, DimensionError

__all__ = [
    "ArrayConfig",
    "ChannelParams",
    "ChannelDecomposition",
    "ula_response",
    "geometric_channel",
    "generate_channel",
    "svd_decompose",
    "save_channel",
    "load_channel",
]


@dataclass(frozen=True)
class ArrayConfig:
    num_tx: int = 32
    num_rx: int = 64
    element_spacing: float = 0.5
    geometry: str = "ULA"

    def __post_init__(self):
        if self.num_tx < 1 or self.num_rx < 1:
            raise ConfigurationError("array sizes must be >= 1")
        if not self.element_spacing > 0:
            raise ConfigurationError("element_spacing must be positive")
        if self.geometry != "ULA":
            raise ConfigurationError(f"unsupported geometry {self.geometry!r}")


@dataclass(frozen=True)
class ChannelParams:
    """Parameters of the clustered LOS channel.

    ``cluster_decay_db`` is the power drop between consecutive clusters;
    cluster 0 carries the unit-gain LOS ray as its first ray.
    """

    array: ArrayConfig = field(default_factory=ArrayConfig)
    num_clusters: int = 2
    rays_per_cluster: int = 20
    angle_spread: float = np.deg2rad(15.0)
    carrier_ghz: float = 28.0
    seed: Optional[int] = None
    cluster_decay_db: float = 10.0

    def __post_init__(self):
        if self.num_clusters < 1:
            raise ConfigurationError("num_clusters must be >= 1")
        if self.rays_per_cluster < 1:
            raise ConfigurationError("rays_per_cluster must be >= 1")
        if self.angle_spread < 0:
            raise ConfigurationError("angle_spread must be >= 0")
        if not self.carrier_ghz > 0:
            raise ConfigurationError("carrier_ghz must be positive")


@dataclass(frozen=True)
class ChannelDecomposition:
    u: np.ndarray
    sigma: np.ndarray
    f_opt: np.ndarray

    @property
    def n_s(self) -> int:
        return self.sigma.size

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.f_opt.conj().T


def ula_response(angle: float, n_elements: int, spacing: float = 0.5) -> np.ndarray:
    """Unit-norm ULA steering vector.

    Parameters
    ----------
    angle : float
        Direction in radians, measured from broadside.
    n_elements : int
        Number of array elements.
    spacing : float
        Element spacing in wavelengths.

    Returns
    -------
    np.ndarray
        Complex vector of length ``n_elements`` whose entries all have
        magnitude ``1/sqrt(n_elements)``.
    """
    if n_elements < 1:
        raise DimensionError("n_elements must be >= 1")
    k = np.arange(n_elements)
    return np.exp(2j * np.pi * spacing * k * np.sin(angle)) / np.sqrt(n_elements)


def geometric_channel(gains, aoa, aod, array: ArrayConfig) -> np.ndarray:
    """Sum of rank-one ray contributions scaled by ``sqrt(Nt*Nr/L)``."""
    gains = np.atleast_1d(np.asarray(gains, dtype=complex))
    aoa = np.atleast_1d(np.asarray(aoa, dtype=float))
    aod = np.atleast_1d(np.asarray(aod, dtype=float))
    if not (gains.shape == aoa.shape == aod.shape):
        raise DimensionError("gains, aoa and aod must have the same length")
    n_rays = gains.size
    a_rx = np.stack([ula_response(t, array.num_rx, array.element_spacing) for t in aoa], axis=1)
    a_tx = np.stack([ula_response(t, array.num_tx, array.element_spacing) for t in aod], axis=1)
    scale = np.sqrt(array.num_tx * array.num_rx / n_rays)
    return scale * (a_rx * gains) @ a_tx.conj().T


def generate_channel(params: ChannelParams, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Draw one ``N_r x N_t`` channel matrix.

    If ``rng`` is omitted a generator seeded from ``params.seed`` is used,
    so two calls with the same seeded params return identical matrices.
    """
    if rng is None:
        rng = np.random.default_rng(params.seed)
    n_cl, n_ray = params.num_clusters, params.rays_per_cluster
    centre_aoa = rng.uniform(-np.pi / 2, np.pi / 2, n_cl)
    centre_aod = rng.uniform(-np.pi / 2, np.pi / 2, n_cl)
    aoa = centre_aoa[:, None] + params.angle_spread * rng.standard_normal((n_cl, n_ray))
    aod = centre_aod[:, None] + params.angle_spread * rng.standard_normal((n_cl, n_ray))
    cluster_power = 10.0 ** (-params.cluster_decay_db * np.arange(n_cl) / 10.0)
    gains = np.sqrt(cluster_power[:, None] / 2) * (
        rng.standard_normal((n_cl, n_ray)) + 1j * rng.standard_normal((n_cl, n_ray))
    )
    # LOS ray sits exactly at the first cluster centre with unit gain.
    gains[0, 0] = 1.0
    aoa[0, 0] = centre_aoa[0]
    aod[0, 0] = centre_aod[0]
    return geometric_channel(gains.ravel(), aoa.ravel(), aod.ravel(), params.array)


def svd_decompose(h: np.ndarray, n_s: int, floor: Optional[float] = None) -> ChannelDecomposition:
    """Leading ``n_s`` singular triplets of ``h`` with a fixed phase convention.

    Each column of ``u`` is rotated so its largest-magnitude entry is real
    and positive; the matching column of ``f_opt`` gets the same rotation,
    which keeps ``u @ diag(sigma) @ f_opt^H`` unchanged.

    If ``floor`` is given, paths with ``sigma_i / sigma_1 < floor`` are
    dropped, so the returned ``n_s`` may be smaller than requested.
    """
    h = np.asarray(h)
    if h.ndim != 2:
        raise DimensionError("channel must be a 2-D matrix")
    if n_s < 1 or n_s > min(h.shape):
        raise DimensionError(f"n_s={n_s} must lie in [1, {min(h.shape)}]")
    u, s, vh = np.linalg.svd(h, full_matrices=False)
    u, s, v = u[:, :n_s], s[:n_s], vh[:n_s].conj().T
    idx = np.argmax(np.abs(u), axis=0)
    pivot = u[idx, np.arange(n_s)]
    phase = np.where(np.abs(pivot) > 0, pivot / np.abs(pivot), 1.0)
    u = u / phase
    v = v / phase
    if floor is not None and s[0] > 0:
        keep = s / s[0] >= floor
        u, s, v = u[:, keep], s[keep], v[:, keep]
    return ChannelDecomposition(u=u, sigma=s, f_opt=v)


def save_channel(path: Union[str, PathLike], h: np.ndarray) -> None:
    """Write ``h`` as text: ``"N_r N_t"`` header, then one row per line of ``re im`` pairs."""
    h = np.asarray(h, dtype=complex)
    lines = [f"{h.shape[0]} {h.shape[1]}"]
    for row in h:
        lines.append(" ".join(f"{float(z.real)!r} {float(z.imag)!r}" for z in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_channel(path: Union[str, PathLike]) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise ConfigurationError("channel file is missing its header")
    n_r, n_t = int(tokens[0]), int(tokens[1])
    values = np.array([float(t) for t in tokens[2:]])
    if values.size != 2 * n_r * n_t:
        raise DimensionError(
            f"expected {2 * n_r * n_t} numbers for a {n_r}x{n_t} matrix, got {values.size}"
        )
    return (values[0::2] + 1j * values[1::2]).reshape(n_r, n_t)
