"""Link metrics: MSE, CRLB, capacity, water-filling and Monte-Carlo checks.

The received vector after analog combining, quantization and digital
combining is ``y = K x + n1`` with

    K   = W_D^H W_alpha W_A^H C
    G   = W_D^H W_alpha W_A^H
    n1  = G n + W_D^H n_q,   cov(n1) = Phi = sigma_n^2 G G^H + W_D^H D_q^2 W_D

where ``C`` is the effective channel seen by the streams (``U Sigma`` for
an ideal precoder). ``LinkModel`` holds these pieces for one bit vector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import ChannelDecomposition
from .errors import DimensionError, DomainError, NumericalSingularityError
from .hybrid import HybridFactorization
from .quantization import DEFAULT_TABLE, AqnmModel, QuantTable, build_aqnm

__all__ = [
    "COND_LIMIT",
    "LinkModel",
    "WaterfillAllocation",
    "ideal_link",
    "factored_link",
    "mse_matrix",
    "mse_delta",
    "crlb",
    "crlb_expanded",
    "crlb_diagonal",
    "capacity",
    "capacity_mutual_info",
    "capacity_inf",
    "capacity_linearized",
    "waterfill",
    "simulate_rx",
    "empirical_mse",
    "pseudo_covariance_check",
]

COND_LIMIT = 1e12


@dataclass
class LinkModel:
    """Linear observation model for one channel, combiner and bit vector.

    ``aqnm=None`` means infinite-resolution ADCs (``W_alpha = I``,
    ``D_q^2 = 0``).
    """

    channel_eff: np.ndarray
    w_a_h: np.ndarray
    w_d: np.ndarray
    aqnm: Optional[AqnmModel]
    sigma_n2: float
    p: float = 1.0
    sigma: Optional[np.ndarray] = None
    k_matrix: np.ndarray = field(init=False, repr=False)
    g_matrix: np.ndarray = field(init=False, repr=False)
    phi: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.sigma_n2 < 0:
            raise DomainError("noise power must be non-negative")
        if self.p <= 0:
            raise DomainError("symbol power must be positive")
        n_s = self.channel_eff.shape[1]
        if self.w_a_h.shape[1] != self.channel_eff.shape[0]:
            raise DimensionError("analog combiner and channel are not conformable")
        if self.w_d.shape != (self.w_a_h.shape[0], n_s):
            raise DimensionError(
                f"digital combiner must be {self.w_a_h.shape[0]}x{n_s}, got {self.w_d.shape}"
            )
        alpha = np.ones(self.w_a_h.shape[0]) if self.aqnm is None else self.aqnm.alpha
        if alpha.size != self.w_a_h.shape[0]:
            raise DimensionError("bit vector length differs from the number of RF paths")
        w_d_h = self.w_d.conj().T
        self.g_matrix = w_d_h @ (alpha[:, None] * self.w_a_h)
        self.k_matrix = self.g_matrix @ self.channel_eff
        self.phi = self.sigma_n2 * self.g_matrix @ self.g_matrix.conj().T + (
            (w_d_h * self.dq2) @ self.w_d
        )
        self.phi = 0.5 * (self.phi + self.phi.conj().T)

    @property
    def n_s(self) -> int:
        return self.channel_eff.shape[1]

    @property
    def dq2(self) -> np.ndarray:
        if self.aqnm is None:
            return np.zeros(self.w_a_h.shape[0])
        return self.aqnm.dq2


@dataclass(frozen=True)
class WaterfillAllocation:
    eps: np.ndarray
    water_level: float


def _ideal_digital(sigma: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    return np.diag(1.0 / (alpha * sigma))


def ideal_link(
    decomp: ChannelDecomposition,
    bits,
    sigma_n2: float,
    p: float = 1.0,
    loading=None,
    table: QuantTable = DEFAULT_TABLE,
) -> LinkModel:
    """Model with ``W_A^H = U^H`` and ``W_D`` chosen so that ``K = I``.

    ``bits=None`` gives the infinite-resolution receiver. ``loading``
    defaults to ``1 + sigma_i^2``.
    """
    sigma = decomp.sigma
    if np.any(sigma <= 0):
        raise NumericalSingularityError("ideal structure needs strictly positive singular values")
    if loading is None:
        loading = 1.0 + sigma**2
    aqnm = None if bits is None else build_aqnm(bits, loading, table)
    alpha = np.ones(sigma.size) if aqnm is None else aqnm.alpha
    return LinkModel(
        channel_eff=decomp.u * sigma,
        w_a_h=decomp.u.conj().T,
        w_d=_ideal_digital(sigma, alpha),
        aqnm=aqnm,
        sigma_n2=sigma_n2,
        p=p,
        sigma=sigma,
    )


def factored_link(
    decomp: ChannelDecomposition,
    combiner: HybridFactorization,
    bits,
    sigma_n2: float,
    p: float = 1.0,
    loading=None,
    table: QuantTable = DEFAULT_TABLE,
    channel_eff: Optional[np.ndarray] = None,
) -> LinkModel:
    """Model with the constant-modulus analog combiner from a factorisation.

    The digital combiner equalises ``W_alpha W_A^H C`` so that ``K = I``,
    i.e. it absorbs the analog factor's residual. ``channel_eff`` defaults
    to ``U Sigma`` (ideal precoder); pass ``H F_A F_D`` to include the
    hybrid precoder as well.
    """
    sigma = decomp.sigma
    if channel_eff is None:
        channel_eff = decomp.u * sigma
    w_a_h = combiner.analog.conj().T
    if loading is None:
        loading = 1.0 + sigma**2
    aqnm = None if bits is None else build_aqnm(bits, loading, table)
    alpha = np.ones(w_a_h.shape[0]) if aqnm is None else aqnm.alpha
    front = alpha[:, None] * (w_a_h @ channel_eff)
    if front.shape[0] != front.shape[1]:
        raise DimensionError("factored link needs as many RF paths as streams")
    if np.linalg.cond(front) > COND_LIMIT:
        raise NumericalSingularityError("analog front end is singular for these streams")
    w_d = np.linalg.inv(front).conj().T
    return LinkModel(channel_eff, w_a_h, w_d, aqnm, sigma_n2, p, sigma)


def _check_cond(a: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(a)) or np.linalg.cond(a) > COND_LIMIT:
        raise NumericalSingularityError(f"{what} is singular or ill-conditioned")
    return a


def _inv(a: np.ndarray, what: str) -> np.ndarray:
    return np.linalg.inv(_check_cond(a, what))


def mse_matrix(model: LinkModel) -> np.ndarray:
    """``p (K-I)(K-I)^H + Phi``, the error covariance of ``y`` about ``x``."""
    e = model.k_matrix - np.eye(model.n_s)
    return model.p * e @ e.conj().T + model.phi


def mse_delta(model: LinkModel) -> float:
    return float(np.trace(mse_matrix(model)).real)


def crlb(model: LinkModel) -> np.ndarray:
    """``(K^H Phi^-1 K)^-1``."""
    phi_inv_k = np.linalg.solve(_check_cond(model.phi, "noise covariance"), model.k_matrix)
    fisher = model.k_matrix.conj().T @ phi_inv_k
    out = _inv(fisher, "Fisher information")
    return 0.5 * (out + out.conj().T)


def crlb_expanded(model: LinkModel) -> np.ndarray:
    """``K^-1 Phi K^-H``, the CRLB written through an invertible ``K``."""
    k_inv = _inv(model.k_matrix, "K")
    return k_inv @ model.phi @ k_inv.conj().T


def crlb_diagonal(sigma, sigma_n2: float, g, loading) -> np.ndarray:
    """Closed-form CRLB diagonal ``(sigma_n^2 + g_i l_i) / sigma_i^2`` of the ideal structure."""
    sigma = np.asarray(sigma, dtype=float)
    return (sigma_n2 + np.asarray(g) * np.asarray(loading)) / sigma**2


def _logdet2(a: np.ndarray) -> float:
    sign, logabs = np.linalg.slogdet(a)
    if sign == 0:
        raise NumericalSingularityError("determinant is zero")
    return float(logabs / np.log(2.0))


def capacity(model: LinkModel) -> float:
    """``N_s log2 p + log2 det(CRLB^-1 + I/p)`` in bits per channel use."""
    fisher = _inv(crlb(model), "CRLB")
    return model.n_s * math.log2(model.p) + _logdet2(fisher + np.eye(model.n_s) / model.p)


def capacity_mutual_info(model: LinkModel) -> float:
    """``log2 det(p K K^H Phi^-1 + I)``, the Gaussian-input mutual information."""
    phi_inv = _inv(model.phi, "noise covariance")
    k = model.k_matrix
    return _logdet2(model.p * k @ k.conj().T @ phi_inv + np.eye(model.n_s))


def capacity_inf(sigma, rho: float, n_s: Optional[int] = None, eps=None) -> float:
    """Unquantized capacity ``sum log2(eps_i (rho/N_s) sigma_i^2 + 1)``.

    ``eps`` may be a ``WaterfillAllocation`` or an array; uniform
    allocation when omitted.
    """
    if rho < 0:
        raise DomainError("SNR must be non-negative")
    sigma = np.asarray(sigma, dtype=float)
    n_s = sigma.size if n_s is None else n_s
    if eps is None:
        eps = np.ones(sigma.size)
    elif isinstance(eps, WaterfillAllocation):
        eps = eps.eps
    return float(np.sum(np.log2(np.asarray(eps) * (rho / n_s) * sigma**2 + 1.0)))


def capacity_linearized(q) -> np.ndarray:
    """First-order approximation ``q / ln 2`` of ``log2(1 + q)``."""
    return np.asarray(q, dtype=float) / np.log(2.0)


def waterfill(sigma, rho: float, n_s: Optional[int] = None) -> WaterfillAllocation:
    """Water-filling over per-stream gains ``(rho/N_s) sigma_i^2`` with ``sum eps = N_s``.

    Maximises ``sum log2(1 + eps_i a_i)``; the solution is
    ``eps_i = max(0, mu - 1/a_i)``.
    """
    sigma = np.asarray(sigma, dtype=float)
    n_s = sigma.size if n_s is None else n_s
    if not np.any(sigma > 0):
        raise DomainError("water-filling needs at least one non-zero singular value")
    if rho <= 0:
        return WaterfillAllocation(np.full(sigma.size, n_s / sigma.size), math.inf)
    gains = (rho / n_s) * sigma**2
    order = np.argsort(-gains)
    inv = np.full(sigma.size, np.inf)
    pos = gains > 0
    inv[pos] = 1.0 / gains[pos]
    inv_sorted = inv[order]
    total = float(n_s)
    mu = math.inf
    for k in range(sigma.size, 0, -1):
        active = inv_sorted[:k]
        if not np.all(np.isfinite(active)):
            continue
        mu = (total + active.sum()) / k
        if mu > active[-1]:
            break
    eps = np.maximum(0.0, mu - inv)
    eps *= total / eps.sum()
    return WaterfillAllocation(eps, float(mu))


def _cn(rng: np.random.Generator, shape, var=1.0) -> np.ndarray:
    return np.sqrt(var / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def simulate_rx(x, model: LinkModel, rng: np.random.Generator) -> np.ndarray:
    """One draw of ``y = K x + G n + W_D^H D_q w`` per column of ``x``.

    ``n ~ CN(0, sigma_n^2 I)`` at the antennas and ``w ~ CN(0, I)`` at the
    ADC outputs. ``x`` may be a vector or an ``N_s x T`` batch.
    """
    x = np.asarray(x, dtype=complex)
    batch = x.reshape(model.n_s, -1)
    t = batch.shape[1]
    n = _cn(rng, (model.w_a_h.shape[1], t), model.sigma_n2)
    w = _cn(rng, (model.w_a_h.shape[0], t))
    nq = np.sqrt(model.dq2)[:, None] * w
    y = model.k_matrix @ batch + model.g_matrix @ n + model.w_d.conj().T @ nq
    return y.reshape(x.shape)


def empirical_mse(
    model: LinkModel, trials: int, rng: np.random.Generator, batch: int = 10_000
) -> float:
    """Monte-Carlo estimate of ``E||y - x||^2`` with ``x ~ CN(0, p I)``."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    partial = []
    done = 0
    while done < trials:
        t = min(batch, trials - done)
        x = _cn(rng, (model.n_s, t), model.p)
        y = simulate_rx(x, model, rng)
        partial.extend(np.sum(np.abs(y - x) ** 2, axis=0).tolist())
        done += t
    return math.fsum(partial) / trials


def pseudo_covariance_check(
    model: LinkModel, trials: int, rng: np.random.Generator, circular: bool = True
) -> float:
    """Max-abs entry of the sample pseudo-covariance ``E[n1 n1^T]``.

    With ``circular=False`` the antenna and quantization noises are drawn
    real-valued (same variance), a non-circular control whose
    pseudo-covariance does not vanish.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    shape_n = (model.w_a_h.shape[1], trials)
    shape_w = (model.w_a_h.shape[0], trials)
    if circular:
        n = _cn(rng, shape_n, model.sigma_n2)
        w = _cn(rng, shape_w)
    else:
        n = np.sqrt(model.sigma_n2) * rng.standard_normal(shape_n)
        w = rng.standard_normal(shape_w)
    n1 = model.g_matrix @ n + model.w_d.conj().T @ (np.sqrt(model.dq2)[:, None] * w)
    pseudo = n1 @ n1.T / trials
    return float(np.max(np.abs(pseudo)))
