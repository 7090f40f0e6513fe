"""Additive quantization noise model for variable-resolution ADCs.

A ``b``-bit ADC on RF path ``i`` is linearised as a gain ``1 - f(b)`` plus
uncorrelated noise whose variance is ``f(b) (1 - f(b)) l_i``, where ``l_i``
is the input loading of that path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .errors import DimensionError, DomainError, UnsupportedResolutionError

__all__ = [
    "TABLE_F",
    "QuantTable",
    "DEFAULT_TABLE",
    "AqnmModel",
    "PowerModel",
    "f_of_b",
    "g_of_b",
    "f_values",
    "g_values",
    "loading_terms",
    "loading_terms_raw",
    "build_aqnm",
    "adc_power",
]

# Distortion ratio of the MMSE non-uniform quantizer, b = 1..5.
TABLE_F = {1: 0.3634, 2: 0.1175, 3: 0.03454, 4: 0.009497, 5: 0.002499}


@dataclass(frozen=True)
class QuantTable:
    """Lookup of the quantizer distortion ratio ``f(b)``.

    ``mode="approximation"`` replaces the table by ``g(b) ~ c 2^(-d b)``,
    which is defined for any ``b >= 1``.
    """

    f_values: Mapping[int, float] = field(default_factory=lambda: dict(TABLE_F))
    approx_c: float = 2.40667
    approx_d: float = 2.0765
    mode: str = "table"

    def __post_init__(self):
        if self.mode not in ("table", "approximation"):
            raise DomainError(f"unknown quantizer mode {self.mode!r}")
        keys = sorted(self.f_values)
        vals = [self.f_values[k] for k in keys]
        if any(not 0 < v < 1 for v in vals):
            raise DomainError("f(b) values must lie in (0, 1)")
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise DomainError("f(b) must be strictly decreasing in b")

    @property
    def max_bits(self) -> Optional[int]:
        return max(self.f_values) if self.mode == "table" else None

    @classmethod
    def from_mapping(cls, mapping: Mapping, **kwargs) -> "QuantTable":
        return cls(f_values={int(k): float(v) for k, v in mapping.items()}, **kwargs)


DEFAULT_TABLE = QuantTable()


@dataclass(frozen=True)
class PowerModel:
    c_per_step: float = 1.0
    f_s: float = 1.0
    p_adc: float = np.inf

    def __post_init__(self):
        if not (self.c_per_step > 0 and self.f_s > 0 and self.p_adc > 0):
            raise DomainError("power model parameters must be positive")

    def cost(self, bits) -> float:
        return adc_power(bits, self)


@dataclass(frozen=True)
class AqnmModel:
    """Per-path AQNM quantities stored as vectors.

    The diagonal matrices ``W_alpha``, ``W_(1-alpha)`` and ``D_q^2`` are
    available through the ``*_matrix`` properties.
    """

    bits: np.ndarray
    f: np.ndarray
    loading: np.ndarray

    @property
    def alpha(self) -> np.ndarray:
        return 1.0 - self.f

    @property
    def dq2(self) -> np.ndarray:
        return self.alpha * self.f * self.loading

    @property
    def g(self) -> np.ndarray:
        return self.f / self.alpha

    @property
    def w_alpha(self) -> np.ndarray:
        return np.diag(self.alpha)

    @property
    def w_one_minus_alpha(self) -> np.ndarray:
        return np.diag(self.f)

    @property
    def dq_squared(self) -> np.ndarray:
        return np.diag(self.dq2)

    def quant_term(self) -> np.ndarray:
        """Diagonal of ``W_alpha^-2 D_q^2``, i.e. ``g(b_i) l_i``."""
        return self.dq2 / self.alpha**2


def _check_bits(b, table: QuantTable) -> None:
    if b < 1:
        raise UnsupportedResolutionError(f"b={b}: resolution must be at least 1 bit")
    if table.mode == "table" and b not in table.f_values:
        raise UnsupportedResolutionError(
            f"b={b} is outside the quantizer table (1..{table.max_bits})"
        )


def f_of_b(b: int, table: QuantTable = DEFAULT_TABLE) -> float:
    _check_bits(b, table)
    if table.mode == "table":
        return float(table.f_values[b])
    g = table.approx_c * 2.0 ** (-table.approx_d * b)
    return g / (1.0 + g)


def g_of_b(b: int, table: QuantTable = DEFAULT_TABLE) -> float:
    f = f_of_b(b, table)
    return f / (1.0 - f)


def f_values(bits, table: QuantTable = DEFAULT_TABLE) -> np.ndarray:
    """Vectorised ``f_of_b`` over an integer array of any shape."""
    bits = np.asarray(bits)
    if bits.size == 0:
        return np.zeros(bits.shape)
    lo, hi = int(bits.min()), int(bits.max())
    _check_bits(lo, table)
    _check_bits(hi, table)
    lut = np.zeros(hi + 1)
    for b in range(lo, hi + 1):
        lut[b] = f_of_b(b, table)
    return lut[bits]


def g_values(bits, table: QuantTable = DEFAULT_TABLE) -> np.ndarray:
    f = f_values(bits, table)
    return f / (1.0 - f)


def loading_terms(w_d: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """``l_i = 1 + [W_D^H diag(sigma^2) W_D]_ii`` for a digital combiner ``W_D``."""
    w_d = np.atleast_2d(np.asarray(w_d))
    sigma = np.asarray(sigma, dtype=float)
    if w_d.shape[0] != sigma.size:
        raise DimensionError(
            f"W_D has {w_d.shape[0]} rows but {sigma.size} singular values were given"
        )
    return 1.0 + np.einsum("ki,k,ki->i", w_d.conj(), sigma**2, w_d).real


def loading_terms_raw(w_a_h: np.ndarray, h: np.ndarray) -> np.ndarray:
    """``l_i = 1 + [W_A^H H (W_A^H H)^H]_ii``, the loading seen by the ADC inputs."""
    a = np.asarray(w_a_h) @ np.asarray(h)
    return 1.0 + np.sum(np.abs(a) ** 2, axis=1)


def build_aqnm(bits, loading, table: QuantTable = DEFAULT_TABLE) -> AqnmModel:
    bits = np.asarray(bits, dtype=int).ravel()
    loading = np.asarray(loading, dtype=float).ravel()
    if bits.shape != loading.shape:
        raise DimensionError(f"{bits.size} bits but {loading.size} loading terms")
    return AqnmModel(bits=bits, f=f_values(bits, table), loading=loading)


def adc_power(bits, pm: PowerModel) -> float:
    """Total ADC power ``sum_i c f_s 2^b_i`` in watts."""
    bits = np.asarray(bits, dtype=float)
    return float(pm.c_per_step * pm.f_s * np.sum(2.0**bits))
