"""ADC bit allocation under a total power budget.

Three selectors over the set of power-feasible bit vectors:

* ``crlb_ba`` maximises ``K_f(b) = sum_i sigma_i^2 / (sigma_n^2 + g(b_i) l_i)``,
* ``es_ba`` scans the same set with a full link model and the true
  MSE or capacity,
* ``mmqse_ba`` is the row-norm log-ratio heuristic with a bisection on a
  common bit offset.

Ties are broken towards the lexicographically smallest vector.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Tuple

import numpy as np

from .errors import DimensionError, DomainError, InfeasibleBudgetError
from .metrics import LinkModel, capacity, mse_delta
from .quantization import DEFAULT_TABLE, PowerModel, QuantTable, adc_power, g_values

__all__ = [
    "MATERIALIZE_LIMIT",
    "BSet",
    "BaResult",
    "enumerate_bset",
    "kf_score",
    "kf_scores",
    "crlb_ba",
    "es_ba",
    "mmqse_ba",
    "fixed_ba",
    "format_bits",
]

MATERIALIZE_LIMIT = 2**24
_CHUNK = 2**16


def format_bits(bits, sep: str = ",") -> str:
    return sep.join(str(int(b)) for b in bits)


def _digits(start: int, stop: int, n_s: int, n_b: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    powers = n_b ** np.arange(n_s - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers) % n_b + 1


@dataclass
class BSet:
    """Power-feasible bit vectors in lexicographic order.

    Small sets are held as an ``(M, n_s)`` integer array; when the raw
    search space exceeds ``MATERIALIZE_LIMIT`` the members are generated
    chunk by chunk on demand.
    """

    n_s: int
    n_b: int
    budget: PowerModel
    _vectors: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def space_size(self) -> int:
        return self.n_b**self.n_s

    @property
    def materialized(self) -> bool:
        return self._vectors is not None

    def chunks(self, size: int = _CHUNK) -> Iterator[np.ndarray]:
        if self._vectors is not None:
            for i in range(0, len(self._vectors), size):
                yield self._vectors[i : i + size]
            return
        pm = self.budget
        for start in range(0, self.space_size, size):
            cand = _digits(start, min(start + size, self.space_size), self.n_s, self.n_b)
            cost = pm.c_per_step * pm.f_s * np.sum(2.0**cand, axis=1)
            sel = cand[cost <= pm.p_adc]
            if len(sel):
                yield sel

    @property
    def vectors(self) -> np.ndarray:
        if self._vectors is None:
            return np.concatenate(list(self.chunks()), axis=0)
        return self._vectors

    def __len__(self) -> int:
        if self._vectors is not None:
            return len(self._vectors)
        return sum(len(c) for c in self.chunks())

    def __iter__(self):
        for chunk in self.chunks():
            yield from chunk


@dataclass
class BaResult:
    chosen: np.ndarray
    score: float
    evaluations: int
    scheme: str

    @property
    def label(self) -> str:
        return format_bits(self.chosen)


def enumerate_bset(n_s: int, n_b: int, pm: PowerModel, materialize: Optional[bool] = None) -> BSet:
    """All ``b`` in ``{1..n_b}^n_s`` with ``sum c f_s 2^b_i <= p_adc``.

    Raises ``InfeasibleBudgetError`` when even the all-one-bit vector does
    not fit.
    """
    if n_s < 1 or n_b < 1:
        raise DomainError("n_s and n_b must be >= 1")
    if adc_power(np.ones(n_s), pm) > pm.p_adc:
        raise InfeasibleBudgetError(
            f"budget {pm.p_adc} is below the one-bit minimum {adc_power(np.ones(n_s), pm)}"
        )
    bset = BSet(n_s, n_b, pm)
    if materialize is None:
        materialize = bset.space_size <= MATERIALIZE_LIMIT
    if materialize:
        bset._vectors = np.concatenate(list(bset.chunks()), axis=0)
    return bset


def kf_scores(bits: np.ndarray, sigma, sigma_n2: float, loading, table: QuantTable = DEFAULT_TABLE,
              p: Optional[float] = None) -> np.ndarray:
    """Row-wise ``K_f`` for an ``(M, n_s)`` array of bit vectors."""
    if sigma_n2 < 0:
        raise DomainError("noise power must be non-negative")
    bits = np.atleast_2d(bits)
    sigma = np.asarray(sigma, dtype=float)
    loading = np.asarray(loading, dtype=float)
    if bits.shape[1] != sigma.size or loading.size != sigma.size:
        raise DimensionError("bit vectors, singular values and loading must have equal length")
    num = sigma**2 if p is None else p * sigma**2
    return np.sum(num / (sigma_n2 + g_values(bits, table) * loading), axis=1)


def kf_score(bits, sigma, sigma_n2: float, loading, table: QuantTable = DEFAULT_TABLE,
             include_p: Optional[float] = None) -> float:
    return float(kf_scores(np.asarray(bits)[None, :], sigma, sigma_n2, loading, table, include_p)[0])


def _workers(workers: Optional[int]) -> int:
    if workers is None:
        env = os.environ.get("MIMO_BA_THREADS")
        workers = int(env) if env else 1
    return max(1, workers)


def _search(bset: BSet, score_chunk: Callable[[np.ndarray], np.ndarray], maximize: bool,
            workers: Optional[int]) -> Tuple[np.ndarray, float, int]:
    """Best member of ``bset`` under ``score_chunk``; first index wins ties."""

    def best_of(chunk):
        s = np.asarray(score_chunk(chunk), dtype=float)
        i = int(np.argmax(s) if maximize else np.argmin(s))
        return chunk[i].copy(), float(s[i]), len(chunk)

    chunks = list(bset.chunks())
    n = _workers(workers)
    if n == 1 or len(chunks) == 1:
        results = [best_of(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(best_of, chunks))
    best_bits, best_score, total = results[0][0], results[0][1], 0
    for bits, score, count in results:
        total += count
        better = score > best_score if maximize else score < best_score
        if better:
            best_bits, best_score = bits, score
    return best_bits, best_score, total


def crlb_ba(sigma, loading, sigma_n2: float, bset: BSet, table: QuantTable = DEFAULT_TABLE,
            p: Optional[float] = None, workers: Optional[int] = None) -> BaResult:
    """Bit vector in ``bset`` maximising ``K_f``.

    Parameters
    ----------
    sigma : array_like
        Singular values of the streams, strongest first.
    loading : array_like
        Per-path loading ``l_i``.
    sigma_n2 : float
        Noise power.
    bset : BSet
        Candidate vectors.
    p : float, optional
        Symbol power; scales every score and never moves the argmax.
    workers : int, optional
        Thread count for scoring; defaults to ``$MIMO_BA_THREADS`` or 1.
        The result does not depend on it.
    """
    sigma = getattr(sigma, "sigma", sigma)
    bits, score, count = _search(
        bset, lambda c: kf_scores(c, sigma, sigma_n2, loading, table, p), True, workers
    )
    return BaResult(bits, score, count, "crlb")


def es_ba(metric: str, model_for: Callable[[np.ndarray], LinkModel], bset: BSet,
          workers: Optional[int] = None) -> BaResult:
    """Exhaustive search with a full link model per candidate.

    ``metric`` is ``"mse_delta"`` (minimised) or ``"capacity"``
    (maximised); ``model_for(bits)`` builds the link for one vector.
    """
    if metric == "mse_delta":
        fn, maximize = mse_delta, False
    elif metric == "capacity":
        fn, maximize = capacity, True
    else:
        raise DomainError(f"unknown metric {metric!r}")
    bits, score, count = _search(
        bset, lambda c: [fn(model_for(b)) for b in c], maximize, workers
    )
    return BaResult(bits, score, count, "es_mse" if metric == "mse_delta" else "es_capacity")


def _round_half_up(x: np.ndarray) -> np.ndarray:
    return np.floor(x + 0.5)


def mmqse_ba(h_eff, n_b: int, pm: PowerModel, resolution: float = 1e-6) -> BaResult:
    """Row-norm heuristic allocation.

    ``b_i = clip(round(t + log2(||r_i||^(2/3) / sum_j ||r_j||^(2/3))), 1, n_b)``
    where ``r_i`` are the rows of ``h_eff`` and the offset ``t`` is the
    largest value in ``[-n_b, 2 n_b]`` (to ``resolution``) whose vector
    fits the budget.
    """
    h_eff = np.atleast_2d(np.asarray(h_eff))
    norms = np.linalg.norm(h_eff, axis=1)
    if np.any(norms == 0):
        raise DomainError("every row of the effective channel must be non-zero")
    w = norms ** (2.0 / 3.0)
    terms = np.log2(w / w.sum())

    def alloc(offset):
        return np.clip(_round_half_up(offset + terms), 1, n_b).astype(int)

    def fits(offset):
        return adc_power(alloc(offset), pm) <= pm.p_adc

    lo, hi = -float(n_b), 2.0 * n_b
    if not fits(lo):
        raise InfeasibleBudgetError(
            f"budget {pm.p_adc} is below the one-bit minimum {adc_power(np.ones(len(terms)), pm)}"
        )
    steps = 0
    if fits(hi):
        lo = hi
    else:
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            if fits(mid):
                lo = mid
            else:
                hi = mid
            steps += 1
    return BaResult(alloc(lo), lo, max(steps, 1), "mmqse")


def fixed_ba(n_s: int, bits: int, pm: Optional[PowerModel] = None) -> BaResult:
    """Uniform ``bits`` on every path; raises if ``pm`` is given and exceeded."""
    chosen = np.full(n_s, int(bits))
    if pm is not None and adc_power(chosen, pm) > pm.p_adc:
        raise InfeasibleBudgetError(f"{bits}-bit on all {n_s} paths exceeds the budget")
    return BaResult(chosen, math.nan, 1, "fixed")
