"""Constant-modulus analog x digital factorisation of beamforming matrices.

Used for both sides of the link: the precoder ``F_opt ~ F_A F_D`` and the
combiner ``U ~ W_A W_D^H``. The analog factor has every entry of magnitude
``1/sqrt(rows)`` (phase shifters), the digital factor is unconstrained.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List

import numpy as np

from .errors import DimensionError, PreconditionError

__all__ = ["HybridFactorization", "factor", "factor_combiner"]


@dataclass
class HybridFactorization:
    analog: np.ndarray
    digital: np.ndarray
    residual: float
    iterations: int
    history: List[float] = field(default_factory=list)

    @property
    def product(self) -> np.ndarray:
        return self.analog @ self.digital


def _phase_project(x: np.ndarray, modulus: float) -> np.ndarray:
    # arg(0) is taken as 0
    return modulus * np.exp(1j * np.angle(x))


def _initial_analog(target: np.ndarray, n_rf: int) -> np.ndarray:
    rows, cols = target.shape
    modulus = 1.0 / np.sqrt(rows)
    dft = np.exp(-2j * np.pi * np.outer(np.arange(rows), np.arange(n_rf)) / rows) * modulus
    init = dft.copy()
    init[:, :cols] = _phase_project(target, modulus)
    # Phases of a sparse target (e.g. identity) can give a rank-deficient start.
    if np.linalg.matrix_rank(init, tol=1e-8) < min(rows, n_rf):
        return dft
    return init


def factor(target, n_rf: int, max_iters: int = 200, tol: float = 1e-9) -> HybridFactorization:
    """Factor ``target ~ analog @ digital`` with constant-modulus ``analog``.

    Alternates a least-squares update of the digital factor with a phase
    projection of the analog factor. The analog step projects
    ``A + (T - A D) D^H / L`` (``L`` the largest eigenvalue of ``D D^H``),
    a majorise-minimise step that cannot increase the residual and reduces
    to the phase of ``T D^H`` whenever ``D D^H`` is a multiple of identity.

    Parameters
    ----------
    target : array_like
        ``rows x N_s`` matrix with orthonormal columns.
    n_rf : int
        Number of RF chains, the inner dimension of the product.
    max_iters, tol
        Stop after ``max_iters`` sweeps or once the residual improves by
        less than ``tol``.

    Returns
    -------
    HybridFactorization
        ``digital`` is finally rescaled so ``||analog @ digital||_F^2 = N_s``;
        ``residual`` is measured after that rescaling, ``history`` holds the
        per-sweep residuals before it.
    """
    target = np.asarray(target, dtype=complex)
    if target.ndim != 2:
        raise DimensionError("target must be a 2-D matrix")
    rows, n_s = target.shape
    if n_rf < n_s:
        raise DimensionError(f"n_rf={n_rf} is smaller than the {n_s} target columns")
    if n_rf > rows:
        raise DimensionError(f"n_rf={n_rf} exceeds the {rows} analog rows")
    gram_err = np.linalg.norm(target.conj().T @ target - np.eye(n_s))
    if gram_err > 1e-8:
        raise PreconditionError(f"target columns are not orthonormal (error {gram_err:.2e})")

    modulus = 1.0 / np.sqrt(rows)
    analog = _initial_analog(target, n_rf)
    digital = np.linalg.lstsq(analog, target, rcond=None)[0]
    history = [float(np.linalg.norm(target - analog @ digital))]
    iterations = 0
    for iterations in range(1, max_iters + 1):
        lip = np.linalg.norm(digital, 2) ** 2
        if lip == 0:
            break
        step = analog + (target - analog @ digital) @ digital.conj().T / lip
        new_analog = _phase_project(step, modulus)
        new_digital = np.linalg.lstsq(new_analog, target, rcond=None)[0]
        res = float(np.linalg.norm(target - new_analog @ new_digital))
        if res > history[-1]:
            # round-off at the plateau; keep the previous iterate
            break
        analog, digital = new_analog, new_digital
        history.append(res)
        if history[-2] - history[-1] < tol:
            break

    power = np.linalg.norm(analog @ digital) ** 2
    if power > 0:
        digital = digital * np.sqrt(n_s / power)
    residual = float(np.linalg.norm(target - analog @ digital))
    return HybridFactorization(analog, digital, residual, iterations, history)


def factor_combiner(u, n_rf: int, **kwargs) -> HybridFactorization:
    """Combiner form ``U ~ W_A W_D^H``; the returned ``digital`` is ``W_D``.

    ``W_D`` is the conjugate transpose of the right factor, so that
    ``analog @ digital.conj().T`` approximates ``u``.
    """
    fac = factor(u, n_rf, **kwargs)
    return HybridFactorization(
        fac.analog, fac.digital.conj().T, fac.residual, fac.iterations, fac.history
    )
