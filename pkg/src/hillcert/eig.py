"""Dense Hermitian eigensolves with recorded residuals, and a power-iteration 2-norm."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hillcert.operator import HermitianMatrix, hermiticity_defect

HERMITIAN_RTOL = 1e-10


class NotHermitianError(ArithmeticError):
    """The matrix handed to the Hermitian solver is not Hermitian."""


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


def _as_array(matrix) -> np.ndarray:
    if isinstance(matrix, HermitianMatrix):
        return matrix.entries
    return np.asarray(matrix, dtype=complex)


def eigh(matrix) -> list[EigenPair]:
    """Full eigendecomposition, ascending by eigenvalue.

    Raises NotHermitianError when the Hermiticity defect exceeds
    ``1e-10 * max|A|``.
    """
    a = _as_array(matrix)
    scale = float(np.max(np.abs(a), initial=0.0))
    defect = hermiticity_defect(a)
    if defect > HERMITIAN_RTOL * max(scale, np.finfo(float).tiny):
        raise NotHermitianError(f"Hermiticity defect {defect:.3e} exceeds tolerance (scale {scale:.3e})")
    # Symmetrise away the tolerated defect so LAPACK sees an exactly Hermitian input.
    sym = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(sym)
    order = np.argsort(w, kind="stable")
    w, v = w[order], v[:, order]
    res = np.linalg.norm(a @ v - v * w[None, :], axis=0)
    return [EigenPair(float(w[i]), v[:, i].copy(), float(res[i])) for i in range(w.size)]


def eigvalsh(matrix) -> np.ndarray:
    """Ascending eigenvalues only."""
    return np.array([p.value for p in eigh(matrix)])


def spectral_norm(matrix, rtol: float = 1e-8, maxiter: int = 100_000, seed: int = 0) -> float:
    """Largest singular value by power iteration on ``A* A``.

    Stops once the eigen-residual ``|A*A x - rho x|`` of the Rayleigh quotient
    ``rho = |A x|^2`` falls below ``rtol * rho``; a change-based test stalls
    early when the top singular values are close.
    """
    a = _as_array(matrix)
    if a.size == 0 or not np.any(a):
        return 0.0
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(maxiter):
        ax = a @ x
        sigma = float(np.linalg.norm(ax))
        y = a.conj().T @ ax
        rho = sigma * sigma
        if rho == 0.0:
            return 0.0
        if np.linalg.norm(y - rho * x) <= rtol * rho:
            return sigma
        x = y / np.linalg.norm(y)
    return sigma
