"""Complete elliptic integrals, the nome, Jacobi sn and the Hill potential data.

Everything here is computed from the arithmetic-geometric mean of ``1`` and the
complementary modulus, so K, E, the nome and sn share one scale sequence.
"""

from __future__ import annotations

import math

import numpy as np

_AGM_MAXITER = 30
_LANDEN_LEVELS = 16


class DomainError(ValueError):
    """Raised when an elliptic modulus lies outside ``[0, 1)``."""


def _check_modulus(ell: float) -> float:
    ell = float(ell)
    if not (0.0 <= ell < 1.0) or math.isnan(ell):
        raise DomainError(f"elliptic modulus must satisfy 0 <= ell < 1, got {ell!r}")
    return ell


def complementary(ell: float) -> float:
    """``sqrt(1 - ell**2)`` without cancellation near ``ell = 1``."""
    return math.sqrt((1.0 - ell) * (1.0 + ell))


def _agm_sequence(b0: float, c0: float) -> tuple[list[float], list[float]]:
    """AGM of (1, b0) returning the a_n and c_n sequences (c_0 = c0)."""
    a, b = 1.0, b0
    a_seq, c_seq = [a], [c0]
    for _ in range(_AGM_MAXITER):
        if abs(a - b) < 1e-16 * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    return a_seq, c_seq


def _agm(b0: float) -> float:
    return _agm_sequence(b0, 0.0)[0][-1]


def elliptic_K(ell: float) -> float:
    """Complete elliptic integral of the first kind, K(ell) (modulus convention)."""
    ell = _check_modulus(ell)
    if ell == 0.0:
        return math.pi / 2
    return math.pi / (2.0 * _agm(complementary(ell)))


def one_minus_E_over_K(ell: float) -> float:
    """``1 - E(ell)/K(ell)`` summed directly from the AGM, free of cancellation."""
    ell = _check_modulus(ell)
    if ell == 0.0:
        return 0.0
    _, c_seq = _agm_sequence(complementary(ell), ell)
    return sum(2.0 ** (n - 1) * c * c for n, c in enumerate(c_seq))


def elliptic_E(ell: float) -> float:
    """Complete elliptic integral of the second kind, E(ell)."""
    ell = _check_modulus(ell)
    if ell == 0.0:
        return math.pi / 2
    return elliptic_K(ell) * (1.0 - one_minus_E_over_K(ell))


def nome(ell: float) -> float:
    """Jacobi nome ``exp(-pi K(ell') / K(ell))``."""
    ell = _check_modulus(ell)
    if ell == 0.0:
        return 0.0
    # K(ell')/K(ell) = agm(1, ell') / agm(1, ell); avoids forming ell' twice.
    ratio = _agm(complementary(ell)) / _agm(ell)
    return math.exp(-math.pi * ratio)


def hill_b(ell: float, j: int) -> float:
    """Fourier coefficient of ``6 ell^2 sn^2(x) - 4 - ell^2`` on ``exp(+-i pi j x / K)``."""
    ell = _check_modulus(ell)
    j = int(j)
    if j < 0:
        raise ValueError(f"j must be non-negative, got {j}")
    if j == 0:
        return 6.0 * one_minus_E_over_K(ell) - 4.0 - ell * ell
    q = nome(ell)
    if q == 0.0:
        return 0.0
    K = elliptic_K(ell)
    return -(6.0 * math.pi**2 / K**2) * j * q**j / -math.expm1(2 * j * math.log(q))


def hill_b_array(ell: float, jmax: int) -> np.ndarray:
    """``[hill_b(ell, 0), ..., hill_b(ell, jmax)]``."""
    return np.array([hill_b(ell, j) for j in range(jmax + 1)])


def jacobi_sn(x, ell: float):
    """Jacobi elliptic function sn(x, ell) by descending Landen transformation.

    Accepts a scalar or an array for ``x``.
    """
    ell = _check_modulus(ell)
    x_arr = np.asarray(x, dtype=float)
    if ell == 0.0:
        out = np.sin(x_arr)
        return float(out) if out.ndim == 0 else out
    a_seq = [1.0]
    c_seq = [ell]
    a, b = 1.0, complementary(ell)
    for _ in range(_LANDEN_LEVELS):
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
        if c < 1e-17 * a:
            break
    n = len(a_seq) - 1
    phi = (2.0**n) * a_seq[n] * x_arr
    for k in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c_seq[k] / a_seq[k] * np.sin(phi)))
    out = np.sin(phi)
    return float(out) if out.ndim == 0 else out


def hill_diagonal(ell: float, mu: float, M: int, n):
    """Diagonal entry ``(mu + pi n / (M K))^2 + b_0`` of the Hill matrix."""
    K = elliptic_K(ell)
    n = np.asarray(n, dtype=float)
    out = (mu + math.pi * n / (M * K)) ** 2 + hill_b(ell, 0)
    return float(out) if out.ndim == 0 else out


def hill_band_edges(ell: float) -> tuple[float, float, float]:
    """Closed-form band edges (sigma_a, sigma_b, sigma_c) of the Hill operator.

    The full spectrum is ``[sigma_a, -3] U [sigma_b, 0] U [sigma_c, inf)``.
    """
    ell = _check_modulus(ell)
    l2 = ell * ell
    root = math.sqrt(1.0 - l2 + l2 * l2)
    # sigma_c rewritten without the cancellation near ell = 0
    return l2 - 2.0 - 2.0 * root, -3.0 * (1.0 - l2), 3.0 * l2 * l2 / (2.0 * root + 2.0 - l2)
