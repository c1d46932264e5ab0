"""Periodic differential operators, their Floquet-Bloch transform and Galerkin truncation.

An operator of order ``p`` is ``leading * d^p/dx^p + sum_{j<p} g_j(x) d^j/dx^j``
with period-``L`` coefficients ``g_j``.  Conjugating by ``exp(i mu x)`` replaces
``d/dx`` with ``d/dx + i mu``; expanding the powers gives the coefficients of the
Bloch operator.  Truncation keeps Fourier modes ``-N..N``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hillcert import fourier
from hillcert.fourier import PeriodicCoefficient


@dataclass(frozen=True)
class OperatorSpec:
    """``leading * d^p + sum_j coeffs[j] * d^j`` for ``j = 0..p-1``."""

    order: int
    leading: float
    coeffs: tuple

    def __post_init__(self):
        if self.order < 1:
            raise ValueError(f"order must be a positive integer, got {self.order}")
        if self.leading not in (1.0, -1.0):
            raise ValueError(f"leading coefficient must be +1 or -1, got {self.leading}")
        coeffs = tuple(self.coeffs)
        if len(coeffs) != self.order:
            raise ValueError(f"need {self.order} coefficients, got {len(coeffs)}")
        L = coeffs[0].period
        if any(not math.isclose(c.period, L, rel_tol=1e-14) for c in coeffs):
            raise ValueError("all coefficients must share one period")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def period(self) -> float:
        return self.coeffs[0].period


@dataclass(frozen=True)
class BlochOperator:
    """``S^mu = exp(-i mu x) S exp(i mu x)``; ``coeffs[j]`` multiplies ``d^j``."""

    order: int
    leading: float
    mu: float
    coeffs: tuple

    @property
    def period(self) -> float:
        return self.coeffs[0].period

    def coefficient(self, j: int) -> PeriodicCoefficient:
        """f_j for ``j = 0..p``; f_p is the constant leading term."""
        if j == self.order:
            return fourier.constant(self.leading, self.period)
        return self.coeffs[j]


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Dense truncation indexed by Fourier modes ``-N..N`` (row ``n + N``)."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2 == 0:
            raise ValueError("expected a square matrix of odd dimension 2N+1")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return (self.dim - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.entries), initial=0.0))

    def submatrix(self, N: int) -> "HermitianMatrix":
        """Principal block for modes ``-N..N``."""
        s = slice(self.N - N, self.N + N + 1)
        return HermitianMatrix(self.entries[s, s])


def bloch_transform(spec: OperatorSpec, mu: float) -> BlochOperator:
    """Coefficients of ``exp(-i mu x) S exp(i mu x)``.

    ``f_j = sum_{k>=j} binom(k, j) (i mu)^(k-j) c_k`` with ``c_p = leading``.
    """
    L = spec.period
    if not (0.0 <= mu < 2 * math.pi / L):
        raise ValueError(f"mu must lie in [0, 2 pi / L) = [0, {2 * math.pi / L}), got {mu}")
    p = spec.order
    full = list(spec.coeffs) + [fourier.constant(spec.leading, L)]
    out = []
    for j in range(p):
        if mu == 0.0:
            out.append(spec.coeffs[j])
            continue
        terms = [(math.comb(k, j) * (1j * mu) ** (k - j), full[k]) for k in range(j, p + 1)]
        out.append(fourier.linear_combination(terms))
    return BlochOperator(p, spec.leading, float(mu), tuple(out))


def _block(bloch: BlochOperator, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Entries ``(1/sqrt L) sum_j (f_j)_{n-n'} (-2 i pi n'/L)^j`` for n in rows, n' in cols."""
    L = bloch.period
    diff = np.subtract.outer(rows, cols)
    lo, hi = int(diff.min()), int(diff.max())
    symbol = -2j * np.pi * cols / L
    out = np.zeros(diff.shape, dtype=complex)
    for j in range(bloch.order + 1):
        c = bloch.coefficient(j)
        window = c.window(lo, hi)
        out += window[diff - lo] * symbol[None, :] ** j
    return out / math.sqrt(L)


def assemble(bloch: BlochOperator, N: int) -> HermitianMatrix:
    """The ``(2N+1)``-square Galerkin matrix of ``bloch`` on modes ``-N..N``."""
    N = int(N)
    if N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    modes = np.arange(-N, N + 1)
    return HermitianMatrix(_block(bloch, modes, modes))


def rectangular_block(bloch: BlochOperator, N: int, n_cols: int) -> np.ndarray:
    """Rows ``-N..N`` of the operator acting on modes ``-n_cols..n_cols``."""
    return _block(bloch, np.arange(-N, N + 1), np.arange(-n_cols, n_cols + 1))


def hermiticity_defect(matrix) -> float:
    """``max |A[n, n'] - conj(A[n', n])|``."""
    a = matrix.entries if isinstance(matrix, HermitianMatrix) else np.asarray(matrix)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def hill_operator(ell: float, M: int = 2) -> OperatorSpec:
    """``-d^2/dx^2 + 6 ell^2 sn^2(x, ell) - 4 - ell^2`` on period ``2 M K(ell)``."""
    V = fourier.hill_potential(ell, M)
    return OperatorSpec(2, -1.0, (V, fourier.zero(V.period)))


def constant_operator(values, leading: float, period: float) -> OperatorSpec:
    """Operator with constant lower-order coefficients ``values[j]``."""
    return OperatorSpec(
        len(values), leading, tuple(fourier.constant(v, period) for v in values)
    )


# --- operator spec files ------------------------------------------------------


def spec_to_dict(spec: OperatorSpec) -> dict:
    return {
        "order": spec.order,
        "leading": spec.leading,
        "period": spec.period,
        "coefficients": [fourier.coefficient_to_dict(c) for c in spec.coeffs],
    }


def spec_from_dict(d: dict, base_dir: Path | None = None) -> OperatorSpec:
    order = int(d["order"])
    leading = float(d.get("leading", 1.0))
    period = float(d["period"])
    raw = d.get("coefficients", [])
    if len(raw) > order:
        raise ValueError(f"{len(raw)} coefficients given for an order-{order} operator")
    coeffs = []
    for item in raw:
        if item is None:
            coeffs.append(fourier.zero(period))
        elif isinstance(item, str):
            path = Path(item)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            coeffs.append(fourier.load_coefficient(path))
        else:
            item = dict(item)
            item.setdefault("period", period)
            coeffs.append(fourier.coefficient_from_dict(item))
    coeffs += [fourier.zero(period)] * (order - len(coeffs))
    for c in coeffs:
        if not math.isclose(c.period, period, rel_tol=1e-12):
            raise ValueError(f"coefficient period {c.period} does not match operator period {period}")
    return OperatorSpec(order, leading, tuple(coeffs))


def save_spec(spec: OperatorSpec, path) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=1) + "\n")


def load_spec(path) -> OperatorSpec:
    path = Path(path)
    return spec_from_dict(json.loads(path.read_text()), base_dir=path.parent)
