"""Periodic coefficient functions as Fourier coefficient sequences with tail majorants.

Coefficients live in the orthonormal basis ``e_m(x) = exp(-2j*pi*m*x/L) / sqrt(L)``
so that a function is ``f(x) = sum_m c[m] e_m(x)``.  Every coefficient also
carries a *tail* descriptor: a computable upper bound on ``sum_{|m|>=N} |c[m]|``
that covers modes not stored explicitly.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from hillcert.specfun import DomainError, elliptic_K, hill_b, nome


class CertLevel(enum.Enum):
    CERTIFIED = "Certified"
    HEURISTIC = "Heuristic"

    @staticmethod
    def weakest(levels) -> "CertLevel":
        levels = list(levels)
        if any(lv is CertLevel.HEURISTIC for lv in levels):
            return CertLevel.HEURISTIC
        return CertLevel.CERTIFIED


@dataclass(frozen=True)
class ExactZero:
    """All modes beyond the stored ones vanish."""


@dataclass(frozen=True)
class GeometricEnvelope:
    """``sum_{|m|>=N} |c_m| <= amplitude * ratio**N / (1 - ratio)``.

    Fitted envelopes are heuristic; ``asserted=True`` marks an envelope the user
    vouches for analytically.
    """

    amplitude: float
    ratio: float
    asserted: bool = False

    def __post_init__(self):
        if not (0.0 <= self.ratio < 1.0):
            raise ValueError(f"envelope ratio must lie in [0, 1), got {self.ratio}")
        if self.amplitude < 0:
            raise ValueError("envelope amplitude must be non-negative")

    def __call__(self, N: int) -> float:
        return self.amplitude * self.ratio ** max(N, 0) / (1.0 - self.ratio)


@dataclass(frozen=True)
class HillClosedForm:
    """Analytic tail of the Hill potential with period ``2 M K(ell)``."""

    ell: float
    M: int

    def __call__(self, N: int) -> float:
        q = nome(self.ell)
        if q == 0.0:
            return 0.0
        K = elliptic_K(self.ell)
        L = 2 * self.M * K
        J = max(1, -(-int(N) // self.M))  # ceil(N / M), at least the first harmonic
        # 2 sqrt(L) sum_{j>=J} |b_j| <= 2 sqrt(L) (6 pi^2/K^2)/(1-q^2) sum_{j>=J} j q^j
        series = (J * (1.0 - q) + q) * q**J / ((1.0 - q * q) * (1.0 - q) ** 2)
        return 2.0 * math.sqrt(L) * 6.0 * math.pi**2 / K**2 * series


@dataclass(frozen=True)
class Combination:
    """Tail of a linear combination ``sum_k w_k g_k`` of coefficients."""

    terms: tuple  # of (weight: complex, PeriodicCoefficient)


Tail = Union[ExactZero, GeometricEnvelope, HillClosedForm, Combination]


@dataclass(frozen=True, eq=False)
class PeriodicCoefficient:
    """Truncated Fourier representation of a period-``period`` function.

    ``coeffs[m + m_max]`` holds the coefficient of ``e_m`` for ``|m| <= m_max``.
    """

    period: float
    coeffs: np.ndarray
    tail: Tail = field(default_factory=ExactZero)

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError(f"period must be positive, got {self.period}")
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coefficient array must be 1-D with odd length 2*m_max+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def m_max(self) -> int:
        return (self.coeffs.size - 1) // 2

    def __getitem__(self, m: int) -> complex:
        if abs(m) > self.m_max:
            return 0j
        return complex(self.coeffs[m + self.m_max])

    def __eq__(self, other):
        if not isinstance(other, PeriodicCoefficient):
            return NotImplemented
        return (
            self.period == other.period
            and np.array_equal(self.coeffs, other.coeffs)
            and self.tail == other.tail
        )

    __hash__ = None

    def window(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients for ``m = lo..hi`` (zero outside the stored range)."""
        out = np.zeros(hi - lo + 1, dtype=complex)
        a, b = max(lo, -self.m_max), min(hi, self.m_max)
        if a <= b:
            out[a - lo : b - lo + 1] = self.coeffs[a + self.m_max : b + self.m_max + 1]
        return out

    @property
    def is_constant(self) -> bool:
        """Only the mean is nonzero and no tail is carried."""
        if not isinstance(self.tail, ExactZero):
            return False
        c = self.coeffs.copy()
        c[self.m_max] = 0
        return not np.any(c)

    @property
    def cert_level(self) -> CertLevel:
        return _tail_level(self.tail)

    def scaled(self, w: complex) -> "PeriodicCoefficient":
        return linear_combination([(w, self)])

    def __add__(self, other: "PeriodicCoefficient") -> "PeriodicCoefficient":
        return linear_combination([(1.0, self), (1.0, other)])


def _tail_level(tail: Tail) -> CertLevel:
    if isinstance(tail, (ExactZero, HillClosedForm)):
        return CertLevel.CERTIFIED
    if isinstance(tail, GeometricEnvelope):
        return CertLevel.CERTIFIED if tail.asserted else CertLevel.HEURISTIC
    return CertLevel.weakest(c.cert_level for _, c in tail.terms)


def constant(value: complex, period: float) -> PeriodicCoefficient:
    """The constant function ``value``."""
    return PeriodicCoefficient(period, np.array([value * math.sqrt(period)]))


def zero(period: float) -> PeriodicCoefficient:
    return constant(0.0, period)


def linear_combination(terms) -> PeriodicCoefficient:
    """``sum_k w_k g_k`` with a tail that bounds the combined truncation."""
    terms = [(complex(w), c) for w, c in terms]
    if not terms:
        raise ValueError("empty combination")
    period = terms[0][1].period
    for _, c in terms:
        if not math.isclose(c.period, period, rel_tol=1e-14):
            raise ValueError("coefficients must share a period")
    m_max = max(c.m_max for _, c in terms)
    out = np.zeros(2 * m_max + 1, dtype=complex)
    for w, c in terms:
        out[m_max - c.m_max : m_max + c.m_max + 1] += w * c.coeffs
    # Terms whose tail is exact zero are fully represented by the stored sum,
    # except that their stored high modes still need accounting below.
    tail_terms = tuple((w, c) for w, c in terms if w != 0 and not c.is_constant)
    if all(isinstance(c.tail, ExactZero) for _, c in tail_terms):
        tail: Tail = ExactZero()
    else:
        tail = Combination(tail_terms)
    return PeriodicCoefficient(period, out, tail)


def stored_partial_sum(coef: PeriodicCoefficient, N: int) -> float:
    """``sum_{N <= |m| <= m_max} |c_m|`` over the stored coefficients."""
    m = np.arange(-coef.m_max, coef.m_max + 1)
    return float(np.abs(coef.coeffs[np.abs(m) >= N]).sum())


def tail_sum(coef: PeriodicCoefficient, N: int) -> float:
    """Upper bound on ``sum_{|m| >= N} |c_m|``, including modes not stored."""
    N = int(N)
    tail = coef.tail
    if isinstance(tail, ExactZero):
        return stored_partial_sum(coef, N)
    if isinstance(tail, GeometricEnvelope):
        return max(tail(N), stored_partial_sum(coef, N))
    if isinstance(tail, HillClosedForm):
        return tail(N)
    return float(sum(abs(w) * tail_sum(c, N) for w, c in tail.terms))


def synthesize(coef: PeriodicCoefficient, x):
    """Evaluate ``sum_m c_m e_m(x)`` at scalar or array ``x``."""
    x_arr = np.asarray(x, dtype=float)
    m = np.arange(-coef.m_max, coef.m_max + 1)
    L = coef.period
    phase = np.exp(-2j * np.pi * np.multiply.outer(x_arr, m) / L)
    out = phase @ coef.coeffs / math.sqrt(L)
    return complex(out) if out.ndim == 0 else out


def _fit_envelope(coeffs: np.ndarray, m_max: int) -> GeometricEnvelope:
    """Geometric envelope over the top quartile of |m|, inflated twofold."""
    m = np.arange(0, m_max + 1)
    mag = np.maximum(np.abs(coeffs[m_max:]), np.abs(coeffs[m_max::-1]))
    lo = max(1, (3 * m_max) // 4)
    sel = m[lo:]
    tiny = np.finfo(float).tiny
    logs = np.log(np.maximum(mag[lo:], tiny))
    if sel.size >= 2:
        slope = np.polyfit(sel, logs, 1)[0]
        ratio = float(min(max(math.exp(slope), 1e-12), 0.999))
    else:
        ratio = 0.5
    # Anchor so the envelope dominates every fitted magnitude, both signs of m.
    a = float(np.max(mag[lo:] / ratio ** sel.astype(float)))
    return GeometricEnvelope(amplitude=2.0 * 2.0 * a, ratio=ratio, asserted=False)


def from_samples(samples, period: float) -> PeriodicCoefficient:
    """Coefficients from equispaced samples ``f(k L / n)``, ``n`` a power of two."""
    samples = np.asarray(samples, dtype=complex)
    n = samples.size
    if samples.ndim != 1 or n < 4 or n & (n - 1):
        raise ValueError(f"sample count must be a power of two >= 4, got {n}")
    if not period > 0:
        raise ValueError(f"period must be positive, got {period}")
    # f(x_k) = sum_m c_m exp(-2i pi m k / n) / sqrt(L)  =>  c_m = sqrt(L) * ifft(f)[m]
    spectrum = np.fft.ifft(samples) * math.sqrt(period)
    m_max = n // 2 - 1
    m = np.arange(-m_max, m_max + 1)
    coeffs = spectrum[m % n]
    return PeriodicCoefficient(period, coeffs, _fit_envelope(coeffs, m_max))


def _hill_store_count(q: float) -> int:
    """Number of harmonics after which ``q**j`` is negligible (< 1e-40)."""
    if q == 0.0:
        return 1
    return max(4, math.ceil(-40.0 * math.log(10) / math.log(q)) + 1)


def hill_potential(ell: float, M: int = 2, n_harmonics: int | None = None) -> PeriodicCoefficient:
    """``6 ell^2 sn^2(x, ell) - 4 - ell^2`` with period ``L = 2 M K(ell)``.

    Harmonic ``j`` of the natural period ``2K`` sits at ``m = +-M j``.
    """
    if not (0.0 <= ell < 1.0):
        raise DomainError(f"elliptic modulus must satisfy 0 <= ell < 1, got {ell!r}")
    M = int(M)
    if M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    K = elliptic_K(ell)
    L = 2 * M * K
    J = n_harmonics if n_harmonics is not None else _hill_store_count(nome(ell))
    m_max = M * J
    coeffs = np.zeros(2 * m_max + 1, dtype=complex)
    rootL = math.sqrt(L)
    coeffs[m_max] = rootL * hill_b(ell, 0)
    for j in range(1, J + 1):
        bj = rootL * hill_b(ell, j)
        coeffs[m_max + M * j] = bj
        coeffs[m_max - M * j] = bj
    tail: Tail = HillClosedForm(ell, M) if ell > 0 else ExactZero()
    return PeriodicCoefficient(L, coeffs, tail)


# --- JSON coefficient files ---------------------------------------------------


def _tail_to_dict(tail: Tail) -> dict:
    if isinstance(tail, ExactZero):
        return {"kind": "exact_zero"}
    if isinstance(tail, GeometricEnvelope):
        return {
            "kind": "geometric",
            "amplitude": tail.amplitude,
            "ratio": tail.ratio,
            "asserted": tail.asserted,
        }
    if isinstance(tail, HillClosedForm):
        return {"kind": "hill", "ell": tail.ell, "M": tail.M}
    return {
        "kind": "combination",
        "terms": [
            {"weight": [w.real, w.imag], "coefficient": coefficient_to_dict(c)}
            for w, c in tail.terms
        ],
    }


def _tail_from_dict(d: dict | None) -> Tail:
    if d is None:
        return ExactZero()
    kind = d.get("kind")
    if kind == "exact_zero":
        return ExactZero()
    if kind == "geometric":
        return GeometricEnvelope(float(d["amplitude"]), float(d["ratio"]), bool(d.get("asserted", False)))
    if kind == "hill":
        return HillClosedForm(float(d["ell"]), int(d["M"]))
    if kind == "combination":
        return Combination(
            tuple(
                (complex(*t["weight"]), coefficient_from_dict(t["coefficient"]))
                for t in d["terms"]
            )
        )
    raise ValueError(f"unknown tail kind {kind!r}")


def coefficient_to_dict(coef: PeriodicCoefficient) -> dict:
    m_max = coef.m_max
    entries = [
        [m, coef.coeffs[m + m_max].real, coef.coeffs[m + m_max].imag]
        for m in range(-m_max, m_max + 1)
        if coef.coeffs[m + m_max] != 0
    ]
    return {
        "period": coef.period,
        "m_max": m_max,
        "entries": entries,
        "tail": _tail_to_dict(coef.tail),
    }


def coefficient_from_dict(d: dict) -> PeriodicCoefficient:
    entries = d.get("entries", [])
    m_max = int(d.get("m_max", max((abs(int(e[0])) for e in entries), default=0)))
    coeffs = np.zeros(2 * m_max + 1, dtype=complex)
    for e in entries:
        m = int(e[0])
        if abs(m) > m_max:
            raise ValueError(f"entry index {m} exceeds m_max={m_max}")
        coeffs[m + m_max] = complex(float(e[1]), float(e[2]) if len(e) > 2 else 0.0)
    return PeriodicCoefficient(float(d["period"]), coeffs, _tail_from_dict(d.get("tail")))


def save_coefficient(coef: PeriodicCoefficient, path) -> None:
    Path(path).write_text(json.dumps(coefficient_to_dict(coef), indent=1) + "\n")


def load_coefficient(path) -> PeriodicCoefficient:
    return coefficient_from_dict(json.loads(Path(path).read_text()))
