"""Gershgorin localisation, the isolation test and a posteriori eigenvalue bounds.

A computed eigenvalue ``lam_N`` of the truncation is certified when a ball
``B(zeta, r)`` contains it and ``B(zeta, 9r)`` contains no other computed
eigenvalue.  The exact eigenvalue inside ``B(zeta, r)`` then satisfies

    |lam - lam_N| <= (5 + 3|zeta|/r) (2 pi N)^p / L^(p+1/2)
                     * sum_j [ sum_{N<|l|<2N} sum_{m=l-N}^{l+N} |f_j[m] phi[l-m]|
                               + (2N+1) sum_{|m|>=N} |f_j[m]| ].

The ball has to isolate ``lam_N`` for every N; Gershgorin intervals of the
Hill family give such an N-uniform ball.  The formula assumes exact
arithmetic, so each certificate also carries a floating-point allowance
(eigen-residual plus rounding of the matrix and residual).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from hillcert.eig import EigenPair, eigh
from hillcert.fourier import CertLevel, HillClosedForm, tail_sum
from hillcert.operator import BlochOperator, HermitianMatrix, assemble, bloch_transform, hill_operator
from hillcert.specfun import elliptic_K, hill_b, hill_diagonal, nome

EPS = np.finfo(float).eps


class IsolationError(ArithmeticError):
    """The isolation condition fails, so no certificate can be issued."""


@dataclass(frozen=True)
class GershgorinComponent:
    lo: float
    hi: float
    disk_count: int
    member_centers: tuple
    member_rows: tuple = ()

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def radius(self) -> float:
        return 0.5 * (self.hi - self.lo)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack


@dataclass
class CertifiedEigenvalue:
    lambda_N: float
    zeta: float
    r: float
    bound: float | None  # right-hand side of the a posteriori estimate
    cert_level: str
    isolation_ok: bool
    float_allowance: float = 0.0
    component_count: int | None = None
    N: int | None = None

    @property
    def total(self) -> float | None:
        """Bound on ``|lam - fl(lam_N)|`` including the floating-point allowance."""
        if self.bound is None:
            return None
        return self.bound + self.float_allowance

    def to_dict(self) -> dict:
        d = asdict(self)
        d["total_bound"] = self.total
        return d


def gershgorin(matrix) -> list[GershgorinComponent]:
    """Merged Gershgorin intervals of a Hermitian matrix, ascending."""
    a = matrix.entries if isinstance(matrix, HermitianMatrix) else np.asarray(matrix)
    centers = a.diagonal().real
    off = np.abs(a)
    np.fill_diagonal(off, 0.0)  # subtracting |a_ii| afterwards would cancel digits
    radii = off.sum(axis=1)
    order = np.argsort(centers - radii, kind="stable")
    comps: list[GershgorinComponent] = []
    rows: list[int] = []
    lo = hi = None
    for i in order:
        a_lo, a_hi = centers[i] - radii[i], centers[i] + radii[i]
        if rows and a_lo <= hi:
            hi = max(hi, a_hi)
            rows.append(int(i))
            continue
        if rows:
            comps.append(_component(lo, hi, rows, centers))
        lo, hi, rows = a_lo, a_hi, [int(i)]
    if rows:
        comps.append(_component(lo, hi, rows, centers))
    return comps


def _component(lo, hi, rows, centers) -> GershgorinComponent:
    rows = sorted(rows)
    return GershgorinComponent(
        float(lo), float(hi), len(rows), tuple(float(centers[i]) for i in rows), tuple(rows)
    )


def component_of(components, x: float) -> GershgorinComponent:
    """The component containing ``x`` (or the nearest one)."""
    return min(components, key=lambda c: 0.0 if c.contains(x) else min(abs(x - c.lo), abs(x - c.hi)))


def hill_interval_radius(ell: float) -> float:
    """Closed-form Gershgorin radius ``(12 pi^2/K^2) q / ((1-q^2)(1-q)^2)``."""
    q = nome(ell)
    if q == 0.0:
        return 0.0
    K = elliptic_K(ell)
    return 12.0 * math.pi**2 / K**2 * q / ((1.0 - q * q) * (1.0 - q) ** 2)


def check_isolation(lambda_N: float, all_eigs, zeta: float, r: float) -> bool:
    """``lambda_N`` in ``B(zeta, r)`` and every other eigenvalue outside ``B(zeta, 9r)``."""
    eigs = np.asarray(all_eigs, dtype=float)
    if abs(lambda_N - zeta) > r:
        return False
    if eigs.size:
        # drop one copy of lambda_N itself
        eigs = np.delete(eigs, int(np.argmin(np.abs(eigs - lambda_N))))
    return bool(np.all(np.abs(eigs - zeta) > 9.0 * r))


def isolating_ball(spectra, guess: float) -> tuple[float, float] | None:
    """A ball that isolates the eigenvalue tracked from ``guess`` in every spectrum.

    ``zeta`` is the tracked value in the last spectrum and ``r`` a tenth of the
    smallest gap seen.  The N-uniformity is checked only over ``spectra``.
    Returns None when no such ball exists.
    """
    tracked, gaps = [], []
    spectra = [np.sort(np.asarray(s, dtype=float)) for s in spectra]
    for s in spectra:
        tracked.append(s[np.argmin(np.abs(s - guess))])
    zeta = float(tracked[-1])
    for s, lam in zip(spectra, tracked):
        others = np.delete(s, int(np.argmin(np.abs(s - lam))))
        gaps.append(float(np.min(np.abs(others - zeta))) if others.size else math.inf)
    r = min(gaps) / 10.0
    if not math.isfinite(r) or max(abs(t - zeta) for t in tracked) > r:
        return None
    return zeta, r


def _double_sum(fabs: np.ndarray, m_lo: int, phi_abs: np.ndarray, N: int) -> float:
    """``sum_{N<|l|<2N} sum_k |f[l-k]| |phi[k]|`` with ``fabs`` indexed from ``m_lo``."""
    # conv[t] pairs f index (m_lo + i) with phi index (-N + k): l = m_lo - N + t
    conv = np.convolve(fabs, phi_abs)
    l = m_lo - N + np.arange(conv.size)
    sel = (np.abs(l) > N) & (np.abs(l) < 2 * N)
    return float(conv[sel].sum())


def _prefactor(zeta: float, r: float, N: int, L: float, p: int) -> float:
    # max(1, .) keeps the derivative-symbol estimate valid when 2 pi N < L
    return (5.0 + 3.0 * abs(zeta) / r) * max(1.0, 2 * math.pi * N / L) ** p / math.sqrt(L)


def _float_allowance(matrix: HermitianMatrix, pair: EigenPair) -> float:
    n = matrix.dim
    fro = float(np.linalg.norm(matrix.entries))
    return pair.residual + (n + 2) * EPS * (fro + abs(pair.value))


def _omitted_coupling(bloch: BlochOperator, N: int) -> float:
    """Row-sum bound on couplings dropped because a coefficient stores too few modes."""
    L = bloch.period
    total = 0.0
    for j in range(bloch.order + 1):
        f = bloch.coefficient(j)
        if 2 * N > f.m_max:
            total += (2 * math.pi * N / L) ** j * tail_sum(f, f.m_max + 1)
    return total / math.sqrt(L)


def _finish(bound_sum, zeta, r, N, L, p) -> float:
    if bound_sum == 0.0:
        return 0.0
    if r <= 0.0:
        return math.inf
    return _prefactor(zeta, r, N, L, p) * bound_sum


def aposteriori_bound(
    bloch: BlochOperator,
    N: int,
    pair: EigenPair,
    zeta: float,
    r: float,
    *,
    matrix: HermitianMatrix | None = None,
    spectrum=None,
) -> CertifiedEigenvalue:
    """Certified error bound for ``pair`` from the Fourier data of ``bloch``.

    Raises IsolationError when ``B(zeta, r)`` does not isolate ``pair.value``.
    The bound also presumes the full operator has exactly one eigenvalue near
    ``B(zeta, r)``; that is not checked here.
    """
    if matrix is None:
        matrix = assemble(bloch, N)
    if spectrum is None:
        spectrum = [p.value for p in eigh(matrix)]
    if not check_isolation(pair.value, spectrum, zeta, r):
        raise IsolationError(
            f"lambda_N={pair.value:.17g} is not isolated by B({zeta:.17g}, {r:.17g})"
        )
    L, p = bloch.period, bloch.order
    phi = np.abs(pair.vector) / np.linalg.norm(pair.vector)
    s = 0.0
    levels = []
    for j in range(p + 1):
        f = bloch.coefficient(j)
        levels.append(f.cert_level)
        m_lo = -3 * N
        s += _double_sum(np.abs(f.window(m_lo, 3 * N)), m_lo, phi, N)
        if 3 * N > f.m_max:
            s += tail_sum(f, f.m_max + 1) * float(phi.sum())
        s += (2 * N + 1) * tail_sum(f, N)
    comps = gershgorin(matrix)
    return CertifiedEigenvalue(
        lambda_N=pair.value,
        zeta=float(zeta),
        r=float(r),
        bound=_finish(s, zeta, r, N, L, p),
        cert_level=CertLevel.weakest(levels).value,
        isolation_ok=True,
        float_allowance=_float_allowance(matrix, pair) + _omitted_coupling(bloch, N),
        component_count=component_of(comps, pair.value).disk_count,
        N=int(N),
    )


def hill_tail(ell: float, M: int, N: int) -> float:
    """Closed-form majorant of ``sum_{|m|>=N} |f_0[m]|`` for the Hill potential."""
    return HillClosedForm(ell, M)(N)


def hill_bound(
    ell: float,
    mu: float,
    M: int,
    N: int,
    pair: EigenPair,
    zeta: float | None = None,
    r: float | None = None,
    *,
    matrix: HermitianMatrix | None = None,
    spectrum=None,
) -> CertifiedEigenvalue:
    """Certificate for the Hill operator using its closed-form Fourier data.

    Defaults: ``zeta`` the Hill diagonal entry of mode 0 at ``mu`` and ``r``
    the closed-form Gershgorin radius.
    """
    if zeta is None:
        zeta = hill_diagonal(ell, mu, M, 0)
    if r is None:
        r = hill_interval_radius(ell)
    bloch = bloch_transform(hill_operator(ell, M), mu)
    if matrix is None:
        matrix = assemble(bloch, N)
    if spectrum is None:
        spectrum = [p.value for p in eigh(matrix)]
    if not check_isolation(pair.value, spectrum, zeta, r):
        raise IsolationError(
            f"lambda_N={pair.value:.17g} is not isolated by B({zeta:.17g}, {r:.17g})"
        )
    K = elliptic_K(ell)
    L = 2 * M * K
    rootL = math.sqrt(L)
    # |f_0[m]| = sqrt(L) |b_{|m|/M}| on multiples of M, m != 0 (the mean never couples)
    m = np.arange(-3 * N, 3 * N + 1)
    fabs = np.zeros(m.size)
    on = (m % M == 0) & (m != 0)
    fabs[on] = [rootL * abs(hill_b(ell, abs(int(k)) // M)) for k in m[on]]
    phi = np.abs(pair.vector) / np.linalg.norm(pair.vector)
    s = _double_sum(fabs, -3 * N, phi, N) + (2 * N + 1) * hill_tail(ell, M, N)
    comps = gershgorin(matrix)
    return CertifiedEigenvalue(
        lambda_N=pair.value,
        zeta=float(zeta),
        r=float(r),
        bound=_finish(s, zeta, r, N, L, 2),
        cert_level=CertLevel.CERTIFIED.value,
        isolation_ok=True,
        float_allowance=_float_allowance(matrix, pair) + _omitted_coupling(bloch, N),
        component_count=component_of(comps, pair.value).disk_count,
        N=int(N),
    )


@dataclass
class ClusterReport:
    """A Gershgorin component holding several eigenvalues; no bound is issued."""

    lo: float
    hi: float
    disk_count: int
    eigenvalues: list = field(default_factory=list)

    @property
    def spread(self) -> float:
        return max(self.eigenvalues) - min(self.eigenvalues) if self.eigenvalues else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spread"] = self.spread
        return d


def certify_components(bloch: BlochOperator, N: int, ball=None):
    """Certify every single-disk Gershgorin component of the truncation.

    ``ball(component) -> (zeta, r)`` overrides the default, which is the
    component's own center and radius.  Returns ``(certificates, clusters)``;
    a failed isolation yields a certificate with ``isolation_ok=False`` and
    no bound.
    """
    matrix = assemble(bloch, N)
    pairs = eigh(matrix)
    values = np.array([p.value for p in pairs])
    certs, clusters = [], []
    level = CertLevel.weakest(bloch.coefficient(j).cert_level for j in range(bloch.order + 1))
    for comp in gershgorin(matrix):
        inside = [p for p in pairs if comp.contains(p.value, slack=1e-12 * max(1.0, abs(p.value)))]
        if comp.disk_count != 1:
            clusters.append(ClusterReport(comp.lo, comp.hi, comp.disk_count, [p.value for p in inside]))
            continue
        zeta, r = ball(comp) if ball is not None else (comp.center, comp.radius)
        pair = min(pairs, key=lambda p: abs(p.value - zeta))
        if check_isolation(pair.value, values, zeta, r):
            certs.append(aposteriori_bound(bloch, N, pair, zeta, r, matrix=matrix, spectrum=values))
        else:
            certs.append(
                CertifiedEigenvalue(pair.value, float(zeta), float(r), None, level.value, False,
                                    component_count=comp.disk_count, N=int(N))
            )
    return certs, clusters
