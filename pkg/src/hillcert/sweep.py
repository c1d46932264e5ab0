"""Floquet-Bloch sweeps, band edges, convergence studies and rate fits."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hillcert.certify import (
    IsolationError,
    aposteriori_bound,
    check_isolation,
    gershgorin,
    hill_bound,
    hill_interval_radius,
    isolating_ball,
)
from hillcert.eig import eigh
from hillcert.operator import OperatorSpec, assemble, bloch_transform, hill_operator
from hillcert.specfun import complementary, elliptic_K, hill_band_edges, hill_diagonal

ERROR_FLOOR = 1e-13
DEFAULT_ELL_GRID = tuple(0.99 * k / 100 for k in range(101))
CONVERGENCE_ELLS = (0.1, 0.3, 0.5, 0.7, 0.9)
CONVERGENCE_NS = tuple(range(5, 41, 5))


def max_workers() -> int:
    """Concurrency cap from ``HILLCERT_THREADS`` (default: CPU count)."""
    raw = os.environ.get("HILLCERT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _map(fn, items):
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class BandPoint:
    mu: float
    eigenvalues: tuple
    N: int


@dataclass
class ConvergenceRecord:
    N: int
    lambda_N: float
    error: float
    bound: float | None = None
    total_bound: float | None = None


def mu_grid(period: float, mu_count: int) -> np.ndarray:
    """``mu_count`` equispaced points of ``[0, 2 pi / L)``."""
    if mu_count < 2:
        raise ValueError(f"mu_count must be at least 2, got {mu_count}")
    return 2 * math.pi / period * np.arange(mu_count) / mu_count


def spectrum(spec: OperatorSpec, mu: float, N: int) -> np.ndarray:
    return np.array([p.value for p in eigh(assemble(bloch_transform(spec, mu), N))])


def band_sweep(spec: OperatorSpec, N: int, mu_count: int = 64) -> list[BandPoint]:
    mus = mu_grid(spec.period, mu_count)
    spectra = _map(lambda mu: spectrum(spec, float(mu), N), mus)
    return [BandPoint(float(mu), tuple(s), int(N)) for mu, s in zip(mus, spectra)]


def band_ranges(points: list[BandPoint]) -> list[tuple[float, float]]:
    """(min, max) of each band index over the sweep."""
    table = np.array([p.eigenvalues for p in points])
    return [(float(lo), float(hi)) for lo, hi in zip(table.min(axis=0), table.max(axis=0))]


@dataclass
class EdgeRow:
    ell: float
    computed: tuple
    exact: tuple
    ambiguous: bool = False


def band_edges_vs_ell(ell_grid, N: int = 40, M: int = 2, ambiguity_tol: float = 1e-8) -> list[EdgeRow]:
    """Eigenvalues of the ``mu = 0`` truncation nearest the closed-form band edges.

    A row is flagged ambiguous when a second eigenvalue lies within
    ``ambiguity_tol`` of an edge (e.g. the coalesced edges at ``ell = 0``).
    """

    def row(ell):
        eigs = spectrum(hill_operator(ell, M), 0.0, N)
        exact = hill_band_edges(ell)
        computed, ambiguous = [], False
        for e in exact:
            d = np.abs(eigs - e)
            order = np.argsort(d)
            computed.append(float(eigs[order[0]]))
            if d[order[1]] < ambiguity_tol:
                ambiguous = True
        return EdgeRow(float(ell), tuple(computed), exact, ambiguous)

    return _map(row, ell_grid)


def convergence_study(
    spec: OperatorSpec,
    mu: float,
    N_list,
    reference: float,
    zeta: float,
    r: float,
    certifier=None,
) -> list[ConvergenceRecord]:
    """Track the eigenvalue in ``B(zeta, r)`` across ``N_list``.

    ``certifier(N, pair, spectrum) -> CertifiedEigenvalue`` overrides the
    generic bound.  A missing eigenvalue gives a record with NaN entries.
    """
    N_list = list(N_list)
    if N_list != sorted(N_list):
        raise ValueError("N_list must be ascending")
    bloch = bloch_transform(spec, mu)

    def cell(N):
        matrix = assemble(bloch, N)
        pairs = eigh(matrix)
        values = np.array([p.value for p in pairs])
        inside = [p for p in pairs if abs(p.value - zeta) <= r]
        if not inside:
            return ConvergenceRecord(N, math.nan, math.nan)
        pair = min(inside, key=lambda p: abs(p.value - zeta))
        rec = ConvergenceRecord(N, pair.value, abs(pair.value - reference))
        if check_isolation(pair.value, values, zeta, r):
            if certifier is None:
                cert = aposteriori_bound(bloch, N, pair, zeta, r, matrix=matrix, spectrum=values)
            else:
                cert = certifier(N, pair, values)
            if cert is not None:
                rec.bound, rec.total_bound = cert.bound, cert.total
        return rec

    return _map(cell, N_list)


def hill_convergence_study(ell: float, N_list, mu: float = 0.0, M: int = 2, ball: str = "gershgorin"):
    """Lowest band edge of the Hill operator: errors against the closed form and bounds.

    ``ball="gershgorin"`` uses the mode-0 diagonal entry and the closed-form
    radius (uniform in N).  ``ball="empirical"`` derives the ball from the
    computed spectra themselves; use it when the Gershgorin radius is too
    large for the 9r isolation test.  ``ball="none"`` only tracks the
    eigenvalue nearest the closed form and issues no bounds.
    """
    spec = hill_operator(ell, M)
    reference = hill_band_edges(ell)[0]
    if ball == "gershgorin":
        zeta, r = hill_diagonal(ell, mu, M, 0), hill_interval_radius(ell)
    elif ball == "empirical":
        spectra = [spectrum(spec, mu, N) for N in N_list]
        # seed at the reference: for large ell the mode-0 diagonal sits nearer the -3 edge
        found = isolating_ball(spectra, reference)
        if found is None:
            raise IsolationError(f"no isolating ball found for ell={ell}")
        zeta, r = found
    elif ball == "none":
        return convergence_study(spec, mu, N_list, reference, reference, math.inf, lambda *a: None)
    else:
        raise ValueError(f"unknown ball {ball!r}")

    def certifier(N, pair, values):
        return hill_bound(ell, mu, M, N, pair, zeta, r, spectrum=values)

    return convergence_study(spec, mu, N_list, reference, zeta, r, certifier)


@dataclass(frozen=True)
class RateFit:
    rate: float
    r_squared: float
    n_points: int


def fit_exponential_rate(records, p: float | None = None, floor: float = ERROR_FLOOR) -> RateFit:
    """Least-squares decay rate of ``log(error) - (p + 1/2) log N`` against N.

    ``p=None`` switches the algebraic correction off.  Records with error at or
    below ``floor`` are discarded.
    """
    pts = [(rec.N, rec.error) for rec in records if np.isfinite(rec.error) and rec.error > floor]
    if len(pts) < 4:
        raise ValueError(f"need at least 4 records with error > {floor:g}, got {len(pts)}")
    N = np.array([t[0] for t in pts], dtype=float)
    y = np.log([t[1] for t in pts])
    if p is not None:
        y = y - (p + 0.5) * np.log(N)
    slope, intercept = np.polyfit(N, y, 1)
    pred = slope * N + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(float(-slope), r2, len(pts))


def hill_predicted_rate(ell: float, M: int = 2, k: int = 1) -> float:
    """``2 pi d / (k L)`` with strip half-width ``d = K(ell')`` and ``L = 2 M K(ell)``."""
    L = 2 * M * elliptic_K(ell)
    return 2 * math.pi * elliptic_K(complementary(ell)) / (k * L)


@dataclass
class ClusterRecord:
    N: int
    members: tuple
    distances: tuple
    disk_count: int


@dataclass
class ClusterProbe:
    records: list = field(default_factory=list)
    k: int = 0
    rate: RateFit | None = None
    predicted_rate: float | None = None


def cluster_rate_probe(
    spec: OperatorSpec,
    mu: float,
    N_list,
    component_index: int,
    exact_values,
    predicted_rate: float | None = None,
    p: float | None = None,
) -> ClusterProbe:
    """Distances of the members of a multi-eigenvalue Gershgorin component to the exact values.

    ``component_index`` counts components from the bottom of the spectrum.
    No certificate is produced for clusters; the fitted rate of the largest
    member distance is reported next to ``predicted_rate`` for comparison.
    """
    bloch = bloch_transform(spec, mu)
    exact = np.asarray(exact_values, dtype=float)
    probe = ClusterProbe(predicted_rate=predicted_rate)
    for N in N_list:
        matrix = assemble(bloch, N)
        comps = gershgorin(matrix)
        comp = comps[component_index]
        if N == N_list[0]:
            if comp.disk_count < 2:
                raise ValueError(
                    f"component {component_index} holds {comp.disk_count} eigenvalue(s); a cluster needs k >= 2"
                )
            probe.k = comp.disk_count
        values = [p_.value for p_ in eigh(matrix)]
        members = tuple(v for v in values if comp.contains(v, slack=1e-12 * max(1.0, abs(v))))
        dist = tuple(float(np.min(np.abs(exact - v))) for v in members)
        probe.records.append(ClusterRecord(int(N), members, dist, comp.disk_count))
    stable = [rec for rec in probe.records if rec.disk_count == probe.k and rec.distances]
    as_conv = [ConvergenceRecord(rec.N, math.nan, max(rec.distances)) for rec in stable]
    try:
        probe.rate = fit_exponential_rate(as_conv, p=p)
    except ValueError:
        probe.rate = None
    return probe


# --- CSV output ---------------------------------------------------------------


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_bands_csv(points: list[BandPoint], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["mu", "index", "lambda"])
        for pt in points:
            for i, lam in enumerate(pt.eigenvalues):
                w.writerow([_fmt(pt.mu), i, _fmt(lam)])


def write_converge_csv(records: list[ConvergenceRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "lambda_N", "error", "bound", "total_bound"])
        for rec in records:
            w.writerow([rec.N, _fmt(rec.lambda_N), _fmt(rec.error), _fmt(rec.bound), _fmt(rec.total_bound)])


def write_edges_csv(rows: list[EdgeRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ell", "computed_a", "computed_b", "computed_c", "exact_a", "exact_b", "exact_c", "ambiguous"])
        for row in rows:
            w.writerow([_fmt(row.ell), *map(_fmt, row.computed), *map(_fmt, row.exact), int(row.ambiguous)])


def ensure_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
