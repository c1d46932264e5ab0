"""Hill's method for periodic differential operators with certified eigenvalue bounds."""

from hillcert.specfun import (
    DomainError,
    elliptic_E,
    elliptic_K,
    hill_b,
    hill_band_edges,
    hill_diagonal,
    jacobi_sn,
    nome,
)
from hillcert.fourier import PeriodicCoefficient, from_samples, hill_potential, synthesize, tail_sum
from hillcert.operator import (
    BlochOperator,
    HermitianMatrix,
    OperatorSpec,
    assemble,
    bloch_transform,
    hermiticity_defect,
    hill_operator,
)
from hillcert.eig import EigenPair, NotHermitianError, eigh, spectral_norm
from hillcert.certify import (
    CertifiedEigenvalue,
    GershgorinComponent,
    IsolationError,
    aposteriori_bound,
    check_isolation,
    gershgorin,
    hill_bound,
    hill_interval_radius,
)

__all__ = [
    "DomainError", "elliptic_E", "elliptic_K", "hill_b", "hill_band_edges", "hill_diagonal",
    "jacobi_sn", "nome", "PeriodicCoefficient", "from_samples", "hill_potential", "synthesize",
    "tail_sum", "BlochOperator", "HermitianMatrix", "OperatorSpec", "assemble",
    "bloch_transform", "hermiticity_defect", "hill_operator", "EigenPair", "NotHermitianError",
    "eigh", "spectral_norm", "CertifiedEigenvalue", "GershgorinComponent", "IsolationError",
    "aposteriori_bound", "check_isolation", "gershgorin", "hill_bound", "hill_interval_radius",
]
