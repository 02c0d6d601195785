"""QES spectrum of the PT-symmetric potential V(x) = -(zeta cosh 2x - iM)^2."""

from ._core import (
    Branch,
    CriticalCoupling,
    ModelParams,
    NumericalError,
    PTClassification,
    PTVerdict,
    QesLevel,
    QesSpectrum,
    Reality,
    ScanPoint,
    VerificationReport,
    anti_isospectral,
    critical_polynomial,
    critical_zeta,
    gauged_matrix,
    matrix_spectrum,
    roots,
    scan,
    solve,
    verify,
)

__all__ = [
    "Branch",
    "CriticalCoupling",
    "ModelParams",
    "NumericalError",
    "PTClassification",
    "PTVerdict",
    "QesLevel",
    "QesSpectrum",
    "Reality",
    "ScanPoint",
    "VerificationReport",
    "anti_isospectral",
    "critical_polynomial",
    "critical_zeta",
    "gauged_matrix",
    "matrix_spectrum",
    "roots",
    "scan",
    "solve",
    "verify",
]
