"""Numerical verification of Weyl / traceless-Ricci pinching estimates."""

__version__ = "0.1.0"

from .decomposition import decompose, tvu_decompose, weyl_projection
from .inequalities import A, C, derive_A, pinchein_coefficient
from .models import ModelGeometry, PinchingVerdict, catalog
from .report import VerificationReport
from .sharpness import SearchConfig, SharpnessResult, equality_witness, maximize_ratio
from .tensor_core import EigenSolverError, PreconditionError

__all__ = [
    "A",
    "C",
    "EigenSolverError",
    "ModelGeometry",
    "PinchingVerdict",
    "PreconditionError",
    "SearchConfig",
    "SharpnessResult",
    "VerificationReport",
    "catalog",
    "decompose",
    "derive_A",
    "equality_witness",
    "maximize_ratio",
    "pinchein_coefficient",
    "tvu_decompose",
    "weyl_projection",
]
