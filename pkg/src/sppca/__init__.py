"""Self-paced probabilistic PCA for data with outliers."""

from ._kernels import BACKEND_NAME
from .baseline_pca import PcaModel, fit_pca, pca_reconstruct, pca_transform
from .core import (
    DataError,
    DataMatrix,
    FitConfig,
    FitReport,
    LatentStats,
    ModelFormatError,
    ModelParams,
    NumericalError,
    SelectionState,
    SppcaError,
)
from .ppca import fit_ppca, reconstruct, transform
from .rng import SeededRNG, derive_seed, seeded_rng
from .sp_ppca import SpFitResult, fit_sp_ppca

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "DataError",
    "DataMatrix",
    "FitConfig",
    "FitReport",
    "LatentStats",
    "ModelFormatError",
    "ModelParams",
    "NumericalError",
    "PcaModel",
    "SelectionState",
    "SeededRNG",
    "SpFitResult",
    "SppcaError",
    "derive_seed",
    "fit_pca",
    "fit_ppca",
    "fit_sp_ppca",
    "pca_reconstruct",
    "pca_transform",
    "reconstruct",
    "seeded_rng",
    "transform",
]
