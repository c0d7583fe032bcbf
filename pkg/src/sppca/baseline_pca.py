"""Classical PCA baseline via the Jacobi eigensolver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DataError, as_data_matrix, check_latent_dim
from .numerics import _fix_signs, symmetric_eigh


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # D×M, orthonormal columns
    eigenvalues: np.ndarray  # M, descending

    @property
    def latent_dim(self) -> int:
        return self.components.shape[1]

    @property
    def dim(self) -> int:
        return self.components.shape[0]


def fit_pca(data, latent_dim: int, allow_full: bool = False, backend=None) -> PcaModel:
    """Top eigenpairs of the divisor-N sample covariance.

    When there are fewer samples than features the N×N Gram matrix is
    decomposed instead and its eigenvectors mapped back, which yields the
    same nonzero eigenpairs.
    """
    x = as_data_matrix(data)
    n, d = x.shape
    if n < 2:
        raise DataError("need at least two samples")
    m = check_latent_dim(latent_dim, d, allow_full=allow_full)
    mean = x.mean(axis=0)
    r = x - mean
    if n >= d:
        evals, evecs = symmetric_eigh(r.T @ r / n, backend=backend)
        comps = evecs[:, :m]
    else:
        if m > n:
            raise DataError(f"latent_dim {m} exceeds the {n} available samples")
        evals, u = symmetric_eigh(r @ r.T / n, backend=backend)
        top = evals[:m]
        if np.any(top <= 1e-12 * max(evals[0], 1e-300)):
            raise DataError("data has fewer non-degenerate directions than latent_dim")
        comps = _fix_signs(r.T @ u[:, :m] / np.sqrt(n * top))
    eig = np.clip(evals[:m], 0.0, None)
    return PcaModel(mean, comps, eig)


def pca_transform(data, model: PcaModel) -> np.ndarray:
    x = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if x.shape[1] != model.dim:
        raise DataError(f"data has {x.shape[1]} columns, model expects {model.dim}")
    return (x - model.mean) @ model.components


def pca_reconstruct(data, model: PcaModel) -> np.ndarray:
    return pca_transform(data, model) @ model.components.T + model.mean
