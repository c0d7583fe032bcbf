"""Linear-algebra kernels for the PPCA covariance C = W W^T + sigma2 I.

Nothing here ever forms the D×D matrix C: inverses and determinants go
through the M×M latent Gram matrix W^T W + sigma2 I and its Cholesky factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky

from . import _kernels
from .core import DataError, ModelParams, NumericalError

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class LatentGram:
    m_matrix: np.ndarray
    chol: np.ndarray  # lower triangular

    def solve(self, b: np.ndarray) -> np.ndarray:
        """M^{-1} b for a vector or a column-stacked matrix ``b``."""
        return cho_solve((self.chol, True), b, check_finite=False)

    def inverse(self) -> np.ndarray:
        return self.solve(np.eye(self.m_matrix.shape[0]))

    def logdet(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self.chol))))


def compute_latent_gram(params: ModelParams) -> LatentGram:
    w = params.w
    m = w.T @ w + params.sigma2 * np.eye(w.shape[1])
    m = 0.5 * (m + m.T)
    try:
        chol = cholesky(m, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise NumericalError(f"latent Gram matrix is not positive definite: {exc}") from exc
    return LatentGram(m, chol)


def c_inverse_apply(params: ModelParams, gram: LatentGram, y: np.ndarray) -> np.ndarray:
    """C^{-1} y via C^{-1} = (I - W M^{-1} W^T) / sigma2.

    ``y`` may be a D-vector or an N×D matrix of row vectors.
    """
    y = np.asarray(y, dtype=np.float64)
    d = params.dim
    if y.shape[-1] != d:
        raise DataError(f"expected vectors of length {d}, got shape {y.shape}")
    w = params.w
    if y.ndim == 1:
        return (y - w @ gram.solve(w.T @ y)) / params.sigma2
    proj = gram.solve(w.T @ y.T)  # M×N
    return (y - (w @ proj).T) / params.sigma2


def log_det_c(params: ModelParams, gram: LatentGram) -> float:
    """ln|C| = (D - M) ln sigma2 + ln|M|."""
    d, m = params.w.shape
    return (d - m) * math.log(params.sigma2) + gram.logdet()


def mahalanobis_sq(params: ModelParams, gram: LatentGram, x: np.ndarray) -> np.ndarray:
    """(x - mu)^T C^{-1} (x - mu), row-wise for an N×D ``x``.

    With a = M^{-1} W^T r and e = r - W a, W^T e = sigma2 a, so the form splits
    into |e|^2 / sigma2 + |a|^2: two non-negative terms, no cancellation when
    sigma2 is small.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    r = x - params.mu
    a = gram.solve(params.w.T @ r.T)  # M×N
    e = r - (params.w @ a).T
    return np.einsum("ij,ij->i", e, e) / params.sigma2 + np.einsum("ij,ij->j", a, a)


def gaussian_log_density(params: ModelParams, gram: LatentGram, x: np.ndarray):
    """ln N(x | mu, C) for a D-vector (returns float) or each row of an N×D matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.dim:
        raise DataError(f"expected vectors of length {params.dim}, got shape {x.shape}")
    q = mahalanobis_sq(params, gram, x)
    out = -0.5 * (params.dim * LOG_2PI + log_det_c(params, gram) + q)
    return float(out[0]) if x.ndim == 1 else out


JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


def _fix_signs(vecs: np.ndarray, eps: float = 1e-10) -> np.ndarray:
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        nz = np.flatnonzero(np.abs(vecs[:, j]) > eps)
        if nz.size and vecs[nz[0], j] < 0:
            vecs[:, j] = -vecs[:, j]
    return vecs


def symmetric_eigh(a, backend=None) -> tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a symmetric matrix by cyclic Jacobi.

    Eigenvalues come back in descending order.  Each eigenvector is signed so
    that its first component of magnitude above 1e-10 is positive.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DataError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DataError("matrix has non-finite entries")
    scale = max(float(np.max(np.abs(a))), 1.0) if a.size else 1.0
    if np.max(np.abs(a - a.T), initial=0.0) > 1e-8 * scale:
        raise DataError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    k = backend if backend is not None else _kernels.backend
    evals, evecs, _ = k.jacobi_eigh(a, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    order = np.argsort(-evals, kind="stable")
    return evals[order], _fix_signs(evecs[:, order])
