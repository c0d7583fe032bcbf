"""Probabilistic PCA fitted by EM, with optional per-sample weights.

All-ones weights give the textbook algorithm.  Zero weights remove a sample
from the parameter updates while its posterior statistics and loss are
still computed.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .core import (
    DataError,
    FitConfig,
    FitReport,
    LatentStats,
    ModelParams,
    NumericalError,
    as_data_matrix,
    as_weights,
    check_latent_dim,
)
from .numerics import compute_latent_gram, gaussian_log_density
from .rng import SeededRNG


def weighted_mean(data, weights) -> np.ndarray:
    x = np.asarray(data, dtype=np.float64)
    wt = as_weights(weights, x.shape[0])
    total = float(np.sum(wt))
    if not total > 0:
        raise DataError("weights sum to zero; weighted mean undefined")
    return (wt @ x) / total


def init_params(data, latent_dim: int, rng: SeededRNG) -> ModelParams:
    """Sample mean, N(0, 1/M) loadings drawn from ``rng``, unit noise variance."""
    x = as_data_matrix(data)
    n, d = x.shape
    m = check_latent_dim(latent_dim, d)
    if n < 2:
        raise DataError("need at least two samples")
    mu = weighted_mean(x, np.ones(n))
    w = rng.standard_normal((d, m)) / math.sqrt(m)
    return ModelParams(mu, w, 1.0)


def e_step(data, params: ModelParams, weights=None) -> LatentStats:
    """Posterior moments for every row.

    ``weights`` is accepted for symmetry with :func:`m_step`; statistics are
    computed for all rows regardless.
    """
    x = np.asarray(data, dtype=np.float64)
    gram = compute_latent_gram(params)
    r = x - params.mu
    ez = gram.solve(params.w.T @ r.T).T  # N×M
    cov = params.sigma2 * gram.inverse()
    cov = 0.5 * (cov + cov.T)
    ezz = cov[None, :, :] + ez[:, :, None] * ez[:, None, :]
    return LatentStats(ez, ezz)


def m_step(data, stats: LatentStats, weights, mu, sigma2_floor: float = 1e-9):
    """Weighted re-estimation of the loadings and noise variance.

    Rows with zero weight are dropped before any arithmetic, so their values
    cannot influence the result.
    """
    x = np.asarray(data, dtype=np.float64)
    wt = as_weights(weights, x.shape[0])
    keep = np.flatnonzero(wt > 0)
    if keep.size == 0:
        raise DataError("all weights are zero")
    wk = wt[keep]
    r = x[keep] - mu
    ez = stats.ez[keep]
    total = float(np.sum(wk))
    d = x.shape[1]

    rzt = (r * wk[:, None]).T @ ez  # D×M: sum_n w_n r_n E[z_n]^T
    szz = np.einsum("n,nij->ij", wk, stats.ezz[keep])
    szz = 0.5 * (szz + szz.T)
    try:
        factor = cho_factor(szz, lower=True, check_finite=True)
    except (LinAlgError, ValueError) as exc:
        raise NumericalError(
            f"weighted second-moment matrix is singular ({keep.size} active samples)"
        ) from exc
    w_new = cho_solve(factor, rzt.T, check_finite=False).T

    sq = float(np.sum(wk * np.einsum("ij,ij->i", r, r)))
    trace_term = float(np.sum(szz * (w_new.T @ w_new)))
    cross = float(np.sum(w_new * rzt))
    sigma2 = (sq + trace_term - 2.0 * cross) / (d * total)
    if not math.isfinite(sigma2):
        raise NumericalError("noise variance update is not finite")
    return w_new, max(sigma2, sigma2_floor)


def em_step(data, params: ModelParams, weights, sigma2_floor: float = 1e-9) -> ModelParams:
    """One (E-step, M-step) pair with the mean held fixed."""
    stats = e_step(data, params, weights)
    w_new, sigma2 = m_step(data, stats, weights, params.mu, sigma2_floor)
    return ModelParams(params.mu, w_new, sigma2)


def per_sample_losses(data, params: ModelParams) -> np.ndarray:
    """Negative log-likelihood of every row under the marginal N(mu, C)."""
    x = np.atleast_2d(np.asarray(data, dtype=np.float64))
    gram = compute_latent_gram(params)
    return -gaussian_log_density(params, gram, x)


def log_likelihood(data, params: ModelParams, weights=None) -> float:
    losses = per_sample_losses(data, params)
    if weights is None:
        return -float(np.sum(losses))
    return -float(np.sum(np.asarray(weights, dtype=np.float64) * losses))


def relative_change(old: float, new: float) -> float:
    return abs(new - old) / (abs(old) + 1e-12)


def fit_ppca(data, config: FitConfig, rng: SeededRNG):
    """Plain EM fit on all samples.

    One warm-start EM pair is followed by up to ``config.max_em_iters``
    more, stopping when the relative change of the total log-likelihood
    drops below ``config.rel_tol``.  Returns ``(params, report)``.
    """
    x = as_data_matrix(data)
    n = x.shape[0]
    ones = np.ones(n)
    floor = config.sigma2_floor
    params = init_params(x, config.latent_dim, rng)
    params = em_step(x, params, ones, floor)
    value = float(np.sum(ones * per_sample_losses(x, params)))
    trace = [-value]
    report = FitReport(method="ppca", inlier_count_trace=[n], em_iterations=1)
    report.stop_reason = "max_iters"
    for _ in range(config.max_em_iters):
        params = em_step(x, params, ones, floor)
        new = float(np.sum(ones * per_sample_losses(x, params)))
        trace.append(-new)
        report.em_iterations += 1
        if relative_change(value, new) < config.rel_tol:
            report.converged = True
            report.stop_reason = "objective"
            break
        value = new
    report.objective_trace = [trace]
    report.inner_iterations = report.em_iterations
    return params, report


def transform(data, params: ModelParams) -> np.ndarray:
    """Posterior means E[z | x] = M^{-1} W^T (x - mu), one row per sample."""
    x = np.atleast_2d(np.asarray(data, dtype=np.float64))
    if x.shape[1] != params.dim:
        raise DataError(f"data has {x.shape[1]} columns, model expects {params.dim}")
    gram = compute_latent_gram(params)
    return gram.solve(params.w.T @ (x - params.mu).T).T


def reconstruct_latent(z, params: ModelParams) -> np.ndarray:
    return np.atleast_2d(z) @ params.w.T + params.mu


def reconstruct(data, params: ModelParams) -> np.ndarray:
    return reconstruct_latent(transform(data, params), params)
