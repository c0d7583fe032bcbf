"""Self-paced probabilistic PCA.

Samples enter the fit only while their negative log-likelihood is at most a
threshold ``beta``.  For fixed ``beta`` the inlier flags and the PPCA
parameters are updated alternately; the threshold then grows by a factor
``eta`` and the process repeats until the objective settles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DataError,
    FitConfig,
    FitReport,
    ModelParams,
    SelectionState,
    as_data_matrix,
)
from .ppca import em_step, init_params, per_sample_losses, relative_change, weighted_mean
from .rng import SeededRNG


@dataclass(frozen=True)
class SpFitResult:
    params: ModelParams
    selection: SelectionState
    report: FitReport


def objective(losses, v, beta: float) -> float:
    """sum_n v_n l_n - beta sum_n v_n."""
    losses = np.asarray(losses, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if losses.shape != v.shape:
        raise DataError(f"losses {losses.shape} and v {v.shape} differ in shape")
    count = float(np.sum(v))
    data_term = float(np.sum(v * losses))
    if count == 0:
        return data_term
    return data_term - beta * count


def _progress(losses, v, beta: float) -> float:
    # An infinite threshold only adds the constant -inf * N; track the data term.
    if math.isinf(beta):
        return float(np.sum(v * losses))
    return objective(losses, v, beta)


def select_inliers(losses, beta: float) -> np.ndarray:
    """v_n = 1 where l_n <= beta.  An empty selection keeps the lowest-loss sample."""
    losses = np.asarray(losses, dtype=np.float64)
    v = (losses <= beta).astype(np.float64)
    if not v.any():
        v[int(np.argmin(losses))] = 1.0
    return v


def init_beta(data, latent_dim: int, rng: SeededRNG, sigma2_floor: float = 1e-9):
    """Median loss after a single unweighted EM pair from a random start.

    Returns ``(beta0, params)``; the parameters are the warm start of the
    self-paced loop.
    """
    x = as_data_matrix(data)
    params = init_params(x, latent_dim, rng)
    params = em_step(x, params, np.ones(x.shape[0]), sigma2_floor)
    losses = per_sample_losses(x, params)
    return float(np.median(losses)), params


def grow_beta(beta: float, eta: float) -> float:
    """eta * beta for positive beta; for beta <= 0 the same step |beta| (eta - 1) upward."""
    if beta > 0 or math.isinf(beta):
        return eta * beta
    step = abs(beta) if beta != 0 else 1.0
    return beta + (eta - 1.0) * step


def fit_sp_ppca(data, config: FitConfig, rng: SeededRNG) -> SpFitResult:
    x = as_data_matrix(data)
    n = x.shape[0]
    if n < 2:
        raise DataError("need at least two samples")
    floor = config.sigma2_floor
    tol = config.rel_tol
    beta0, params = init_beta(x, config.latent_dim, rng, floor)
    beta = beta0 if config.beta_init is None else float(config.beta_init)
    losses = per_sample_losses(x, params)

    report = FitReport(method="sp-ppca", em_iterations=1, stop_reason="max_iters")
    inner_budget = 1 if config.loop_mode == "outer_only" else config.inner_max_iters
    prev_value = None
    prev_v = None

    for _ in range(config.outer_max_iters):
        report.outer_iterations += 1
        report.beta_trace.append(beta)
        value = _progress(losses, select_inliers(losses, beta), beta)
        segment = [value]
        inner_done = False
        for _ in range(inner_budget):
            report.inner_iterations += 1
            v = select_inliers(losses, beta)
            report.inlier_count_trace.append(int(v.sum()))
            params = params.replace(mu=weighted_mean(x, v))
            for _ in range(config.em_iters_per_v_update):
                params = em_step(x, params, v, floor)
                losses = per_sample_losses(x, params)
                report.em_iterations += 1
                new_value = _progress(losses, v, beta)
                segment.append(new_value)
                change = relative_change(value, new_value)
                value = new_value
                if change < tol:
                    inner_done = True
                    break
            if inner_done:
                break
        if config.loop_mode == "nested" and not inner_done:
            report.inner_caps_hit += 1
        report.objective_trace.append(segment)

        v_end = select_inliers(losses, beta)
        same_v = prev_v is not None and np.array_equal(v_end, prev_v)
        if prev_value is not None and relative_change(prev_value, value) < tol:
            report.stop_reason = "objective"
        elif same_v and v_end.all():
            report.stop_reason = "all_included"
        elif same_v and config.stop_on_stable_selection:
            report.stop_reason = "stable_selection"
        if report.stop_reason != "max_iters":
            report.converged = True
            break
        prev_value, prev_v = value, v_end
        beta = grow_beta(beta, config.eta)

    beta_used = report.beta_trace[-1]
    selection = SelectionState(select_inliers(losses, beta_used), beta_used, losses)
    return SpFitResult(params, selection, report)
