"""Dense brute-force transcriptions used as independent oracles.

These form the full D×D covariance and invert it directly, which is exactly
what the library code avoids.
"""

import math

import numpy as np


def dense_cov(w, sigma2):
    return w @ w.T + sigma2 * np.eye(w.shape[0])


def dense_log_density(x, mu, w, sigma2):
    c = dense_cov(w, sigma2)
    d = c.shape[0]
    r = x - mu
    _, logdet = np.linalg.slogdet(c)
    return -0.5 * (d * math.log(2 * math.pi) + logdet + r @ np.linalg.inv(c) @ r)


def dense_posterior(x, mu, w, sigma2):
    """Bayes rule on the joint Gaussian of (z, x): returns (mean, second moment)."""
    c = dense_cov(w, sigma2)
    cinv = np.linalg.inv(c)
    mean = w.T @ cinv @ (x - mu)
    cov = np.eye(w.shape[1]) - w.T @ cinv @ w
    return mean, cov + np.outer(mean, mean)


def dense_m_step(x, ez, ezz, weights, mu):
    """Loop-by-sample transcription of the weighted loading and noise updates."""
    n, d = x.shape
    m = ez.shape[1]
    a = np.zeros((d, m))
    b = np.zeros((m, m))
    for i in range(n):
        a += weights[i] * np.outer(x[i] - mu, ez[i])
        b += weights[i] * ezz[i]
    w_new = a @ np.linalg.inv(b)
    acc = 0.0
    for i in range(n):
        r = x[i] - mu
        acc += weights[i] * (
            r @ r + np.trace(ezz[i] @ w_new.T @ w_new) - 2 * ez[i] @ w_new.T @ r
        )
    return w_new, acc / (d * np.sum(weights))


def random_model(rng, d, m, sigma_range=(0.2, 2.0)):
    mu = rng.normal(size=d)
    w = rng.normal(size=(d, m))
    sigma2 = rng.uniform(*sigma_range)
    return mu, w, sigma2


def brute_force_objective_min(losses, beta):
    """Minimum of sum v_n (l_n - beta) over all binary v, by enumeration."""
    n = len(losses)
    best = math.inf
    for mask in range(1 << n):
        v = np.array([(mask >> i) & 1 for i in range(n)], dtype=float)
        val = float(np.sum(v * losses) - beta * np.sum(v))
        best = min(best, val)
    return best
