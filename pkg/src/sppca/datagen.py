"""Synthetic data and contamination for the benchmark protocols.

Every function is a pure function of its arguments and the stream it is
handed.  Contaminating functions return ``(data, is_outlier)``.
"""

from __future__ import annotations

import math

import numpy as np

from .core import DataError, as_data_matrix
from .rng import SeededRNG

LINE_SLOPE = 0.8
LINE_INTERCEPT = 5.0
LINE_X_RANGE = (0.0, 150.0)
LINE_OUTLIER_BOX_Y = (-40.0, 160.0)
LINE_OUTLIER_MIN_OFFSET = 30.0


def _floor_count(fraction: float, n: int) -> int:
    # 0.29 * 100 == 28.999999999999996; absorb that rounding before the floor
    return int(math.floor(fraction * n + 1e-9))


def line_direction() -> np.ndarray:
    d = np.array([1.0, LINE_SLOPE])
    return d / np.linalg.norm(d)


def gen_line2d(
    n: int,
    outlier_count: int,
    rng: SeededRNG,
    noise_std: float = 3.0,
    min_offset: float = LINE_OUTLIER_MIN_OFFSET,
):
    """Points around y = 0.8 x + 5 with x ~ U(0, 150), plus appended gross outliers.

    Outliers are uniform in [0, 150] × [-40, 160], kept only if their vertical
    distance to the line exceeds ``min_offset``.
    """
    if n < 2:
        raise DataError("need n >= 2")
    if outlier_count < 0:
        raise DataError("outlier_count must be >= 0")
    lo, hi = LINE_X_RANGE
    xs = rng.uniform(lo, hi, size=n)
    eps = rng.normal(0.0, noise_std, size=n)
    clean = np.column_stack([xs, LINE_SLOPE * xs + LINE_INTERCEPT + eps])
    ylo, yhi = LINE_OUTLIER_BOX_Y
    outliers = []
    while len(outliers) < outlier_count:
        ox = rng.uniform(lo, hi)
        oy = rng.uniform(ylo, yhi)
        if abs(oy - LINE_SLOPE * ox - LINE_INTERCEPT) > min_offset:
            outliers.append((ox, oy))
    data = np.vstack([clean, np.array(outliers).reshape(-1, 2)])
    labels = np.zeros(n + outlier_count, dtype=bool)
    labels[n:] = True
    return data, labels


def gen_lowrank(n: int, d: int, rank: int, rng: SeededRNG, noise_scale: float = 0.01,
                return_factors: bool = False):
    """X = U V^T + noise_scale * E with U (n×rank), V (d×rank), E (n×d) standard normal.

    Draw order is U, V, E.
    """
    if not 1 <= rank <= min(n, d):
        raise DataError(f"rank must be in [1, min(n, d)] = [1, {min(n, d)}], got {rank}")
    u = rng.standard_normal((n, rank))
    v = rng.standard_normal((d, rank))
    e = rng.standard_normal((n, d))
    x = u @ v.T + noise_scale * e
    if return_factors:
        return x, (u, v, e)
    return x


def inject_gaussian_outliers(data, fraction: float, rng: SeededRNG, cov_scale: float = 5.0,
                             mean: float = 1.0, mode: str = "replace"):
    """Replace floor(fraction * N) random rows by N(mean * 1, cov_scale * I) draws.

    ``mode="append"`` adds that many rows instead.
    """
    x = as_data_matrix(data).copy()
    if not 0 <= fraction < 1:
        raise DataError(f"fraction must lie in [0, 1), got {fraction}")
    n, d = x.shape
    k = _floor_count(fraction, n)
    if mode == "replace":
        rows = rng.choice(n, k)
        x[rows] = mean + math.sqrt(cov_scale) * rng.standard_normal((k, d))
        labels = np.zeros(n, dtype=bool)
        labels[rows] = True
        return x, labels
    if mode == "append":
        extra = mean + math.sqrt(cov_scale) * rng.standard_normal((k, d))
        labels = np.concatenate([np.zeros(n, dtype=bool), np.ones(k, dtype=bool)])
        return np.vstack([x, extra]), labels
    raise DataError(f"unknown mode {mode!r}")


def inject_uniform_outliers(data, count: int, rng: SeededRNG, mode: str = "append"):
    """Rows whose feature j is U(min_j, max_j) over the input's column range."""
    x = as_data_matrix(data).copy()
    if count < 0:
        raise DataError("count must be >= 0")
    n, d = x.shape
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    fresh = lo + (hi - lo) * rng.random((count, d))
    if mode == "append":
        labels = np.concatenate([np.zeros(n, dtype=bool), np.ones(count, dtype=bool)])
        return np.vstack([x, fresh]), labels
    if mode == "replace":
        if count > n:
            raise DataError(f"cannot replace {count} of {n} rows")
        rows = rng.choice(n, count)
        x[rows] = fresh
        labels = np.zeros(n, dtype=bool)
        labels[rows] = True
        return x, labels
    raise DataError(f"unknown mode {mode!r}")


def occlude_blocks(data, image_side: int, block_side: int, count: int, rng: SeededRNG):
    """Overwrite a random square of salt-and-pepper pixels (0 or 255) in ``count`` rows.

    Rows are row-major ``image_side × image_side`` images.
    """
    x = as_data_matrix(data).copy()
    n, d = x.shape
    if image_side * image_side != d:
        raise DataError(f"rows have {d} pixels, not {image_side}^2 = {image_side ** 2}")
    if not 0 <= block_side <= image_side:
        raise DataError("block_side must lie in [0, image_side]")
    if not 0 <= count <= n:
        raise DataError(f"cannot occlude {count} of {n} rows")
    labels = np.zeros(n, dtype=bool)
    if block_side == 0 or count == 0:
        return x, labels
    rows = rng.choice(n, count)
    span = image_side - block_side + 1
    for row in rows:
        top = rng.integer_below(span)
        left = rng.integer_below(span)
        dots = np.where(rng.random((block_side, block_side)) < 0.5, 0.0, 255.0)
        img = x[row].reshape(image_side, image_side)
        img[top:top + block_side, left:left + block_side] = dots
        labels[row] = True
    return x, labels


def train_test_split(data, train_fraction: float, rng: SeededRNG, return_indices: bool = False):
    x = as_data_matrix(data)
    n = x.shape[0]
    if not 0 < train_fraction < 1:
        raise DataError("train_fraction must lie in (0, 1)")
    k = _floor_count(train_fraction, n)
    if k < 1 or k >= n:
        raise DataError(f"splitting {n} rows at {train_fraction} leaves a side empty")
    perm = rng.permutation(n)
    train, test = x[perm[:k]], x[perm[k:]]
    if return_indices:
        return train, test, perm[:k], perm[k:]
    return train, test
