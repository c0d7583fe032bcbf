"""Domain types shared across the package."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np


class SppcaError(Exception):
    """Base class for errors raised by this package."""


class DataError(SppcaError, ValueError):
    """Malformed or inconsistent input data."""


class ModelFormatError(DataError):
    """A model file that cannot be turned into valid parameters."""


class NumericalError(SppcaError, ArithmeticError):
    """A factorization or solve broke down (degenerate selection, sigma2 collapse)."""


def as_data_matrix(data, name: str = "data") -> np.ndarray:
    """Return ``data`` as a finite float64 N×D array, raising DataError otherwise."""
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise DataError(f"{name} must be a non-empty 2-D matrix, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        bad = np.argwhere(~np.isfinite(x))[0]
        raise DataError(f"{name} has a non-finite entry at row {bad[0]}, column {bad[1]}")
    return x


@dataclass(frozen=True)
class DataMatrix:
    """N×D observations (rows are samples) with optional column names."""

    values: np.ndarray
    columns: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        vals = as_data_matrix(self.values)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.columns is not None and len(self.columns) != vals.shape[1]:
            raise DataError(
                f"{len(self.columns)} column names for {vals.shape[1]} columns"
            )

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True)
class ModelParams:
    """PPCA parameters: data mean ``mu`` (D,), loadings ``w`` (D, M), noise ``sigma2``."""

    mu: np.ndarray
    w: np.ndarray
    sigma2: float

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64)
        w = np.array(self.w, dtype=np.float64)
        if mu.ndim != 1:
            raise DataError(f"mu must be a vector, got shape {mu.shape}")
        if w.ndim != 2 or w.shape[0] != mu.shape[0]:
            raise DataError(f"w must have shape ({mu.shape[0]}, M), got {w.shape}")
        if not 1 <= w.shape[1]:
            raise DataError("latent dimension must be at least 1")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(w))):
            raise DataError("model parameters must be finite")
        sigma2 = float(self.sigma2)
        if not (np.isfinite(sigma2) and sigma2 > 0):
            raise DataError(f"sigma2 must be positive and finite, got {sigma2}")
        mu.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "sigma2", sigma2)

    @property
    def dim(self) -> int:
        return self.w.shape[0]

    @property
    def latent_dim(self) -> int:
        return self.w.shape[1]

    def replace(self, **changes) -> "ModelParams":
        fields = {"mu": self.mu, "w": self.w, "sigma2": self.sigma2}
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class LatentStats:
    """Posterior moments: ``ez`` (N, M) holds E[z_n]; ``ezz`` (N, M, M) holds E[z_n z_n^T]."""

    ez: np.ndarray
    ezz: np.ndarray


@dataclass(frozen=True)
class SelectionState:
    """Inlier flags ``v``, the threshold ``beta`` and the per-sample losses behind them."""

    v: np.ndarray
    beta: float
    losses: np.ndarray

    @property
    def n_inliers(self) -> int:
        return int(np.sum(self.v))


LoopMode = Literal["nested", "outer_only"]


@dataclass(frozen=True)
class FitConfig:
    """Knobs for the EM and self-paced fits.

    ``beta_init`` overrides the median-loss initialisation of the threshold
    (``math.inf`` admits every sample, reducing the self-paced fit to PPCA).
    ``stop_on_stable_selection`` ends the outer loop once a threshold increase
    admits no new sample.
    """

    latent_dim: int
    eta: float = 1.1
    inner_max_iters: int = 50
    outer_max_iters: int = 100
    em_iters_per_v_update: int = 1
    rel_tol: float = 1e-6
    seed: int = 0
    loop_mode: LoopMode = "nested"
    sigma2_floor: float = 1e-9
    beta_init: Optional[float] = None
    stop_on_stable_selection: bool = True

    def __post_init__(self):
        if int(self.latent_dim) < 1:
            raise ValueError(f"latent_dim must be >= 1, got {self.latent_dim}")
        if not self.eta > 1:
            raise ValueError(f"eta must be > 1, got {self.eta}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be > 0, got {self.rel_tol}")
        for name in ("inner_max_iters", "outer_max_iters", "em_iters_per_v_update"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.loop_mode not in ("nested", "outer_only"):
            raise ValueError(f"unknown loop_mode {self.loop_mode!r}")
        if not self.sigma2_floor > 0:
            raise ValueError("sigma2_floor must be > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def max_em_iters(self) -> int:
        """EM pairs plain PPCA may run after its warm-start pair."""
        return self.em_iters_per_v_update * self.inner_max_iters


@dataclass
class FitReport:
    """Trace of a fit.

    ``objective_trace`` holds one list per outer iteration; each starts with the
    objective at entry (after the threshold update) and gets one value per EM
    pair.  For plain PPCA there is a single list of total log-likelihoods.
    """

    method: str
    objective_trace: list[list[float]] = field(default_factory=list)
    beta_trace: list[float] = field(default_factory=list)
    inlier_count_trace: list[int] = field(default_factory=list)
    converged: bool = False
    outer_iterations: int = 0
    inner_iterations: int = 0
    em_iterations: int = 0
    inner_caps_hit: int = 0
    stop_reason: str = ""

    @property
    def flat_objective(self) -> list[float]:
        return [x for seg in self.objective_trace for x in seg]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FitReport":
        return cls(**d)


def check_latent_dim(latent_dim: int, dim: int, allow_full: bool = False) -> int:
    m = int(latent_dim)
    upper = dim if allow_full else dim - 1
    if not 1 <= m <= upper:
        bound = "<=" if allow_full else "<"
        raise DataError(f"latent_dim must satisfy 1 <= M {bound} D={dim}, got {m}")
    return m


def as_weights(weights: Sequence[float] | np.ndarray, n: int) -> np.ndarray:
    wt = np.asarray(weights, dtype=np.float64)
    if wt.shape != (n,):
        raise DataError(f"weights must have shape ({n},), got {wt.shape}")
    if not np.all(np.isfinite(wt)) or np.any(wt < 0):
        raise DataError("weights must be finite and non-negative")
    return wt
