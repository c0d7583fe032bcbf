"""Metrics and config-driven robustness experiments."""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import datagen
from .baseline_pca import fit_pca, pca_reconstruct
from .core import DataError, FitConfig, SppcaError, as_data_matrix
from .ppca import fit_ppca, reconstruct
from .rng import SeededRNG, derive_seed
from .sp_ppca import fit_sp_ppca

METHODS = ("pca", "ppca", "sp-ppca")
GENERATORS = ("line2d", "lowrank", "external-csv")
CONTAMINATIONS = ("none", "gaussian", "uniform", "occlusion")
SPEC_VERSION = 1


def reconstruction_error(x_test, x_hat) -> float:
    """||X - X_hat||_F / ||X||_F."""
    x = np.asarray(x_test, dtype=np.float64)
    xh = np.asarray(x_hat, dtype=np.float64)
    if x.shape != xh.shape:
        raise DataError(f"shape mismatch: {x.shape} vs {xh.shape}")
    denom = np.linalg.norm(x)
    if denom == 0:
        raise DataError("test matrix has zero norm")
    return float(np.linalg.norm(x - xh) / denom)


def _orthonormalize(a: np.ndarray, name: str) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    if a.shape[0] < a.shape[1]:
        a = a.T
    q, r = np.linalg.qr(a)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or diag.min() <= 1e-12 * max(diag.max(), 1e-300):
        raise DataError(f"{name} is rank deficient")
    return q


def principal_angles(a, b) -> np.ndarray:
    """Principal angles (radians, descending) between the column spans of ``a`` and ``b``."""
    qa = _orthonormalize(a, "a")
    qb = _orthonormalize(b, "b")
    if qa.shape[0] != qb.shape[0]:
        raise DataError("subspaces live in different ambient dimensions")
    if qa.shape[1] > qb.shape[1]:
        qa, qb = qb, qa
    cross = qa.T @ qb
    cos = np.sort(np.clip(np.linalg.svd(cross, compute_uv=False), 0.0, 1.0))[::-1]
    # arccos loses resolution near 0; small angles come from the sines instead
    sin = np.linalg.svd(qb - qa @ cross, compute_uv=False)
    sin = np.sort(np.clip(sin, 0.0, 1.0))[: cos.size]
    angles = np.where(cos > np.sqrt(0.5), np.arcsin(sin), np.arccos(cos))
    return np.sort(angles)[::-1]


def selection_metrics(labels, v) -> tuple[float, float]:
    """Precision and recall of ``v == 0`` as an outlier detector (0/0 counts as 1)."""
    truth = np.asarray(labels, dtype=bool)
    flagged = np.asarray(v) == 0
    if truth.shape != flagged.shape:
        raise DataError("labels and v differ in length")
    hit = int(np.sum(truth & flagged))
    n_flag = int(np.sum(flagged))
    n_true = int(np.sum(truth))
    precision = hit / n_flag if n_flag else 1.0
    recall = hit / n_true if n_true else 1.0
    return precision, recall


def normalize_method(name: str) -> str:
    canon = name.replace("_", "-").lower()
    if canon not in METHODS:
        raise DataError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return canon


@dataclass(frozen=True)
class ExperimentSpec:
    """One robustness experiment.

    ``contamination`` keys by kind:
    gaussian: fraction, cov_scale, mean, mode;
    uniform: count, mode;
    occlusion: image_side, block_side, count.
    """

    generator: str = "lowrank"
    methods: tuple[str, ...] = METHODS
    latent_dim: int = 3
    trials: int = 5
    seed: int = 0
    n: int = 100
    d: int = 20
    rank: int = 3
    noise_std: float = 3.0
    train_fraction: float = 0.7
    contamination: dict = field(default_factory=lambda: {"kind": "none"})
    fit: dict = field(default_factory=dict)
    data_path: Optional[str] = None
    train_path: Optional[str] = None
    test_path: Optional[str] = None
    has_header: bool = False

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise DataError(f"unknown generator {self.generator!r}")
        if not self.methods:
            raise DataError("methods must be non-empty")
        object.__setattr__(self, "methods", tuple(normalize_method(m) for m in self.methods))
        if int(self.trials) < 1:
            raise DataError("trials must be >= 1")
        kind = self.contamination.get("kind", "none")
        if kind not in CONTAMINATIONS:
            raise DataError(f"unknown contamination kind {kind!r}")
        if self.generator == "external-csv" and not (
            self.data_path or (self.train_path and self.test_path)
        ):
            raise DataError("external-csv needs data_path or both train_path and test_path")
        known = {f.name for f in dataclasses.fields(FitConfig)}
        extra = set(self.fit) - known
        if extra:
            raise DataError(f"unknown fit overrides: {sorted(extra)}")

    def fit_config(self) -> FitConfig:
        return FitConfig(latent_dim=self.latent_dim, **self.fit)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["methods"] = list(self.methods)
        d["spec_version"] = SPEC_VERSION
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        version = d.pop("spec_version", SPEC_VERSION)
        if version != SPEC_VERSION:
            raise DataError(f"unknown spec_version {version!r}")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise DataError(f"unknown experiment keys: {sorted(unknown)}")
        if "methods" in d:
            d["methods"] = tuple(d["methods"])
        return cls(**d)


@dataclass
class MethodResult:
    errors: list[float] = field(default_factory=list)
    precision: list[float] = field(default_factory=list)
    recall: list[float] = field(default_factory=list)
    seconds: list[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.errors))

    @property
    def std(self) -> float:
        # sample standard deviation; a single trial has no spread to estimate
        if len(self.errors) < 2:
            return 0.0
        return float(np.std(self.errors, ddof=1))


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    methods: dict[str, MethodResult]

    def mean(self, method: str) -> float:
        return self.methods[normalize_method(method)].mean

    def std(self, method: str) -> float:
        return self.methods[normalize_method(method)].std

    def to_dict(self, include_timings: bool = False) -> dict:
        out = {"spec": self.spec.to_dict(), "methods": {}}
        for name, res in self.methods.items():
            entry = {
                "errors": res.errors,
                "mean": res.mean,
                "std": res.std,
            }
            if res.precision:
                entry["precision"] = res.precision
                entry["recall"] = res.recall
            if include_timings:
                entry["seconds"] = res.seconds
            out["methods"][name] = entry
        return out


def _load_external(spec: ExperimentSpec, rng: SeededRNG):
    from .io import load_csv

    if spec.train_path and spec.test_path:
        train = load_csv(spec.train_path, spec.has_header).values
        test = load_csv(spec.test_path, spec.has_header).values
        return np.array(train), np.array(test)
    data = load_csv(spec.data_path, spec.has_header).values
    return datagen.train_test_split(data, spec.train_fraction, rng)


def make_trial_data(spec: ExperimentSpec, rng: SeededRNG):
    """(contaminated train, clean test, outlier labels for train) for one trial."""
    if spec.generator == "lowrank":
        x = datagen.gen_lowrank(spec.n, spec.d, spec.rank, rng)
        train, test = datagen.train_test_split(x, spec.train_fraction, rng)
    elif spec.generator == "line2d":
        x, _ = datagen.gen_line2d(spec.n, 0, rng, noise_std=spec.noise_std)
        train, test = datagen.train_test_split(x, spec.train_fraction, rng)
    else:
        train, test = _load_external(spec, rng)
    c = dict(spec.contamination)
    kind = c.pop("kind", "none")
    if kind == "none":
        return train, test, np.zeros(train.shape[0], dtype=bool)
    if kind == "gaussian":
        train, labels = datagen.inject_gaussian_outliers(
            train, c.get("fraction", 0.1), rng,
            cov_scale=c.get("cov_scale", 5.0), mean=c.get("mean", 1.0),
            mode=c.get("mode", "replace"),
        )
    elif kind == "uniform":
        train, labels = datagen.inject_uniform_outliers(
            train, int(c.get("count", 0)), rng, mode=c.get("mode", "append")
        )
    else:
        train, labels = datagen.occlude_blocks(
            train, int(c["image_side"]), int(c["block_side"]), int(c["count"]), rng
        )
    return train, test, labels


def fit_and_reconstruct(method: str, train, test, config: FitConfig, rng: SeededRNG):
    """Fit ``method`` on ``train``; returns (reconstruction of ``test``, inlier flags or None)."""
    if method == "pca":
        model = fit_pca(train, config.latent_dim)
        return pca_reconstruct(test, model), None
    if method == "ppca":
        params, _ = fit_ppca(train, config, rng)
        return reconstruct(test, params), None
    result = fit_sp_ppca(train, config, rng)
    return reconstruct(test, result.params), result.selection.v


def trial_seeds(spec: ExperimentSpec, trial: int) -> tuple[int, int]:
    """(data seed, fit seed) of a trial.  Every method of a trial shares the fit seed."""
    data_seed = derive_seed(spec.seed, trial)
    return data_seed, derive_seed(data_seed, 1)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    config = spec.fit_config()
    results = {m: MethodResult() for m in spec.methods}
    for t in range(spec.trials):
        data_seed, fit_seed = trial_seeds(spec, t)
        try:
            train, test, labels = make_trial_data(spec, SeededRNG(data_seed))
            train, test = as_data_matrix(train, "train"), as_data_matrix(test, "test")
            for m in spec.methods:
                start = time.perf_counter()
                x_hat, v = fit_and_reconstruct(m, train, test, config, SeededRNG(fit_seed))
                elapsed = time.perf_counter() - start
                res = results[m]
                res.errors.append(reconstruction_error(test, x_hat))
                res.seconds.append(elapsed)
                if v is not None:
                    p, r = selection_metrics(labels, v)
                    res.precision.append(p)
                    res.recall.append(r)
        except SppcaError as exc:
            raise type(exc)(f"trial {t}: {exc}") from exc
    return ExperimentResult(spec, results)


CSV_HEADER = ("kind", "method", "trial", "error", "std", "precision", "recall")


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def export_results(result: ExperimentResult, path, format: str = "csv",
                   include_timings: bool = False) -> None:
    """CSV: one row per (method, trial), then one summary row per method.  JSON: everything."""
    path = Path(path)
    if format == "json":
        path.write_text(
            json.dumps(result.to_dict(include_timings), indent=2) + "\n", encoding="utf-8"
        )
        return
    if format != "csv":
        raise DataError(f"unknown export format {format!r}")
    rows = []
    for name, res in result.methods.items():
        for t, err in enumerate(res.errors):
            p = res.precision[t] if res.precision else None
            r = res.recall[t] if res.recall else None
            rows.append(["trial", name, str(t), _fmt(err), "", _fmt(p), _fmt(r)])
    for name, res in result.methods.items():
        p = float(np.mean(res.precision)) if res.precision else None
        r = float(np.mean(res.recall)) if res.recall else None
        rows.append(["summary", name, "", _fmt(res.mean), _fmt(res.std), _fmt(p), _fmt(r)])
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        writer.writerows(rows)


def results_from_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def direction_error_deg(w, direction) -> float:
    """Angle in degrees between the first column of ``w`` and ``direction`` (sign-free)."""
    u = np.asarray(w, dtype=np.float64)[:, 0]
    u = u / np.linalg.norm(u)
    dvec = np.asarray(direction, dtype=np.float64)
    dvec = dvec / np.linalg.norm(dvec)
    return math.degrees(math.acos(min(1.0, abs(float(u @ dvec)))))
