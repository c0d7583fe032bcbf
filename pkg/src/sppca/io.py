"""CSV and JSON interchange.

Floats are written with ``repr`` (shortest round-trip form), so a save/load
cycle reproduces every value bit for bit.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .baseline_pca import PcaModel
from .core import DataError, DataMatrix, ModelFormatError, ModelParams

FORMAT_VERSION = 1


def load_csv(path, has_header: bool = False) -> DataMatrix:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    columns = None
    start = 0
    if has_header:
        if not lines:
            raise DataError(f"{path}: no rows")
        columns = tuple(c.strip() for c in lines[0].split(","))
        start = 1
    rows = []
    width = len(columns) if columns is not None else None
    for lineno in range(start, len(lines)):
        line = lines[lineno].rstrip("\r")
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise DataError(
                f"{path}: row {lineno + 1} has {len(cells)} columns, expected {width}"
            )
        row = []
        for j, cell in enumerate(cells):
            try:
                x = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {lineno + 1}, column {j + 1}: not a number: {cell!r}"
                ) from None
            if not math.isfinite(x):
                raise DataError(f"{path}: row {lineno + 1}, column {j + 1}: non-finite value")
            row.append(x)
        rows.append(row)
    if not rows:
        raise DataError(f"{path}: no rows")
    return DataMatrix(np.array(rows, dtype=np.float64), columns)


def _format_row(row) -> str:
    return ",".join(repr(float(x)) for x in row)


def save_csv(data, path, columns=None) -> None:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(-1, 1)
    if columns is None and isinstance(data, DataMatrix):
        columns = data.columns
    lines = []
    if columns is not None:
        lines.append(",".join(columns))
    lines.extend(_format_row(r) for r in x)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def save_labels(labels, path) -> None:
    Path(path).write_text(
        "".join(f"{int(bool(b))}\n" for b in labels), encoding="utf-8"
    )


def load_labels(path) -> np.ndarray:
    vals = load_csv(path).values
    if vals.shape[1] != 1:
        raise DataError(f"{path}: label file must have one column")
    return vals[:, 0] != 0


def model_to_dict(params: ModelParams, method: str = "ppca") -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "method": method,
        "latent_dim": params.latent_dim,
        "mu": params.mu.tolist(),
        "w": params.w.tolist(),
        "sigma2": params.sigma2,
    }


def pca_to_dict(model: PcaModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "method": "pca",
        "latent_dim": model.latent_dim,
        "mean": model.mean.tolist(),
        "components": model.components.tolist(),
        "eigenvalues": model.eigenvalues.tolist(),
    }


def _write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def save_model(params, path, method: str | None = None) -> None:
    if isinstance(params, PcaModel):
        _write_json(pca_to_dict(params), path)
    else:
        _write_json(model_to_dict(params, method or "ppca"), path)


def _require(d: dict, key: str):
    if key not in d:
        raise ModelFormatError(f"model file is missing key {key!r}")
    return d[key]


def _matrix(rows, name: str) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ModelFormatError(f"{name!r} must be a non-empty array of arrays")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise ModelFormatError(f"rows of {name!r} have unequal lengths {sorted(lengths)}")
    return np.array(rows, dtype=np.float64)


def model_from_dict(d: dict):
    """Build ModelParams (or a PcaModel for ``method == "pca"``) from a parsed file."""
    if not isinstance(d, dict):
        raise ModelFormatError("model file must hold a JSON object")
    version = _require(d, "format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unknown format_version {version!r}")
    m = _require(d, "latent_dim")
    if not isinstance(m, int) or m < 1:
        raise ModelFormatError(f"latent_dim must be a positive integer, got {m!r}")
    if d.get("method") == "pca":
        mean = np.array(_require(d, "mean"), dtype=np.float64)
        comps = _matrix(_require(d, "components"), "components")
        eig = np.array(_require(d, "eigenvalues"), dtype=np.float64)
        if comps.shape != (mean.shape[0], m) or eig.shape != (m,):
            raise ModelFormatError("pca model arrays disagree with latent_dim/mean")
        return PcaModel(mean, comps, eig)
    mu = _require(d, "mu")
    if not isinstance(mu, list):
        raise ModelFormatError("'mu' must be an array")
    mu = np.array(mu, dtype=np.float64)
    w = _matrix(_require(d, "w"), "w")
    sigma2 = _require(d, "sigma2")
    if not isinstance(sigma2, (int, float)) or isinstance(sigma2, bool):
        raise ModelFormatError("'sigma2' must be a number")
    if not sigma2 > 0:
        raise ModelFormatError(f"sigma2 must be positive, got {sigma2}")
    if w.shape[1] != m:
        raise ModelFormatError(f"'w' has {w.shape[1]} columns but latent_dim is {m}")
    if w.shape[0] != mu.shape[0]:
        raise ModelFormatError(f"'w' has {w.shape[0]} rows but 'mu' has length {mu.shape[0]}")
    try:
        return ModelParams(mu, w, float(sigma2))
    except DataError as exc:
        raise ModelFormatError(str(exc)) from exc


def load_any_model(path):
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_dict(d)


def load_model(path) -> ModelParams:
    model = load_any_model(path)
    if not isinstance(model, ModelParams):
        raise ModelFormatError(f"{path} holds a PCA model, not PPCA parameters")
    return model


def save_json(obj, path) -> None:
    _write_json(obj, path)
