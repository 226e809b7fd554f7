"""Series generation, CSV ingestion, min-max scaling and MIMO windowing."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import numpy as np


class DataError(ValueError):
    """Raised for malformed series, files or sizing problems."""


@dataclass(frozen=True)
class RawSeries:
    values: np.ndarray
    name: str = "series"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise DataError(f"series {self.name!r} contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ScalerParams:
    """Affine map of [min, max] onto [-1, 1]. Values outside are not clipped."""

    min: float
    max: float

    def __post_init__(self):
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise DataError("scaler bounds must be finite")
        if not self.max > self.min:
            raise DataError(f"degenerate scaler: max ({self.max}) must exceed min ({self.min})")

    def transform(self, v):
        v = np.asarray(v, dtype=float)
        return -1.0 + 2.0 * (v - self.min) / (self.max - self.min)

    def inverse_transform(self, s):
        s = np.asarray(s, dtype=float)
        return self.min + (s + 1.0) * (self.max - self.min) / 2.0


@dataclass(frozen=True)
class SupervisedWindows:
    inputs: np.ndarray   # N x T
    targets: np.ndarray  # N x H

    @property
    def N(self) -> int:
        return self.inputs.shape[0]

    @property
    def T(self) -> int:
        return self.inputs.shape[1]

    @property
    def H(self) -> int:
        return self.targets.shape[1]

    def __getitem__(self, idx) -> "SupervisedWindows":
        return SupervisedWindows(self.inputs[idx], self.targets[idx])


@dataclass(frozen=True)
class SplitWindows:
    train: SupervisedWindows
    test: SupervisedWindows


def generate_ar1(n: int = 500, alpha: float = 0.01, noise_halfwidth: float = 0.25,
                 x0: float = 0.0, seed: int = 0) -> RawSeries:
    """Random walk with drift: x_t = alpha + x_{t-1} + eps_t, eps_t ~ U(-hw, hw).

    Returns x_1..x_n (x0 itself is not part of the series).
    """
    for name, val in (("alpha", alpha), ("noise_halfwidth", noise_halfwidth), ("x0", x0)):
        if not math.isfinite(val):
            raise DataError(f"{name} must be finite, got {val}")
    if n < 1:
        raise DataError(f"n must be >= 1, got {n}")
    if noise_halfwidth < 0:
        raise DataError(f"noise_halfwidth must be >= 0, got {noise_halfwidth}")
    rng = np.random.default_rng(seed)
    eps = rng.uniform(-noise_halfwidth, noise_halfwidth, size=n)
    # unrolled recursion; keeps the zero-noise case exactly x0 + alpha * t
    t = np.arange(1, n + 1)
    x = x0 + alpha * t + np.cumsum(eps)
    return RawSeries(x, name=f"ar1(seed={seed})")


def _parse_float(cell: str, row: int, path) -> float:
    try:
        v = float(cell)
    except ValueError:
        raise DataError(f"{path}: row {row}: non-numeric cell {cell!r}") from None
    if not math.isfinite(v):
        raise DataError(f"{path}: row {row}: non-finite value {cell!r}")
    return v


def load_csv(path, column: str | int = 0) -> RawSeries:
    """Read one numeric column from a comma-separated file.

    A first row is treated as a header when the selected cell does not parse as
    a number. Rows are numbered from 1 as they appear in the file.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"{path}: file not found")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh)]
    numbered = [(i + 1, r) for i, r in enumerate(rows) if any(c.strip() for c in r)]
    if not numbered:
        raise DataError(f"{path}: empty file")

    first_no, first = numbered[0]
    header = None
    try:
        probe = first[column if isinstance(column, int) else 0]
        float(probe)
    except (ValueError, IndexError):
        header = [c.strip() for c in first]
    if isinstance(column, str) and not column.isdigit():
        if header is None:
            raise DataError(f"{path}: column {column!r} requested but file has no header row")
        if column not in header:
            raise DataError(f"{path}: missing column {column!r}; header is {header}")
        idx = header.index(column)
    else:
        idx = int(column)
    body = numbered[1:] if header is not None else numbered
    if not body:
        raise DataError(f"{path}: no data rows")

    vals = []
    for row_no, r in body:
        if idx >= len(r):
            raise DataError(f"{path}: row {row_no}: missing column index {idx}")
        vals.append(_parse_float(r[idx].strip(), row_no, path))
    name = header[idx] if header is not None else f"{path.stem}[{idx}]"
    return RawSeries(np.array(vals), name=name)


def train_length(series_length: int, T: int, H: int) -> int:
    """Number of raw observations covered by the training windows."""
    n_windows = series_length - T - H + 1
    return (2 * n_windows) // 3 + T + H - 1


def fit_scaler(series: RawSeries, fit_range: Literal["train-only", "full-series"] = "train-only",
               T: int | None = None, H: int | None = None) -> ScalerParams:
    """Min-max scaler fitted either on the observations touched by training windows
    (needs T and H) or on the whole series."""
    v = series.values
    if fit_range == "train-only":
        if T is None or H is None:
            raise DataError("train-only scaling needs T and H to locate the training span")
        v = v[: train_length(len(series), T, H)]
    elif fit_range != "full-series":
        raise DataError(f"unknown fit_range {fit_range!r}")
    lo, hi = float(np.min(v)), float(np.max(v))
    if not hi > lo:
        raise DataError(f"degenerate scaler: series {series.name!r} is constant over the fit range")
    return ScalerParams(lo, hi)


def make_windows(series: RawSeries, scaler: ScalerParams, T: int, H: int) -> SupervisedWindows:
    if T < 1 or H < 1:
        raise DataError(f"T and H must be >= 1, got T={T}, H={H}")
    n = len(series)
    if n < T + H:
        raise DataError(f"series of length {n} too short: need at least T + H = {T + H}")
    s = scaler.transform(series.values)
    view = np.lib.stride_tricks.sliding_window_view(s, T + H)
    return SupervisedWindows(view[:, :T].copy(), view[:, T:].copy())


def split_two_thirds(w: SupervisedWindows) -> SplitWindows:
    if w.N < 3:
        raise DataError(f"need at least 3 windows to split, got {w.N}")
    cut = (2 * w.N) // 3
    return SplitWindows(w[:cut], w[cut:])
