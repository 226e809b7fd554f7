"""Forecast error measures, flattened over samples and horizons.

SMAPE follows the unscaled form |y - yhat| / |y + yhat| (no factor 2).
Denominators are floored at ``DENOM_FLOOR`` so zero crossings stay finite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DENOM_FLOOR = 1e-8


@dataclass(frozen=True)
class MetricTriple:
    mape: float
    smape: float
    rmse: float

    def as_dict(self) -> dict:
        return {"mape": self.mape, "smape": self.smape, "rmse": self.rmse}


def _pair(y, yhat):
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise ValueError(f"length mismatch: {y.size} targets vs {yhat.size} predictions")
    if y.size < 1:
        raise ValueError("metrics need at least one value")
    return y, yhat


def mape(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean(np.abs(y - yhat) / np.maximum(np.abs(y), DENOM_FLOOR)))


def smape(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean(np.abs(y - yhat) / np.maximum(np.abs(y + yhat), DENOM_FLOOR)))


def rmse(y, yhat) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def evaluate(y, yhat) -> MetricTriple:
    return MetricTriple(mape(y, yhat), smape(y, yhat), rmse(y, yhat))
