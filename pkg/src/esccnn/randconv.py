"""Random 1-D convolution filters and their pooled feature maps.

A filter with ``K_m`` weights slides over a window of length ``T`` (stride 1),
passes through a sigmoid, and the resulting map is average-pooled with a
stride-1 window of ``K_p``. The pooled map is prefixed with a constant column,
giving ``T - K_m - K_p + 3`` feature columns per filter.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# sigmoid outputs are kept strictly inside (0, 1) even when saturated
_SIG_LO = np.finfo(float).tiny
_SIG_HI = np.nextafter(1.0, 0.0)


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class ConvShape:
    T: int
    K_m: int
    K_p: int

    def __post_init__(self):
        if self.K_m < 1 or self.K_p < 1:
            raise ShapeError(f"kernel sizes must be >= 1 (K_m={self.K_m}, K_p={self.K_p})")
        if self.pooled_len < 1:
            raise ShapeError(
                f"T={self.T} too small for K_m={self.K_m}, K_p={self.K_p}: "
                f"pooled length {self.pooled_len} < 1 (need T >= K_m + K_p - 1)")

    @property
    def K(self) -> int:
        return self.K_m + self.K_p

    @property
    def map_len(self) -> int:
        return self.T - self.K_m + 1

    @property
    def pooled_len(self) -> int:
        return self.T - self.K + 2

    @property
    def feature_cols(self) -> int:
        return self.pooled_len + 1


def derive_shape(T: int, K_p: int = 3, K_m: int | None = None) -> ConvShape:
    """Shape for embedding dimension T; K_m defaults to floor(T / 4)."""
    if T < 4:
        raise ShapeError(f"T must be >= 4, got {T}")
    if K_m is None:
        K_m = T // 4
    return ConvShape(T=T, K_m=K_m, K_p=K_p)


@dataclass(frozen=True)
class FilterCandidate:
    weights: np.ndarray
    bias: float
    lam: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        if w.size < 1:
            raise ShapeError("filter needs at least one weight")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def K_m(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class PooledFeatures:
    matrix: np.ndarray  # N x feature_cols, column 0 all ones
    shape: ConvShape


def stream(seed: int, *counters: int) -> np.random.Generator:
    """Independent generator keyed by a master seed and integer counters."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, counters)]))


def sample_candidates(S: int, K_m: int, lam: float, rng) -> list[FilterCandidate]:
    """S filters with weights and bias i.i.d. uniform on [-lam, lam]."""
    W, b = sample_candidate_arrays(S, K_m, lam, rng)
    return [FilterCandidate(W[s], b[s], lam) for s in range(S)]


def sample_candidate_arrays(S: int, K_m: int, lam: float, rng) -> tuple[np.ndarray, np.ndarray]:
    if S < 1:
        raise ValueError(f"S must be >= 1, got {S}")
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    P = rng.uniform(-lam, lam, size=(S, K_m + 1))
    return P[:, :K_m], P[:, K_m]


def sigmoid(z):
    """Logistic function; saturated outputs stay strictly inside (0, 1).

    exp(-z) may overflow to inf for very negative z, which yields 0 (then
    clipped), never NaN.
    """
    z = np.asarray(z, dtype=float)
    with np.errstate(over="ignore", under="ignore"):
        out = np.exp(-z)
    out += 1.0
    np.reciprocal(out, out=out)
    return np.clip(out, _SIG_LO, _SIG_HI, out=out)


def _check(W, inputs, shape: ConvShape):
    X = np.asarray(inputs, dtype=float)
    if X.ndim != 2 or X.shape[1] != shape.T:
        raise ShapeError(f"inputs must be N x {shape.T}, got {X.shape}")
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if W.shape[1] != shape.K_m:
        raise ShapeError(f"filter length {W.shape[1]} does not match K_m={shape.K_m}")
    return W, X


def _pool_into(out: np.ndarray, weights, biases, inputs, shape: ConvShape) -> np.ndarray:
    """Fill out (S x pooled_len x N) with pooled maps."""
    W, X = _check(weights, inputs, shape)
    N, L, P = X.shape[0], shape.map_len, shape.pooled_len
    # shifted[k, t, n] = x_{t+k} of sample n
    shifted = np.stack([X[:, k:k + L].T for k in range(shape.K_m)]).reshape(shape.K_m, L * N)
    z = W @ shifted
    z += np.asarray(biases, dtype=float).reshape(-1, 1)
    m = sigmoid(z).reshape(W.shape[0], L, N)
    # stride-1 average pooling, summed left to right
    np.copyto(out, m[:, 0:P])
    for k in range(1, shape.K_p):
        out += m[:, k:k + P]
    out /= shape.K_p
    return out


def feature_stack(weights, biases, inputs, shape: ConvShape, constant: bool = True) -> np.ndarray:
    """Batch features laid out S x columns x N (column 0 constant if requested)."""
    S, N = np.atleast_2d(weights).shape[0], np.shape(inputs)[0]
    if not constant:
        return _pool_into(np.empty((S, shape.pooled_len, N)), weights, biases, inputs, shape)
    F = np.empty((S, shape.feature_cols, N))
    F[:, 0] = 1.0
    _pool_into(F[:, 1:], weights, biases, inputs, shape)
    return F


def pooled_maps(weights, biases, inputs, shape: ConvShape) -> np.ndarray:
    """S x N x pooled_len pooled maps without the constant column."""
    return feature_stack(weights, biases, inputs, shape, constant=False).transpose(0, 2, 1)


def extract_features_batch(weights, biases, inputs, shape: ConvShape) -> np.ndarray:
    """S x N x feature_cols design matrices, constant column first."""
    return feature_stack(weights, biases, inputs, shape).transpose(0, 2, 1)


def extract_features(c: FilterCandidate, inputs, shape: ConvShape) -> PooledFeatures:
    F = extract_features_batch(c.weights[None, :], np.array([c.bias]), inputs, shape)[0]
    return PooledFeatures(np.ascontiguousarray(F), shape)


def features_for(filters: Sequence[FilterCandidate], inputs, shape: ConvShape) -> np.ndarray:
    """S x N x feature_cols design matrices for a list of filters."""
    if not filters:
        return np.empty((0, np.shape(inputs)[0], shape.feature_cols))
    W = np.stack([f.weights for f in filters])
    b = np.array([f.bias for f in filters])
    return extract_features_batch(W, b, inputs, shape)
