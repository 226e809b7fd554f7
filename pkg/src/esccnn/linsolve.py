from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LsqSolution:
    coefficients: np.ndarray  # P x H
    residual: np.ndarray      # N x H, targets - design @ coefficients
    residual_sse: np.ndarray  # per horizon
    rank: int


def solve_lsq(design, targets) -> LsqSolution:
    """Minimum-norm least squares via SVD.

    Singular values below ``eps * max(N, P) * s_max`` are treated as zero, so
    rank-deficient designs are fine; the rank is reported. The residual is
    recomputed from the returned coefficients.
    """
    A = np.asarray(design, dtype=float)
    Y = np.asarray(targets, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"design must be 2-D, got shape {A.shape}")
    vector_target = Y.ndim == 1
    if vector_target:
        Y = Y[:, None]
    N, P = A.shape
    if N < 1 or P < 1:
        raise ValueError(f"design must be non-empty, got shape {A.shape}")
    if Y.shape[0] != N:
        raise ValueError(f"targets have {Y.shape[0]} rows, design has {N}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(Y))):
        raise ValueError("non-finite entries in least-squares inputs")
    rcond = np.finfo(float).eps * max(N, P)
    B, _, rank, _ = np.linalg.lstsq(A, Y, rcond=rcond)
    R = Y - A @ B
    sse = np.einsum("nh,nh->h", R, R)
    if vector_target:
        B, R = B[:, 0], R[:, 0]
    return LsqSolution(B, R, sse, int(rank))
