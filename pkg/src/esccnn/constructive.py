"""Incremental construction of random convolutional forecasters.

ESC-CNN adds one random filter per iteration, chosen from a candidate pool by
a filter score, and fits that filter's readout block (constant column
included) against the current residual only. Earlier readouts are never
revisited, so the prediction is a plain sum of per-filter contributions.

ES-CNN drops the selection (one random filter per iteration, always kept).
SC-CNN keeps the selection mechanism of SCN but collapses each filter to a
single summed feature and refits all output weights globally.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .baselines import DEFAULT_LAMBDAS, DEFAULT_RATES, MarginMode, stochastic_configuration
from .dataset import ScalerParams, SupervisedWindows
from .linsolve import solve_lsq
from .randconv import (
    ConvShape,
    FilterCandidate,
    PooledFeatures,
    derive_shape,
    extract_features_batch,
    feature_stack,
    features_for,
    pooled_maps,
    sample_candidate_arrays,
    stream,
)

ESC_STREAM = 0
ES_STREAM = 1
SC_STREAM = 4


class DegenerateCandidate(ValueError):
    pass


@dataclass(frozen=True)
class BuildConfig:
    C_max: int = 50
    epsilon: float = 0.0
    lambdas: tuple = DEFAULT_LAMBDAS
    rates: tuple = DEFAULT_RATES
    S: int = 300
    K_p: int = 3
    K_m: int | None = None  # None -> floor(T / 4)
    seed: int = 0
    es_lambda: float = 1.0
    u_g: float = 1.0
    margin_mode: MarginMode = "typeset"
    score_mode: str = "verbatim"  # verbatim | exact

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))
        object.__setattr__(self, "rates", tuple(float(v) for v in self.rates))
        if self.C_max < 1:
            raise ValueError(f"C_max must be >= 1, got {self.C_max}")
        if self.S < 1:
            raise ValueError(f"S must be >= 1, got {self.S}")
        if not self.lambdas or any(not lam > 0 for lam in self.lambdas):
            raise ValueError(f"lambdas must be non-empty and positive, got {self.lambdas}")
        if not self.rates or any(not 0 < r < 1 for r in self.rates):
            raise ValueError(f"rates must be non-empty and inside (0, 1), got {self.rates}")
        if self.score_mode not in ("verbatim", "exact"):
            raise ValueError(f"unknown score_mode {self.score_mode!r}")
        if not self.es_lambda > 0:
            raise ValueError(f"es_lambda must be > 0, got {self.es_lambda}")

    def shape_for(self, T: int) -> ConvShape:
        return derive_shape(T, self.K_p, self.K_m)


@dataclass(frozen=True)
class FilterScore:
    xi: float
    zeta_per_horizon: np.ndarray
    delta: float


@dataclass
class EscModel:
    filters: list[FilterCandidate]
    readouts: list[np.ndarray]  # each feature_cols x H
    shape: ConvShape
    H: int
    kind: str = "esc"
    scaler: ScalerParams | None = None
    build_log: list = field(default_factory=list)
    status: str = ""

    @property
    def C(self) -> int:
        return len(self.filters)

    def truncated(self, C: int) -> "EscModel":
        return replace(self, filters=self.filters[:C], readouts=self.readouts[:C],
                       build_log=self.build_log[:C])


@dataclass
class ScCnnModel:
    """One shared weight per filter on the summed pooled map; no bias."""

    filters: list[FilterCandidate]
    betas: np.ndarray  # C x H
    shape: ConvShape
    H: int
    kind: str = "sc"
    scaler: ScalerParams | None = None
    build_log: list = field(default_factory=list)
    status: str = ""

    @property
    def C(self) -> int:
        return len(self.filters)


def _scores(e: np.ndarray, F: np.ndarray, r: float):
    """Vectorised filter scores for a batch. F: S x P x N (columns first), e: N x H.

    Returns (xi: S, zeta: S x H, delta). Candidates with a zero-norm column
    get xi = -inf.
    """
    a = F @ e                                   # S x P x H
    norms = np.einsum("spn,spn->sp", F, F)
    delta = (1.0 - r) * float(np.sum(e * e))
    degenerate = np.any(norms <= 0, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    a2 = a * a
    direct = np.einsum("sph,sp->sh", a2, 1.0 / safe)
    # sum over ordered pairs i != j of a_i a_j
    cross = a.sum(axis=1) ** 2 - a2.sum(axis=1)
    zeta = direct - 2.0 * cross / safe.min(axis=1)[:, None]
    xi = zeta.sum(axis=1) - delta
    xi = np.where(degenerate, -np.inf, xi)
    return xi, zeta, delta


def _exact_scores(e: np.ndarray, F: np.ndarray, r: float):
    """Diagnostic alternative: the actual least-squares reduction of ||e||^2
    achieved by each candidate, minus delta. xi >= 0 then means exactly
    ||e_next||^2 <= r ||e||^2."""
    c = F @ e                                   # S x P x H
    G = F @ F.transpose(0, 2, 1)                # S x P x P
    B = np.linalg.pinv(G, hermitian=True) @ c
    explained = np.einsum("sph,sph->sh", c, B)
    delta = (1.0 - r) * float(np.sum(e * e))
    return explained.sum(axis=1) - delta, explained, delta


def score_candidate(e, feats: PooledFeatures | np.ndarray, r: float) -> FilterScore:
    F = feats.matrix if isinstance(feats, PooledFeatures) else np.asarray(feats, dtype=float)
    e = np.asarray(e, dtype=float)
    if e.ndim == 1:
        e = e[:, None]
    if np.any(np.einsum("np,np->p", F, F) <= 0):
        raise DegenerateCandidate("feature column with zero norm")
    xi, zeta, delta = _scores(e, F.T[None], r)
    return FilterScore(float(xi[0]), zeta[0], delta)


@dataclass(frozen=True)
class Selection:
    candidate: FilterCandidate
    features: PooledFeatures
    score: FilterScore
    lam: float
    r: float
    index: int


def select_filter(e: np.ndarray, inputs: np.ndarray, cfg: BuildConfig, iteration: int,
                  shape: ConvShape | None = None) -> Selection | None:
    """Scan lambda (outer) and r (inner); a fresh pool of S filters per pair.

    Returns the best admissible candidate (xi >= 0, lowest index on ties) of
    the first pair with any admissible candidate, or None when the whole grid
    yields nothing.
    """
    shape = shape or cfg.shape_for(inputs.shape[1])
    e = np.asarray(e, dtype=float)
    for li, lam in enumerate(cfg.lambdas):
        for ri, r in enumerate(cfg.rates):
            W, b = sample_candidate_arrays(cfg.S, shape.K_m, lam,
                                           stream(cfg.seed, ESC_STREAM, iteration, li, ri))
            F = feature_stack(W, b, inputs, shape)
            xi, zeta, delta = (_exact_scores if cfg.score_mode == "exact" else _scores)(e, F, r)
            ok = np.flatnonzero(xi >= 0)
            if ok.size:
                s = int(ok[np.argmax(xi[ok])])
                feats = PooledFeatures(np.ascontiguousarray(F[s].T), shape)
                return Selection(FilterCandidate(W[s], b[s], lam), feats,
                                 FilterScore(float(xi[s]), zeta[s], delta), lam, r, s)
    return None


Monitor = Callable[[object, dict], None]


def _error_feedback_build(train: SupervisedWindows, cfg: BuildConfig, pick, kind: str,
                          monitor: Monitor | None, scaler) -> EscModel:
    shape = cfg.shape_for(train.T)
    X, e = train.inputs, np.array(train.targets, dtype=float)
    model = EscModel([], [], shape, train.H, kind, scaler)
    status = ""
    while model.C + 1 <= cfg.C_max and np.linalg.norm(e) >= cfg.epsilon:
        it = model.C
        picked = pick(e, X, shape, it)
        if picked is None:
            status = "configuration-exhausted"
            break
        cand, F, info = picked
        sse_before = float(np.sum(e * e))
        sol = solve_lsq(F, e)
        e = sol.residual
        model.filters.append(cand)
        model.readouts.append(sol.coefficients)
        rec = {"iteration": it + 1, **info, "train_sse": float(np.sum(sol.residual_sse)),
               "sse_before": sse_before}
        if "r" in info:
            rec["decay_ok"] = bool(rec["train_sse"] <= info["r"] * sse_before)
        model.build_log.append(rec)
        if monitor is not None:
            monitor(model, rec)
    else:
        status = "max-units" if model.C >= cfg.C_max else "tolerance"
    model.status = status
    return model


def build_esc_cnn(train: SupervisedWindows, cfg: BuildConfig = BuildConfig(),
                  monitor: Monitor | None = None, scaler: ScalerParams | None = None) -> EscModel:
    def pick(e, X, shape, it):
        sel = select_filter(e, X, cfg, it, shape)
        if sel is None:
            return None
        info = {"lambda": sel.lam, "r": sel.r, "xi": sel.score.xi, "candidate": sel.index}
        return sel.candidate, sel.features.matrix, info

    return _error_feedback_build(train, cfg, pick, "esc", monitor, scaler)


def build_es_cnn(train: SupervisedWindows, cfg: BuildConfig = BuildConfig(),
                 monitor: Monitor | None = None, scaler: ScalerParams | None = None) -> EscModel:
    lam = cfg.es_lambda

    def pick(e, X, shape, it):
        W, b = sample_candidate_arrays(1, shape.K_m, lam, stream(cfg.seed, ES_STREAM, it))
        F = extract_features_batch(W, b, X, shape)[0]
        return FilterCandidate(W[0], b[0], lam), F, {"lambda": lam}

    return _error_feedback_build(train, cfg, pick, "es", monitor, scaler)


def summed_features(W, b, inputs, shape: ConvShape) -> np.ndarray:
    """S x N: each filter's pooled map summed over pooling positions."""
    return pooled_maps(W, b, inputs, shape).sum(axis=2)


def build_sc_cnn(train: SupervisedWindows, cfg: BuildConfig = BuildConfig(),
                 monitor: Monitor | None = None, scaler: ScalerParams | None = None) -> ScCnnModel:
    shape = cfg.shape_for(train.T)
    X = train.inputs

    def draw(lam, rng):
        W, b = sample_candidate_arrays(cfg.S, shape.K_m, lam, rng)
        return summed_features(W, b, X, shape), np.column_stack([W, b, np.full(cfg.S, lam)])

    def as_model(params, beta):
        filters = [FilterCandidate(p[:-2], p[-2], p[-1]) for p in params]
        return ScCnnModel(filters, np.array(beta), shape, train.H, "sc", scaler)

    def on_unit(params, beta, rec):
        if monitor is not None:
            monitor(as_model(params, beta), rec)

    params, beta, log, status = stochastic_configuration(
        train.targets, draw, max_units=cfg.C_max, epsilon=cfg.epsilon,
        lambdas=cfg.lambdas, rates=cfg.rates, seed=cfg.seed, tag=SC_STREAM,
        u_g=cfg.u_g, margin_mode=cfg.margin_mode, on_unit=on_unit)
    model = as_model(params, beta)
    model.build_log = log
    model.status = status
    return model


def predict(model, inputs, inverse: bool = False) -> np.ndarray:
    """Forecast in scaled space (or original units with ``inverse=True``)."""
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    if X.shape[1] != model.shape.T:
        raise ValueError(f"inputs have {X.shape[1]} columns, model expects T={model.shape.T}")
    if isinstance(model, ScCnnModel):
        if model.C == 0:
            yhat = np.zeros((X.shape[0], model.H))
        else:
            W = np.stack([f.weights for f in model.filters])
            b = np.array([f.bias for f in model.filters])
            yhat = summed_features(W, b, X, model.shape).T @ model.betas
    else:
        F = features_for(model.filters, X, model.shape)
        yhat = np.zeros((X.shape[0], model.H))
        for Fj, Bj in zip(F, model.readouts):
            yhat += Fj @ Bj
    if inverse:
        if model.scaler is None:
            raise ValueError("model carries no scaler; cannot invert")
        yhat = model.scaler.inverse_transform(yhat)
    return yhat
