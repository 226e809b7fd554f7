"""Random single-hidden-layer networks: RVFL and stochastic configuration (SCN).

The incremental configuration loop here is shared with the SC-CNN ablation,
which feeds it one scalar convolutional feature per filter instead of a
sigmoid neuron.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .dataset import ScalerParams, SupervisedWindows
from .linsolve import solve_lsq
from .randconv import sigmoid, stream

MarginMode = Literal["typeset", "normalized"]

DEFAULT_LAMBDAS = (0.5, 1.0, 3.0, 5.0, 10.0, 30.0, 50.0, 100.0)
DEFAULT_RATES = (0.9, 0.99, 0.999, 0.9999, 0.99999)

# counter tags keep the RNG streams of different model families disjoint
SCN_STREAM = 2
RVFL_STREAM = 3


@dataclass(frozen=True)
class ScnConfig:
    L_max: int = 50
    epsilon: float = 0.0
    lambdas: tuple = DEFAULT_LAMBDAS
    rates: tuple = DEFAULT_RATES
    S: int = 300
    seed: int = 0
    u_g: float = 1.0
    margin_mode: MarginMode = "typeset"

    def __post_init__(self):
        if self.L_max < 1:
            raise ValueError(f"L_max must be >= 1, got {self.L_max}")
        if self.S < 1:
            raise ValueError(f"S must be >= 1, got {self.S}")
        if not self.lambdas or any(not lam > 0 for lam in self.lambdas):
            raise ValueError(f"lambdas must be non-empty and positive, got {self.lambdas}")
        if not self.rates or any(not 0 < r < 1 for r in self.rates):
            raise ValueError(f"rates must be non-empty and inside (0, 1), got {self.rates}")
        if self.margin_mode not in ("typeset", "normalized"):
            raise ValueError(f"unknown margin_mode {self.margin_mode!r}")


@dataclass
class RandMlpModel:
    hidden_weights: np.ndarray  # L x T
    hidden_biases: np.ndarray   # L
    output_weights: np.ndarray  # L x H
    lam: float | tuple
    kind: str = "rvfl"
    scaler: ScalerParams | None = None
    build_log: list = field(default_factory=list)
    status: str = "complete"

    @property
    def L(self) -> int:
        return self.hidden_weights.shape[0]


def scn_margins(e: np.ndarray, G: np.ndarray, r: float, u_g: float = 1.0,
                mode: MarginMode = "typeset") -> np.ndarray:
    """Admission margins for candidate columns.

    e: N x H residual, G: S x N candidate outputs. Returns S margins
    ``sum_h <e_h, g>^2 / u_g^2 - (1 - r) * ||e||_F^2``; in normalized mode the
    squared inner product is further divided by ``||g||^2``.
    """
    a = G @ e                                   # S x H
    num = np.einsum("sh,sh->s", a, a) / u_g**2
    if mode == "normalized":
        gg = np.einsum("sn,sn->s", G, G)
        with np.errstate(divide="ignore", invalid="ignore"):
            num = np.where(gg > 0, num / gg, -np.inf)
    delta = (1.0 - r) * float(np.sum(e * e))
    return num - delta


def stochastic_configuration(
    Y: np.ndarray,
    draw: Callable[[float, np.random.Generator], tuple[np.ndarray, object]],
    *,
    max_units: int,
    epsilon: float,
    lambdas,
    rates,
    seed: int,
    tag: int,
    u_g: float,
    margin_mode: MarginMode,
    on_unit: Callable[[list, np.ndarray, dict], None] | None = None,
):
    """Generic SCN loop with global least-squares refit.

    ``draw(lam, rng)`` returns (S x N candidate outputs, parameters) where
    parameters can be indexed by candidate. Returns the accepted parameter list,
    the output weights (units x H), the log and a stop status.
    """
    Y = np.asarray(Y, dtype=float)
    N, H = Y.shape
    e = Y.copy()
    cols: list[np.ndarray] = []
    params: list = []
    beta = np.zeros((0, H))
    log: list[dict] = []
    status = ""
    while len(params) + 1 <= max_units and np.linalg.norm(e) >= epsilon:
        it = len(params)
        chosen = None
        for li, lam in enumerate(lambdas):
            for ri, r in enumerate(rates):
                G, P = draw(lam, stream(seed, tag, it, li, ri))
                m = scn_margins(e, G, r, u_g, margin_mode)
                ok = np.flatnonzero(m >= 0)
                if ok.size:
                    s = int(ok[np.argmax(m[ok])])
                    chosen = (G[s], P[s], lam, r, float(m[s]))
                    break
            if chosen is not None:
                break
        if chosen is None:
            status = "configuration-exhausted"
            break
        g, p, lam, r, margin = chosen
        sse_before = float(np.sum(e * e))
        cols.append(g)
        params.append(p)
        sol = solve_lsq(np.column_stack(cols), Y)
        beta, e = sol.coefficients, sol.residual
        rec = {
            "iteration": it + 1,
            "lambda": lam,
            "r": r,
            "score": margin,
            "train_sse": float(np.sum(sol.residual_sse)),
            "sse_before": sse_before,
            "decay_ok": bool(np.sum(sol.residual_sse) <= r * sse_before),
        }
        log.append(rec)
        if on_unit is not None:
            on_unit(params, beta, rec)
    else:
        status = "max-units" if len(params) >= max_units else "tolerance"
    return params, beta, log, status


def _hidden(X: np.ndarray, W: np.ndarray, b: np.ndarray) -> np.ndarray:
    return sigmoid(X @ W.T + b)


def build_scn(train: SupervisedWindows, cfg: ScnConfig = ScnConfig(), monitor=None,
              scaler: ScalerParams | None = None) -> RandMlpModel:
    X = train.inputs
    T = X.shape[1]

    def draw(lam, rng):
        P = rng.uniform(-lam, lam, size=(cfg.S, T + 1))
        return _hidden(X, P[:, :T], P[:, T]).T, P

    def on_unit(params, beta, rec):
        if monitor is not None:
            monitor(_mlp_from(params, beta, T, "scn", cfg.lambdas, scaler), rec)

    params, beta, log, status = stochastic_configuration(
        train.targets, draw, max_units=cfg.L_max, epsilon=cfg.epsilon,
        lambdas=cfg.lambdas, rates=cfg.rates, seed=cfg.seed, tag=SCN_STREAM,
        u_g=cfg.u_g, margin_mode=cfg.margin_mode, on_unit=on_unit)
    model = _mlp_from(params, beta, T, "scn", cfg.lambdas, scaler)
    model.build_log = log
    model.status = status
    return model


def _mlp_from(params, beta, T, kind, lam, scaler) -> RandMlpModel:
    P = np.array(params).reshape(len(params), T + 1)
    return RandMlpModel(P[:, :T].copy(), P[:, T].copy(), np.array(beta), lam, kind, scaler)


def build_rvfl(train: SupervisedWindows, L: int = 50, lam: float = 1.0, seed: int = 0,
               scaler: ScalerParams | None = None) -> RandMlpModel:
    """All L neurons drawn at once from U[-lam, lam], readout solved once."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    T = train.T
    rng = stream(seed, RVFL_STREAM)
    P = rng.uniform(-lam, lam, size=(L, T + 1))
    return rvfl_from_parameters(train, P[:, :T], P[:, T], lam, scaler)


def rvfl_from_parameters(train: SupervisedWindows, W, b, lam=1.0, scaler=None) -> RandMlpModel:
    W = np.atleast_2d(np.asarray(W, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    A = _hidden(train.inputs, W, b)
    sol = solve_lsq(A, train.targets)
    log = [{"iteration": 1, "train_sse": float(np.sum(sol.residual_sse))}]
    return RandMlpModel(W, b, sol.coefficients, lam, "rvfl", scaler, log)


def predict_mlp(model: RandMlpModel, inputs, inverse: bool = False) -> np.ndarray:
    if model.L < 1:
        raise ValueError("model has no hidden neurons")
    X = np.atleast_2d(np.asarray(inputs, dtype=float))
    if X.shape[1] != model.hidden_weights.shape[1]:
        raise ValueError(f"inputs have {X.shape[1]} columns, model expects {model.hidden_weights.shape[1]}")
    yhat = _hidden(X, model.hidden_weights, model.hidden_biases) @ model.output_weights
    if inverse:
        if model.scaler is None:
            raise ValueError("model carries no scaler; cannot invert")
        yhat = model.scaler.inverse_transform(yhat)
    return yhat
