"""Repeat protocol: build every model on every repeat, tracking train/test
metrics after each added unit, and summarise by the mean of per-repeat best
test values."""
from __future__ import annotations

import logging
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..baselines import ScnConfig, build_rvfl, build_scn, predict_mlp
from ..constructive import BuildConfig, build_es_cnn, build_esc_cnn, build_sc_cnn, predict
from ..dataset import SplitWindows, fit_scaler, generate_ar1, load_csv, make_windows, split_two_thirds
from .config import ExperimentConfig
from .metrics import evaluate

log = logging.getLogger(__name__)

METRICS = ("mape", "smape", "rmse")


@dataclass
class CellResult:
    model: str
    repeat: int
    seed: int
    status: str                      # ok | failed
    trajectory: list = field(default_factory=list)  # dicts: iteration, train_*, test_*
    build_status: str = ""
    error: str = ""
    scores: list = field(default_factory=list)      # admission statistic per accepted unit
    decay_fraction: float | None = None
    seconds: float = 0.0

    def best(self, metric: str) -> float:
        return min(row[f"test_{metric}"] for row in self.trajectory)


@dataclass
class RunReport:
    config: dict
    H: int
    cells: list[CellResult]
    wall_clock: float = 0.0

    @property
    def models(self) -> list[str]:
        return list(dict.fromkeys(c.model for c in self.cells))

    def ok_cells(self, model: str) -> list[CellResult]:
        return [c for c in self.cells if c.model == model and c.status == "ok" and c.trajectory]

    def summary(self) -> dict:
        """model -> metric -> mean over repeats of the best test value."""
        return summarize(
            {(c.model, c.repeat): c.trajectory for c in self.cells
             if c.status == "ok" and c.trajectory})

    @property
    def failed(self) -> list[CellResult]:
        return [c for c in self.cells if c.status != "ok"]


def summarize(trajectories: dict) -> dict:
    """Mean of per-cell minima. Keys are (model, repeat); cells are averaged in
    repeat order so that recomputation from a CSV reproduces the sum exactly."""
    out: dict = {}
    for model in dict.fromkeys(k[0] for k in trajectories):
        keys = sorted(k for k in trajectories if k[0] == model)
        out[model] = {}
        for metric in METRICS:
            bests = [min(row[f"test_{metric}"] for row in trajectories[k]) for k in keys]
            out[model][metric] = sum(bests) / len(bests)
    return out


def prepare_data(cfg: ExperimentConfig, repeat: int):
    if cfg.dataset == "ar1":
        data_seed = cfg.data_seed + repeat if cfg.resample_per_repeat else cfg.data_seed
        series = generate_ar1(cfg.ar1_n, cfg.ar1_alpha, cfg.ar1_noise, cfg.ar1_x0, data_seed)
    else:
        col = int(cfg.csv_column) if cfg.csv_column.isdigit() else cfg.csv_column
        series = load_csv(cfg.csv_path, col)
    scaler = fit_scaler(series, cfg.scale_fit, T=cfg.T, H=cfg.H)
    split = split_two_thirds(make_windows(series, scaler, cfg.T, cfg.H))
    return split, scaler


def build_config(cfg: ExperimentConfig, seed: int) -> BuildConfig:
    return BuildConfig(C_max=cfg.C_max, epsilon=cfg.epsilon, lambdas=cfg.lambdas, rates=cfg.rates,
                       S=cfg.S, K_p=cfg.K_p, K_m=cfg.K_m or None, seed=seed,
                       es_lambda=cfg.es_lambda, u_g=cfg.u_g, margin_mode=cfg.margin_mode)


def scn_config(cfg: ExperimentConfig, seed: int) -> ScnConfig:
    # same grids, pool size, tolerance and unit budget as the convolutional models
    return ScnConfig(L_max=cfg.C_max, epsilon=cfg.epsilon, lambdas=cfg.lambdas, rates=cfg.rates,
                     S=cfg.S, seed=seed, u_g=cfg.u_g, margin_mode=cfg.margin_mode)


def run_cell(cfg: ExperimentConfig, model: str, repeat: int,
             data: tuple[SplitWindows, object] | None = None) -> CellResult:
    seed = cfg.seed + repeat
    cell = CellResult(model, repeat, seed, "ok")
    t0 = time.perf_counter()
    try:
        split, scaler = data if data is not None else prepare_data(cfg, repeat)
        train, test = split.train, split.test
        original = cfg.metric_space == "original"
        y_tr = scaler.inverse_transform(train.targets) if original else train.targets
        y_te = scaler.inverse_transform(test.targets) if original else test.targets
        fwd = predict_mlp if model in ("scn", "rvfl") else predict

        def record(m, rec=None):
            p_tr, p_te = fwd(m, train.inputs), fwd(m, test.inputs)
            if original:
                p_tr, p_te = scaler.inverse_transform(p_tr), scaler.inverse_transform(p_te)
            row = {"iteration": len(cell.trajectory) + 1}
            row.update({f"train_{k}": v for k, v in evaluate(y_tr, p_tr).as_dict().items()})
            row.update({f"test_{k}": v for k, v in evaluate(y_te, p_te).as_dict().items()})
            cell.trajectory.append(row)

        if model == "esc":
            built = build_esc_cnn(train, build_config(cfg, seed), record, scaler)
        elif model == "es":
            built = build_es_cnn(train, build_config(cfg, seed), record, scaler)
        elif model == "sc":
            built = build_sc_cnn(train, build_config(cfg, seed), record, scaler)
        elif model == "scn":
            built = build_scn(train, scn_config(cfg, seed), record, scaler)
        else:
            built = build_rvfl(train, cfg.C_max, cfg.rvfl_lambda, seed, scaler)
            record(built)
        cell.build_status = built.status
        cell.scores = [r.get("xi", r.get("score")) for r in built.build_log if "xi" in r or "score" in r]
        decay = [r["decay_ok"] for r in built.build_log if "decay_ok" in r]
        cell.decay_fraction = float(np.mean(decay)) if decay else None
    except Exception as exc:  # one failed cell must not abort the run
        cell.status = "failed"
        cell.error = f"{type(exc).__name__}: {exc}"
        cell.trajectory = []
        log.warning("cell %s/repeat %d failed: %s", model, repeat, cell.error)
        log.debug("%s", traceback.format_exc())
    cell.seconds = time.perf_counter() - t0
    return cell


def _cell_job(args):
    return run_cell(*args)


def run_experiment(cfg: ExperimentConfig, progress=None) -> RunReport:
    cfg.validate()
    t0 = time.perf_counter()
    cells: list[CellResult] = []
    if cfg.jobs == 1:
        for repeat in range(cfg.repeats):
            data = prepare_data(cfg, repeat)
            for model in cfg.models:
                cell = run_cell(cfg, model, repeat, data)
                cells.append(cell)
                if progress is not None:
                    progress(cell)
    else:
        jobs = [(cfg, m, k) for k in range(cfg.repeats) for m in cfg.models]
        for k in range(cfg.repeats):  # surface data errors before forking
            prepare_data(cfg, k)
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            for cell in pool.map(_cell_job, jobs):
                cells.append(cell)
                if progress is not None:
                    progress(cell)
    order = {m: i for i, m in enumerate(cfg.models)}
    cells.sort(key=lambda c: (order[c.model], c.repeat))
    return RunReport(cfg.to_dict(), cfg.H, cells, time.perf_counter() - t0)
