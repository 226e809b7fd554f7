"""Versioned JSON serialization for built models.

Floats are written with ``repr`` precision by the json module, so a save/load
round trip reproduces parameters bit for bit.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .baselines import RandMlpModel
from .constructive import EscModel, ScCnnModel
from .dataset import ScalerParams
from .randconv import ConvShape, FilterCandidate

FORMAT = "esccnn-model"
VERSION = 1


def _scaler(s):
    return None if s is None else {"min": s.min, "max": s.max}


def _filters(fs):
    return [{"weights": f.weights.tolist(), "bias": f.bias, "lambda": f.lam} for f in fs]


def _shape(s: ConvShape):
    return {"T": s.T, "K_m": s.K_m, "K_p": s.K_p}


def _clean_log(log):
    return [{k: (float(v) if isinstance(v, np.floating) else v) for k, v in rec.items()} for rec in log]


def model_to_dict(model) -> dict:
    if not isinstance(model, (EscModel, ScCnnModel, RandMlpModel)):
        raise TypeError(f"cannot serialise {type(model).__name__}")
    base = {"format": FORMAT, "version": VERSION, "kind": model.kind, "status": model.status,
            "scaler": _scaler(model.scaler), "build_log": _clean_log(model.build_log)}
    if isinstance(model, EscModel):
        base.update(shape=_shape(model.shape), H=model.H, filters=_filters(model.filters),
                    readouts=[np.asarray(r).tolist() for r in model.readouts])
    elif isinstance(model, ScCnnModel):
        base.update(shape=_shape(model.shape), H=model.H, filters=_filters(model.filters),
                    betas=np.asarray(model.betas).tolist())
    else:
        lam = list(model.lam) if isinstance(model.lam, tuple) else model.lam
        base.update(hidden_weights=model.hidden_weights.tolist(),
                    hidden_biases=model.hidden_biases.tolist(),
                    output_weights=np.asarray(model.output_weights).tolist(), lam=lam)
    return base


def model_from_dict(d: dict):
    if d.get("format") != FORMAT:
        raise ValueError(f"not an {FORMAT} document")
    if d.get("version") != VERSION:
        raise ValueError(f"unsupported model format version {d.get('version')}")
    scaler = ScalerParams(**d["scaler"]) if d.get("scaler") else None
    kind = d["kind"]
    if kind in ("esc", "es", "sc"):
        shape = ConvShape(**d["shape"])
        filters = [FilterCandidate(np.array(f["weights"]), f["bias"], f["lambda"]) for f in d["filters"]]
        if kind == "sc":
            betas = np.array(d["betas"], dtype=float).reshape(len(filters), d["H"])
            return ScCnnModel(filters, betas, shape, d["H"], kind, scaler, d["build_log"], d["status"])
        readouts = [np.array(r, dtype=float) for r in d["readouts"]]
        return EscModel(filters, readouts, shape, d["H"], kind, scaler, d["build_log"], d["status"])
    if kind in ("scn", "rvfl"):
        lam = tuple(d["lam"]) if isinstance(d["lam"], list) else d["lam"]
        return RandMlpModel(np.array(d["hidden_weights"], dtype=float),
                            np.array(d["hidden_biases"], dtype=float),
                            np.array(d["output_weights"], dtype=float),
                            lam, kind, scaler, d["build_log"], d["status"])
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(model_to_dict(model), indent=1) + "\n")
    return path


def load_model(path):
    return model_from_dict(json.loads(Path(path).read_text()))
