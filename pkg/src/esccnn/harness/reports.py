from __future__ import annotations

import csv
import json
from pathlib import Path

from .experiment import METRICS, RunReport, summarize

CONVERGENCE_FIELDS = ["model", "repeat", "iteration"] + [
    f"{split}_{m}" for split in ("train", "test") for m in METRICS]
SUMMARY_FIELDS = ["model", "H", "metric", "mean_best"]


def fmt(v: float) -> str:
    return "%.17g" % v


def _write_csv(path: Path, fields, rows):
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(fields)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def summary_rows(summary: dict, H: int):
    for model, vals in summary.items():
        for metric in METRICS:
            yield [model, H, metric, fmt(vals[metric])]


def emit_reports(report: RunReport, out_dir) -> dict[str, Path]:
    """Write summary.csv, convergence.csv, config.json and cells.json."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    paths = {name: out / name for name in ("summary.csv", "convergence.csv", "config.json", "cells.json")}

    _write_csv(paths["summary.csv"], SUMMARY_FIELDS, summary_rows(report.summary(), report.H))
    conv = []
    for c in report.cells:
        if c.status != "ok":
            continue
        for row in c.trajectory:
            conv.append([c.model, c.repeat, row["iteration"]] +
                        [fmt(row[f]) for f in CONVERGENCE_FIELDS[3:]])
    _write_csv(paths["convergence.csv"], CONVERGENCE_FIELDS, conv)

    paths["config.json"].write_text(json.dumps(report.config, indent=2, sort_keys=True) + "\n")
    cells = [{
        "model": c.model, "repeat": c.repeat, "seed": c.seed, "status": c.status,
        "build_status": c.build_status, "error": c.error, "units": len(c.trajectory),
        "scores": c.scores, "decay_fraction": c.decay_fraction,
    } for c in report.cells]
    paths["cells.json"].write_text(json.dumps(
        {"H": report.H, "cells": cells}, indent=2, sort_keys=True) + "\n")
    return paths


def read_convergence(path) -> dict:
    """(model, repeat) -> list of row dicts with float metrics."""
    traj: dict = {}
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["model"], int(row["repeat"]))
            rec = {"iteration": int(row["iteration"])}
            rec.update({f: float(row[f]) for f in CONVERGENCE_FIELDS[3:]})
            traj.setdefault(key, []).append(rec)
    return traj


def read_summary(path) -> dict:
    out: dict = {}
    with Path(path).open(newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["model"], {})[row["metric"]] = float(row["mean_best"])
    return out


def reemit_summary(run_dir, out_dir=None) -> Path:
    """Rebuild summary.csv from a stored convergence.csv."""
    run_dir = Path(run_dir)
    conv = run_dir / "convergence.csv"
    if not conv.is_file():
        raise FileNotFoundError(f"{conv} not found")
    H = json.loads((run_dir / "config.json").read_text())["H"]
    summary = summarize(read_convergence(conv))
    target = Path(out_dir or run_dir) / "summary.csv"
    target.parent.mkdir(parents=True, exist_ok=True)
    _write_csv(target, SUMMARY_FIELDS, summary_rows(summary, H))
    return target
