"""Run the AR1 benchmark and print a summary table.

    python scripts/run_ar1.py --repeats 3 --horizon 3 --out runs/ar1_h3
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
from dataclasses import dataclass

import numpy as np

from esccnn.harness import ExperimentConfig, emit_reports, run_experiment


@dataclass
class Ar1Run:
    repeats: int = 10
    horizon: int = 1
    window: int = 15
    models: tuple = ("esc", "es", "sc", "scn", "rvfl")
    scale_fit: str = "train-only"
    out: str = "runs/ar1"
    jobs: int = 1

    def experiment(self) -> ExperimentConfig:
        return ExperimentConfig(T=self.window, H=self.horizon, models=self.models,
                                repeats=self.repeats, scale_fit=self.scale_fit,
                                output_dir=self.out, jobs=self.jobs).validate()


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    defaults = Ar1Run()
    for f in dataclasses.fields(Ar1Run):
        val = getattr(defaults, f.name)
        if isinstance(val, tuple):
            p.add_argument(f"--{f.name}", default=",".join(val))
        else:
            p.add_argument(f"--{f.name}", type=type(val), default=val)
    args = vars(p.parse_args())
    args["models"] = tuple(m.strip() for m in args["models"].split(","))
    run = Ar1Run(**args)
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    report = run_experiment(run.experiment(),
                            lambda c: logging.info("%s repeat %d: %d units", c.model, c.repeat, len(c.trajectory)))
    emit_reports(report, run.out)
    print(f"{'model':<6}{'mean RMSE':>11}{'median':>9}{'MAPE':>9}{'SMAPE':>9}")
    for model, vals in report.summary().items():
        med = np.median([c.best("rmse") for c in report.ok_cells(model)])
        print(f"{model:<6}{vals['rmse']:>11.4f}{med:>9.4f}{vals['mape']:>9.4f}{vals['smape']:>9.4f}")
    print(f"{report.wall_clock:.0f}s, reports in {run.out}")


if __name__ == "__main__":
    main()
