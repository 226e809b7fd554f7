import dataclasses
import json

import numpy as np
import pytest

from esccnn.harness import config as hc
from esccnn.harness.config import ConfigError, ExperimentConfig, config_from_dict, load_config, parse_pairs
from esccnn.harness.experiment import CellResult, RunReport, prepare_data, run_experiment, summarize
from esccnn.harness.reports import (
    CONVERGENCE_FIELDS,
    SUMMARY_FIELDS,
    emit_reports,
    read_convergence,
    read_summary,
    reemit_summary,
)


def test_parse_pairs_typing():
    d = parse_pairs("# c\nT = 20\nmodels = esc, scn  # trailing\nrates=0.9,0.99\nresample_per_repeat = no\n")
    assert d == {"T": 20, "models": ("esc", "scn"), "rates": (0.9, 0.99), "resample_per_repeat": False}


@pytest.mark.parametrize("text", ["bogus = 1", "T = fifteen", "no equals sign", "resample_per_repeat = maybe"])
def test_parse_pairs_errors(text):
    with pytest.raises(ConfigError):
        parse_pairs(text)


def test_load_config_file_and_overrides(tmp_path):
    p = tmp_path / "x.cfg"
    p.write_text("T = 12\nrepeats = 3\n")
    cfg = load_config(p, {"repeats": "5", "models": "esc,es"})
    assert (cfg.T, cfg.repeats, cfg.models) == (12, 5, ("esc", "es"))
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_dumps_round_trip():
    cfg = ExperimentConfig(T=9, models=("sc", "rvfl"), resample_per_repeat=False)
    assert ExperimentConfig(**parse_pairs(cfg.dumps())) == cfg
    assert config_from_dict(json.loads(hc.dump_json(cfg))) == cfg


@pytest.mark.parametrize("change", [dict(repeats=0), dict(H=2), dict(models=("cnn",)), dict(scale_fit="x"),
                                    dict(metric_space="raw"), dict(dataset="csv", csv_path="/nonexistent")])
def test_validate_rejects(change):
    with pytest.raises(ConfigError):
        ExperimentConfig(**change).validate()


def test_prepare_data_resampling(fast_cfg):
    a, _ = prepare_data(fast_cfg, 0)
    b, _ = prepare_data(fast_cfg, 1)
    assert not np.array_equal(a.train.inputs, b.train.inputs)
    fixed = dataclasses.replace(fast_cfg, resample_per_repeat=False)
    assert np.array_equal(prepare_data(fixed, 0)[0].train.inputs, prepare_data(fixed, 1)[0].train.inputs)


def test_prepare_data_csv(tmp_path, fast_cfg):
    p = tmp_path / "s.csv"
    p.write_text("t,value\n" + "".join(f"{i},{np.sin(i / 5)}\n" for i in range(80)))
    cfg = dataclasses.replace(fast_cfg, dataset="csv", csv_path=str(p), csv_column="value")
    split, scaler = prepare_data(cfg, 0)
    assert split.train.N + split.test.N == 80 - 10 - 1 + 1


def test_summarize_hand():
    traj = {("m", 0): [{"test_mape": 3, "test_smape": 2, "test_rmse": 1.0},
                       {"test_mape": 1, "test_smape": 4, "test_rmse": 0.5}],
            ("m", 1): [{"test_mape": 5, "test_smape": 6, "test_rmse": 0.25}]}
    assert summarize(traj) == {"m": {"mape": 3.0, "smape": 4.0, "rmse": 0.375}}


def test_run_reports_and_reemit(fast_cfg, tmp_path):
    report = run_experiment(fast_cfg)
    assert not report.failed
    assert [(c.model, c.repeat) for c in report.cells] == [
        (m, k) for m in fast_cfg.models for k in range(2)]
    paths = emit_reports(report, fast_cfg.output_dir)
    conv = read_convergence(paths["convergence.csv"])
    assert sum(len(v) for v in conv.values()) == sum(len(c.trajectory) for c in report.cells)
    assert all(len(conv[("rvfl", k)]) == 1 for k in range(2))
    header = paths["convergence.csv"].read_text().splitlines()[0].split(",")
    assert header == CONVERGENCE_FIELDS
    lines = paths["summary.csv"].read_text().splitlines()
    assert lines[0].split(",") == SUMMARY_FIELDS and len(lines) == 1 + 3 * len(report.models)
    # the summary recomputed from the stored trajectories is bit-identical
    again = reemit_summary(fast_cfg.output_dir, tmp_path / "re")
    assert again.read_text() == paths["summary.csv"].read_text()
    assert read_summary(again) == report.summary()
    cells = json.loads(paths["cells.json"].read_text())
    assert cells["H"] == 1 and len(cells["cells"]) == len(report.cells)


def test_esc_scores_nonnegative_in_harness(fast_cfg):
    report = run_experiment(dataclasses.replace(fast_cfg, models=("esc", "scn")))
    for c in report.cells:
        assert all(s >= 0 for s in c.scores)
        assert len(c.scores) == len(c.trajectory)


def test_failed_cells_are_isolated(fast_cfg):
    cfg = dataclasses.replace(fast_cfg, K_m=20, models=("esc", "scn", "rvfl"))
    report = run_experiment(cfg)
    assert {c.model for c in report.failed} == {"esc"}
    assert all("ShapeError" in c.error for c in report.failed)
    assert set(report.summary()) == {"scn", "rvfl"}


def test_empty_report_writes_headers_only(fast_cfg):
    cfg = dataclasses.replace(fast_cfg, K_m=20, models=("esc", "sc"))
    report = run_experiment(cfg)
    paths = emit_reports(report, cfg.output_dir)
    assert paths["summary.csv"].read_text().splitlines() == [",".join(SUMMARY_FIELDS)]
    assert paths["convergence.csv"].read_text().splitlines() == [",".join(CONVERGENCE_FIELDS)]


def test_report_determinism(fast_cfg, tmp_path):
    cfg = dataclasses.replace(fast_cfg, models=("esc", "sc", "scn"), repeats=1)
    a = emit_reports(run_experiment(cfg), tmp_path / "a")
    b = emit_reports(run_experiment(cfg), tmp_path / "b")
    for name in ("summary.csv", "convergence.csv", "cells.json"):
        assert a[name].read_text() == b[name].read_text()


def test_original_metric_space(fast_cfg):
    cfg = dataclasses.replace(fast_cfg, models=("rvfl",), repeats=1)
    scaled = run_experiment(cfg).cells[0].best("rmse")
    orig = run_experiment(dataclasses.replace(cfg, metric_space="original")).cells[0].best("rmse")
    split, scaler = prepare_data(cfg, 0)
    assert orig == pytest.approx(scaled * (scaler.max - scaler.min) / 2, rel=1e-9)


def test_cell_best():
    c = CellResult("esc", 0, 0, "ok", [{"test_rmse": 2.0}, {"test_rmse": 1.0}])
    assert c.best("rmse") == 1.0
    assert RunReport({}, 1, [c]).models == ["esc"]
