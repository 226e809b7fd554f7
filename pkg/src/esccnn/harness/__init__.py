from .config import ExperimentConfig, load_config
from .experiment import CellResult, RunReport, run_experiment
from .metrics import MetricTriple, evaluate, mape, rmse, smape
from .reports import emit_reports, reemit_summary
