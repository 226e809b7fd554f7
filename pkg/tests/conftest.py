import pytest

from esccnn.harness.config import ExperimentConfig

FAST = dict(ar1_n=120, T=10, S=20, C_max=4, repeats=2, lambdas=(0.5, 5.0, 50.0), rates=(0.9, 0.999))


@pytest.fixture
def fast_cfg(tmp_path):
    return ExperimentConfig(output_dir=str(tmp_path / "run"), **FAST)
