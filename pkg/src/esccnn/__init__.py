"""Constructive random convolutional forecasters (ESC-CNN) and random-network baselines."""

from .baselines import RandMlpModel, ScnConfig, build_rvfl, build_scn, predict_mlp
from .constructive import (
    BuildConfig,
    EscModel,
    ScCnnModel,
    build_es_cnn,
    build_esc_cnn,
    build_sc_cnn,
    predict,
    score_candidate,
    select_filter,
)
from .dataset import (
    RawSeries,
    ScalerParams,
    SplitWindows,
    SupervisedWindows,
    fit_scaler,
    generate_ar1,
    load_csv,
    make_windows,
    split_two_thirds,
)
from .linsolve import solve_lsq
from .randconv import ConvShape, FilterCandidate, derive_shape, extract_features, sample_candidates

__version__ = "0.1.0"
