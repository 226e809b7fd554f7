import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from esccnn.baselines import (
    ScnConfig,
    build_rvfl,
    build_scn,
    predict_mlp,
    rvfl_from_parameters,
    scn_margins,
)
from esccnn.dataset import SupervisedWindows, fit_scaler, generate_ar1, make_windows, split_two_thirds
from esccnn.linsolve import solve_lsq

SMALL = dict(S=40, lambdas=(0.5, 1.0, 5.0, 50.0), rates=(0.9, 0.99, 0.9999))


@pytest.fixture(scope="module")
def ar1_small():
    s = generate_ar1(120, seed=1)
    return split_two_thirds(make_windows(s, fit_scaler(s, "full-series"), 10, 3))


def test_rvfl_zero_weights_fit_the_mean():
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, (25, 6))
    Y = rng.normal(size=(25, 2))
    m = rvfl_from_parameters(SupervisedWindows(X, Y), np.zeros((1, 6)), np.zeros(1))
    # every hidden output is sigmoid(0) = 0.5
    np.testing.assert_allclose(predict_mlp(m, X), np.tile(Y.mean(axis=0), (25, 1)), atol=1e-12)
    np.testing.assert_allclose(m.output_weights, 2 * Y.mean(axis=0)[None], atol=1e-12)


def test_rvfl_interpolates_when_square():
    rng = np.random.default_rng(1)
    X = rng.uniform(-1, 1, (20, 5))
    Y = rng.normal(size=(20, 1))
    m = build_rvfl(SupervisedWindows(X, Y), L=20, lam=5.0, seed=3)
    assert m.build_log[0]["train_sse"] < 1e-12
    np.testing.assert_allclose(predict_mlp(m, X), Y, atol=1e-6)


def test_rvfl_validation():
    w = SupervisedWindows(np.zeros((3, 2)), np.zeros((3, 1)))
    with pytest.raises(ValueError):
        build_rvfl(w, L=0)
    with pytest.raises(ValueError):
        build_rvfl(w, lam=0.0)


def test_predict_mlp_hand_value():
    m = rvfl_from_parameters(SupervisedWindows(np.zeros((2, 2)), np.ones((2, 1))),
                             np.array([[1.0, -1.0]]), np.array([0.5]))
    m.output_weights = np.array([[2.0]])
    x = np.array([[0.3, 0.1]])
    assert predict_mlp(m, x)[0, 0] == pytest.approx(2 * oracles.sigmoid(0.3 - 0.1 + 0.5), abs=1e-15)


def test_predict_mlp_batch_equals_rowwise(ar1_small):
    m = build_rvfl(ar1_small.train, L=15, seed=2)
    X = ar1_small.test.inputs
    full = predict_mlp(m, X)
    rows = np.vstack([predict_mlp(m, X[i]) for i in range(len(X))])
    np.testing.assert_allclose(full, rows, atol=1e-14)
    with pytest.raises(ValueError):
        predict_mlp(m, np.zeros((1, 3)))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(["typeset", "normalized"]))
def test_scn_margins_match_oracle(seed, mode):
    rng = np.random.default_rng(seed)
    N, H, S = (int(v) for v in rng.integers([2, 1, 1], [20, 4, 6]))
    e = rng.normal(size=(N, H))
    G = rng.uniform(0, 1, (S, N))
    r = float(rng.uniform(0.01, 0.999))
    u = float(rng.uniform(0.5, 2))
    got = scn_margins(e, G, r, u, mode)
    for s in range(S):
        want = oracles.scn_margin(e.tolist(), list(G[s]), r, u, mode == "normalized")
        assert got[s] == pytest.approx(want, rel=1e-10, abs=1e-10)


def test_scn_zero_column_is_rejected_in_normalized_mode():
    m = scn_margins(np.ones((3, 1)), np.zeros((1, 3)), 0.9, mode="normalized")
    assert m[0] == -np.inf


def test_scn_build_properties(ar1_small):
    train = ar1_small.train
    seen = []
    m = build_scn(train, ScnConfig(L_max=12, **SMALL), monitor=lambda mod, rec: seen.append(mod.L))
    assert m.L == len(m.build_log) == len(seen) <= 12
    assert seen == list(range(1, m.L + 1))
    sse = [float(np.sum(train.targets ** 2))] + [r["train_sse"] for r in m.build_log]
    assert all(b <= a * (1 + 1e-12) + 1e-12 for a, b in zip(sse, sse[1:]))
    assert all(r["score"] >= 0 for r in m.build_log)
    # output weights are the global least-squares refit
    A = 1 / (1 + np.exp(-(train.inputs @ m.hidden_weights.T + m.hidden_biases)))
    np.testing.assert_allclose(m.output_weights, solve_lsq(A, train.targets).coefficients, atol=1e-8)
    resid = train.targets - predict_mlp(m, train.inputs)
    assert float(np.sum(resid ** 2)) == pytest.approx(sse[-1], rel=1e-9)


def test_scn_tolerance_stop(ar1_small):
    m = build_scn(ar1_small.train, ScnConfig(epsilon=1e300, **SMALL))
    assert m.L == 0 and m.status == "tolerance"
    with pytest.raises(ValueError):
        predict_mlp(m, ar1_small.test.inputs)


def test_scn_deterministic(ar1_small):
    cfg = ScnConfig(L_max=6, seed=11, **SMALL)
    a, b = build_scn(ar1_small.train, cfg), build_scn(ar1_small.train, cfg)
    assert np.array_equal(a.hidden_weights, b.hidden_weights)
    assert np.array_equal(a.output_weights, b.output_weights)


def test_scn_config_validation():
    with pytest.raises(ValueError):
        ScnConfig(rates=(1.0,))
    with pytest.raises(ValueError):
        ScnConfig(margin_mode="other")
