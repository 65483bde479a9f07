import itertools
import math

import numpy as np
import pytest
import scipy.stats

import srea


def test_transition_rows_sum_to_one():
    for kind in ("symmetric", "asymmetric", "flip"):
        T = srea.transition_matrix(kind, 5, 0.3)
        assert T.shape == (5, 5)
        np.testing.assert_allclose(T.sum(axis=1), 1.0, atol=1e-12)
    flip = srea.transition_matrix("flip", 5, 0.3)
    assert flip[0, 0] == 1.0
    assert flip[3, 0] == pytest.approx(0.3)


def test_corrupt_is_seeded_and_spares_class_zero_under_flip():
    y = np.arange(2000) % 5
    a, fa = srea.corrupt(y, "flip", 5, 0.3, seed=1)
    b, _ = srea.corrupt(y, "flip", 5, 0.3, seed=1)
    assert np.array_equal(a, b)
    assert np.all(a[y == 0] == 0)
    assert np.array_equal(fa, a != y)
    assert 0.2 < fa[y != 0].mean() < 0.4


def test_schedule_defaults():
    assert srea.alpha_at(0) == 0.0
    assert srea.alpha_at(10) == 10 / 25
    assert srea.alpha_at(25) == 1.0
    assert srea.w_at(40) == 15 / 30
    assert srea.w_at(55) == 1.0


def test_pseudo_labels():
    w = srea.ema_weights(5)
    assert sum(w) == pytest.approx(1.0)
    y = srea.cluster_pseudo_label([0.0, 0.0], [1.0, 0.0, 0.0, 3.0], 2)
    z = math.exp(-1) + math.exp(-3)
    assert y[0] == pytest.approx(math.exp(-1) / z)
    assert srea.correct_label(0, [0.1, 0.8, 0.1], [0.2, 0.7, 0.1], 0.5) == 1
    assert srea.correct_label(0, [0.1, 0.8, 0.1], [0.2, 0.7, 0.1], 0.0) == 0


def test_mann_whitney_matches_scipy():
    rng = np.random.default_rng(0)
    for na, nb in itertools.product(range(3, 9), repeat=2):
        a = rng.normal(size=na)
        b = rng.normal(0.7, 1.0, size=nb)
        ours = srea.mann_whitney_u(a.tolist(), b.tolist(), method="exact")
        ref = scipy.stats.mannwhitneyu(a, b, alternative="two-sided", method="exact")
        assert ours["u_a"] == pytest.approx(ref.statistic)
        assert ours["p"] == pytest.approx(ref.pvalue, rel=1e-10)
    with_ties = srea.mann_whitney_u([1, 1, 2, 2, 3], [2, 3, 3, 4, 4], method="normal")
    ref = scipy.stats.mannwhitneyu(
        [1, 1, 2, 2, 3], [2, 3, 3, 4, 4], alternative="two-sided", method="asymptotic"
    )
    assert with_ties["p"] == pytest.approx(ref.pvalue, rel=1e-9)


def test_friedman_matches_scipy():
    rng = np.random.default_rng(3)
    scores = rng.random((4, 8))
    ours = srea.friedman_test(scores.tolist())
    ref = scipy.stats.friedmanchisquare(*scores)
    assert ours["chi2"] == pytest.approx(ref.statistic)
    assert ours["p_chi2"] == pytest.approx(ref.pvalue)
    assert srea.nemenyi_cd(6, 10) == pytest.approx(2.384, abs=1e-3)


def test_metrics():
    assert srea.macro_f1([0, 1, 1, 1], [0, 0, 1, 1], 2) == pytest.approx(0.7333333)
    cm = srea.confusion_matrix([0, 1, 1, 1], [0, 0, 1, 1], 2)
    assert cm.tolist() == [[1, 1], [0, 2]]


def test_generators():
    X, y = srea.generate_cbf(90, 64, seed=2)
    assert X.shape == (90, 1, 64)
    assert np.bincount(y).tolist() == [30, 30, 30]
    series = srea.generate_chp_like(days=3)
    assert set(series) == {"timestamp", "P_tot", "T_amb", "T_water", "P_CHP"}
    assert series["P_CHP"].min() >= 0.0
    summer = srea.generate_chp_like(days=2, season="summer")
    assert np.all(summer["P_CHP"] == 0.0)
    Xw, yw = srea.windowize_chp(days=5)
    assert Xw.shape[1:] == (3, 36)
    assert yw.max() <= 4


def test_small_training_run_is_deterministic():
    options = {
        "n": 60,
        "length": 32,
        "epochs": 3,
        "lambda_init": 0,
        "delta_start": 1,
        "delta_end": 1,
        "encoder_channels": [4, 4, 4, 4],
        "embedding_dim": 3,
        "classifier_hidden": 4,
        "noise_ratio": 0.2,
    }
    a = srea.train(options, seed=1)
    b = srea.train(options, seed=1)
    assert a == b
    assert 0.0 <= a["test_macro_f1"] <= 1.0
    assert len(a["confusion"]) == 3
    assert srea.config_hash(options) == a["config_hash"]


def test_bad_options_raise():
    with pytest.raises(srea.ConfigError):
        srea.train({"noise_ratio": 1.5})
    with pytest.raises(ValueError):
        srea.train({"no_such_key": 1})
