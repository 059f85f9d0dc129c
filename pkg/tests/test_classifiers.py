"""Classifier behavior: impurity gains, each method's hand-checkable
cases, symmetry constructions, and cross-method properties."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pleiades_miner.classifiers import (
    CRITERIA,
    WEIGHT_GRID,
    DegenerateModelError,
    DecisionTreeRiskClassifier,
    FisherLDAClassifier,
    GaussianModelClassifier,
    KNNRiskClassifier,
    LogisticRiskClassifier,
    METHODS,
    NaiveBayesRiskClassifier,
    ParzenDensityClassifier,
    RandomForestRiskClassifier,
    density_kernel_values,
    neighbor_weights,
    node_impurity,
    regularize_spd,
    split_gain,
    unit_ball_volume,
    weighted_user_prior,
)
from pleiades_miner.classifiers.base import row_sq_euclidean


# ---------------------------------------------------------------------------
# impurity and gain


def plugin_gain(criterion, nu_l, nn_l, nu_r, nn_r, weight):
    """Direct plug-in evaluation of the weighted base-function gain."""

    def base(nu, nn):
        m = np.array([nu * weight, float(nn)])
        p = m / m.sum()
        if criterion == "entropy":
            nz = p[p > 0]
            return float(-(nz * np.log2(nz)).sum())
        if criterion == "gini":
            return float(1.0 - (p ** 2).sum())
        return float(2.0 * np.sqrt(p[0] * p[1]))

    total = (nu_l + nu_r) * weight + nn_l + nn_r
    m_l = nu_l * weight + nn_l
    m_r = nu_r * weight + nn_r
    return (base(nu_l + nu_r, nn_l + nn_r)
            - m_l / total * base(nu_l, nn_l)
            - m_r / total * base(nu_r, nn_r))


def test_balanced_node_impurities():
    assert node_impurity("entropy", 1, 1, 1.0) == 1.0
    assert node_impurity("gini", 1, 1, 1.0) == 0.5
    assert node_impurity("dkm", 1, 1, 1.0) == 1.0


def test_pure_node_impurity_is_zero():
    for criterion in CRITERIA:
        assert node_impurity(criterion, 7, 0, 1.0) == 0.0
        assert node_impurity(criterion, 0, 7, 2.0) == 0.0


def test_unknown_criterion_rejected():
    with pytest.raises(ValueError):
        node_impurity("twoing", 1, 1, 1.0)


def test_perfect_split_of_balanced_node_has_entropy_gain_one():
    assert split_gain("entropy", 5, 0, 0, 5) == 1.0


def test_label_independent_split_has_zero_gain():
    for criterion in CRITERIA:
        for w in (1.0, 1.15):
            assert split_gain(criterion, 3, 2, 3, 2, w) == 0.0


def test_empty_split_side_rejected():
    with pytest.raises(ValueError):
        split_gain("gini", 0, 0, 3, 2)


@settings(max_examples=300, deadline=None)
@given(
    nu_l=st.integers(0, 40), nn_l=st.integers(0, 40),
    nu_r=st.integers(0, 40), nn_r=st.integers(0, 40),
    criterion=st.sampled_from(CRITERIA),
    weight=st.sampled_from(WEIGHT_GRID),
)
def test_split_gain_matches_plugin_oracle(nu_l, nn_l, nu_r, nn_r,
                                          criterion, weight):
    if nu_l + nn_l == 0 or nu_r + nn_r == 0:
        return
    got = split_gain(criterion, nu_l, nn_l, nu_r, nn_r, weight)
    want = plugin_gain(criterion, nu_l, nn_l, nu_r, nn_r, weight)
    assert abs(got - want) <= 1e-12


# ---------------------------------------------------------------------------
# decision tree


def _leaf_of(clf, row):
    node = 0
    while clf.tree_feature_[node] >= 0 or clf.tree_omega_[node] is not None:
        f = clf.tree_feature_[node]
        value = row @ clf.tree_omega_[node] if f < 0 else row[f]
        if value <= clf.tree_threshold_[node]:
            node = clf.tree_left_[node]
        else:
            node = clf.tree_right_[node]
    return node


def test_tree_pure_class_is_single_leaf():
    X = np.arange(10.0).reshape(-1, 1)
    up = DecisionTreeRiskClassifier().fit(X, np.ones(10, dtype=int))
    down = DecisionTreeRiskClassifier().fit(X, np.zeros(10, dtype=int))
    assert up.tree_feature_.shape[0] == 1
    assert np.all(up.risk(X) == 1.0)
    assert np.all(down.risk(X) == 0.0)


def test_tree_separable_threshold_sits_in_the_gap():
    X = np.array([0.0, 1, 2, 3, 10, 11, 12, 13]).reshape(-1, 1)
    y = np.array([0, 0, 0, 0, 1, 1, 1, 1])
    clf = DecisionTreeRiskClassifier(min_leaf=3).fit(X, y)
    assert 3.0 < clf.tree_threshold_[0] < 10.0
    assert np.array_equal(clf.predict(X), y)


def test_tree_respects_min_leaf_counts():
    rng = np.random.default_rng(11)
    X = rng.normal(size=(90, 4))
    y = (X[:, 0] + rng.normal(scale=0.7, size=90) > 0).astype(int)
    clf = DecisionTreeRiskClassifier(min_leaf=7).fit(X, y)
    leaves = np.array([_leaf_of(clf, row) for row in X])
    _, counts = np.unique(leaves, return_counts=True)
    assert counts.min() >= 7


def test_tree_fit_is_deterministic():
    rng = np.random.default_rng(12)
    X = rng.normal(size=(60, 3))
    y = (X[:, 1] > 0.2).astype(int)
    a = DecisionTreeRiskClassifier(criterion="dkm").fit(X, y)
    b = DecisionTreeRiskClassifier(criterion="dkm").fit(X, y)
    assert np.array_equal(a.tree_feature_, b.tree_feature_)
    assert np.array_equal(a.tree_threshold_, b.tree_threshold_)
    assert np.array_equal(a.risk(X), b.risk(X))


def test_tree_constant_feature_gives_single_leaf():
    X = np.ones((12, 1))
    y = np.array([0, 1] * 6)
    clf = DecisionTreeRiskClassifier().fit(X, y)
    assert clf.tree_feature_.shape[0] == 1
    assert clf.risk(X[:1])[0] == 0.5


def test_tree_unsplittable_leaf_risk_is_weighted_fraction():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([1, 0, 0, 1])
    previous = -1.0
    for w in WEIGHT_GRID:
        clf = DecisionTreeRiskClassifier(min_leaf=3, user_weight=w).fit(X, y)
        r = clf.risk(X[:1])[0]
        assert r == 2 * w / (2 * w + 2)
        assert r > previous
        previous = r


def test_tree_fisher_split_captures_oblique_boundary():
    rng = np.random.default_rng(13)
    Z = rng.normal(size=(200, 2))
    s = Z.sum(axis=1)
    keep = np.abs(s) > 0.6
    X, y = Z[keep], (s[keep] > 0).astype(int)
    clf = DecisionTreeRiskClassifier(fisher_splits=True, min_leaf=3).fit(X, y)
    assert clf.tree_omega_[0] is not None
    assert np.array_equal(clf.predict(X), y)


def test_tree_invalid_params_rejected():
    X = np.arange(8.0).reshape(-1, 1)
    y = np.array([0, 1] * 4)
    with pytest.raises(ValueError):
        DecisionTreeRiskClassifier(criterion="nope").fit(X, y)
    with pytest.raises(ValueError):
        DecisionTreeRiskClassifier(min_leaf=0).fit(X, y)


# ---------------------------------------------------------------------------
# linear discriminant


def _isotropic_block(n_tiles):
    block = np.array(
        [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    return np.tile(block, (n_tiles, 1))


def test_lda_direction_follows_mean_gap_under_isotropy():
    Xn = _isotropic_block(15)
    Xu = Xn + np.array([2.0, 0.0, 0.0])
    X = np.vstack([Xn, Xu])
    y = np.array([0] * 60 + [1] * 60)
    clf = FisherLDAClassifier().fit(X, y)
    assert clf.omega_[0] > 0
    assert clf.omega_[1] == 0.0
    assert clf.omega_[2] == 0.0


def test_lda_equal_means_degenerate():
    rng = np.random.default_rng(14)
    Z = rng.normal(size=(20, 2))
    X = np.vstack([Z, Z])
    y = np.array([0] * 20 + [1] * 20)
    with pytest.raises(DegenerateModelError):
        FisherLDAClassifier().fit(X, y)


def test_lda_small_class_degenerate():
    X = np.arange(10.0).reshape(-1, 1)
    y = np.array([0] * 9 + [1])
    with pytest.raises(DegenerateModelError):
        FisherLDAClassifier().fit(X, y)


def test_lda_separable_threshold_and_hard_labels():
    X = np.concatenate([np.arange(10.0), np.arange(20.0, 30.0)]).reshape(-1, 1)
    y = np.array([0] * 10 + [1] * 10)
    clf = FisherLDAClassifier().fit(X, y)
    risks = clf.risk(X)
    assert set(np.unique(risks)) <= {0.0, 1.0}
    assert np.array_equal(risks.astype(int), y)
    cut = clf.threshold_ / clf.omega_[0]
    assert 9.0 < cut < 20.0


# ---------------------------------------------------------------------------
# gaussian model


def test_gm_identical_classes_risk_half():
    rng = np.random.default_rng(15)
    Z = rng.normal(size=(25, 3))
    X = np.vstack([Z, Z])
    y = np.array([0] * 25 + [1] * 25)
    clf = GaussianModelClassifier().fit(X, y)
    queries = rng.normal(size=(12, 3))
    assert np.all(np.abs(clf.risk(queries) - 0.5) <= 1e-12)


def test_gm_midpoint_of_mirrored_classes_risk_half():
    rng = np.random.default_rng(16)
    Z = rng.normal(size=(40, 2))
    shift = np.array([1.5, -0.5])
    X = np.vstack([Z - shift, Z + shift])
    y = np.array([0] * 40 + [1] * 40)
    clf = GaussianModelClassifier().fit(X, y)
    midpoint = Z.mean(axis=0).reshape(1, -1)
    assert abs(clf.risk(midpoint)[0] - 0.5) <= 1e-9


def test_gm_weight_scales_prior_monotonically():
    rng = np.random.default_rng(17)
    X = rng.normal(size=(50, 2))
    X[25:] += 1.0
    y = np.array([0] * 25 + [1] * 25)
    queries = rng.normal(size=(6, 2))
    last = np.zeros(6)
    for w in WEIGHT_GRID:
        r = GaussianModelClassifier(user_weight=w).fit(X, y).risk(queries)
        assert np.all(r >= last - 1e-12)
        last = r


def test_gm_single_row_class_degenerate():
    X = np.arange(12.0).reshape(-1, 1)
    y = np.array([0] * 11 + [1])
    with pytest.raises(DegenerateModelError):
        GaussianModelClassifier().fit(X, y)


# ---------------------------------------------------------------------------
# kernel density risk


def test_pdfe_symmetric_pair_midpoint_risk_half():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    y = np.array([0, 0, 1, 1])
    for kernel in ("uniform", "triangular", "epanechnikov", "gaussian"):
        clf = ParzenDensityClassifier(k_density=1, kernel=kernel).fit(X, y)
        assert abs(clf.risk(np.array([[0.0]]))[0] - 0.5) <= 1e-12


def test_pdfe_gaussian_matches_kde_oracle():
    Xu = np.arange(5.0)
    Xn = np.arange(10.0, 14.0)
    X = np.concatenate([Xn, Xu]).reshape(-1, 1)
    y = np.array([0] * 4 + [1] * 5)
    clf = ParzenDensityClassifier(k_density=1, kernel="gaussian").fit(X, y)
    assert np.all(clf.radii_user_ == 1.0)
    assert np.all(clf.radii_non_ == 1.0)
    for x in (0.3, 2.5, 9.7, 11.2):
        f_u = np.exp(-0.5 * (x - Xu) ** 2).sum() / np.sqrt(2 * np.pi) / 5
        f_n = np.exp(-0.5 * (x - Xn) ** 2).sum() / np.sqrt(2 * np.pi) / 4
        p_u = 5 / 9
        want = p_u * f_u / (p_u * f_u + (1 - p_u) * f_n)
        got = clf.risk(np.array([[x]]))[0]
        assert abs(got - want) <= 1e-12


def test_pdfe_compact_kernel_far_query_falls_back_to_prior():
    X = np.array([[0.0], [1.0], [5.0], [6.0]])
    y = np.array([0, 0, 1, 1])
    clf = ParzenDensityClassifier(k_density=1, kernel="epanechnikov").fit(X, y)
    assert clf.risk(np.array([[100.0]]))[0] == 0.5
    assert clf.prior_fallbacks_ == 1


def test_pdfe_local_user_mass_dominates():
    X = np.array([[0.0], [0.1], [5.0], [5.1]])
    y = np.array([1, 1, 0, 0])
    clf = ParzenDensityClassifier(k_density=1, kernel="uniform").fit(X, y)
    assert clf.risk(np.array([[0.05]]))[0] == 1.0


def test_pdfe_coincident_class_degenerate():
    X = np.array([[1.0], [1.0], [3.0], [4.0]])
    y = np.array([1, 1, 0, 0])
    with pytest.raises(DegenerateModelError):
        ParzenDensityClassifier(k_density=1).fit(X, y)


def test_pdfe_invalid_params_rejected():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    with pytest.raises(ValueError):
        ParzenDensityClassifier(kernel="cauchy").fit(X, y)
    with pytest.raises(ValueError):
        ParzenDensityClassifier(k_density=0).fit(X, y)


# ---------------------------------------------------------------------------
# naive Bayes


def test_nb_posterior_matches_manual_product():
    rng = np.random.default_rng(18)
    X = rng.integers(0, 3, size=(14, 3)).astype(float)
    y = np.array([0] * 8 + [1] * 6)
    w = 1.5
    clf = NaiveBayesRiskClassifier(user_weight=w).fit(X, y)
    query = np.array([2.0, 0.0, 1.0])

    like = [1.0, 1.0]
    for j in range(3):
        V = np.unique(X[:, j]).shape[0]
        for c, rows in ((0, X[y == 0]), (1, X[y == 1])):
            count = int((rows[:, j] == query[j]).sum())
            like[c] *= (count + 1) / (rows.shape[0] + V)
    prior_u = 6 * w / (6 * w + 8)
    want = prior_u * like[1] / (prior_u * like[1] + (1 - prior_u) * like[0])
    got = clf.risk(query.reshape(1, -1))[0]
    assert abs(got - want) <= 1e-12


def test_nb_class_independent_feature_returns_weighted_prior():
    values = np.array([0.0, 1.0, 2.0, 0.0, 1.0])
    X = np.concatenate([values, values]).reshape(-1, 1)
    y = np.array([0] * 5 + [1] * 5)
    for w in (0.25, 1.0, 3.0):
        clf = NaiveBayesRiskClassifier(user_weight=w).fit(X, y)
        want = weighted_user_prior(5, 5, w)
        assert np.all(np.abs(clf.risk(X) - want) <= 1e-12)


def test_nb_perfect_binary_feature_is_smoothing_limited():
    X = np.array([1.0] * 10 + [0.0] * 10).reshape(-1, 1)
    y = np.array([1] * 10 + [0] * 10)
    risk = NaiveBayesRiskClassifier().fit(X, y).risk(np.array([[1.0]]))[0]
    assert 0.9 < risk < 1.0


def test_nb_unseen_category_uses_floor_mass():
    X = np.array([0.0, 1.0, 2.0, 0.0, 1.0, 2.0]).reshape(-1, 1)
    y = np.array([0, 0, 0, 1, 1, 1])
    clf = NaiveBayesRiskClassifier().fit(X, y)
    assert abs(clf.risk(np.array([[99.0]]))[0] - 0.5) <= 1e-12


def test_nb_gaussian_branch_handles_constant_class_feature():
    rng = np.random.default_rng(19)
    cont = rng.normal(size=30)
    cont[:15] = 4.0  # constant within the non-user class
    X = cont.reshape(-1, 1)
    y = np.array([0] * 15 + [1] * 15)
    clf = NaiveBayesRiskClassifier(max_categorical=3).fit(X, y)
    kind, _, _ = clf.feature_models_[0]
    assert kind == "gauss"
    r = clf.risk(X)
    assert np.all((r >= 0) & (r <= 1))


def test_nb_feature_reordering_invariant():
    rng = np.random.default_rng(20)
    X = np.column_stack([
        rng.integers(0, 4, size=40).astype(float),
        rng.normal(size=40),
        rng.integers(0, 2, size=40).astype(float),
    ])
    y = (rng.random(40) < 0.4).astype(int)
    perm = [2, 0, 1]
    a = NaiveBayesRiskClassifier(max_categorical=6).fit(X, y).risk(X)
    b = NaiveBayesRiskClassifier(max_categorical=6).fit(
        X[:, perm], y).risk(X[:, perm])
    assert np.all(np.abs(a - b) <= 1e-12)


# ---------------------------------------------------------------------------
# logistic regression


def _weighted_loglik(Z, t, sw, beta):
    eta = Z @ beta
    return float(np.sum(sw * (t * eta - np.logaddexp(0.0, eta))))


def test_lr_antisymmetric_data_zero_intercept_positive_slope():
    X = np.array([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]).reshape(-1, 1)
    y = np.array([0, 0, 0, 1, 1, 1])
    clf = LogisticRiskClassifier().fit(X, y)
    assert abs(clf.intercept_) <= 1e-8
    assert clf.coef_[0] > 0


def test_lr_fit_maximizes_weighted_likelihood_locally():
    rng = np.random.default_rng(21)
    X = rng.normal(size=(24, 2))
    y = (X[:, 0] - 0.5 * X[:, 1] + rng.normal(scale=1.2, size=24) > 0).astype(int)
    w = 1.5
    clf = LogisticRiskClassifier(user_weight=w).fit(X, y)
    beta = np.concatenate([[clf.intercept_], clf.coef_])

    Z = np.hstack([np.ones((24, 1)), X])
    sw = np.where(y == 1, w, 1.0)
    t = y.astype(float)
    ll_fit = _weighted_loglik(Z, t, sw, beta)

    offsets = np.arange(-0.06, 0.0601, 0.004)
    grid = np.stack(np.meshgrid(offsets, offsets, offsets,
                                indexing="ij")).reshape(3, -1).T
    betas = beta + grid
    eta = Z @ betas.T
    ll_grid = (sw[:, None] * (t[:, None] * eta - np.logaddexp(0.0, eta))).sum(axis=0)
    assert ll_fit >= ll_grid.max() - 1e-9


def test_lr_all_user_labels_drive_risk_to_one():
    X = np.arange(8.0).reshape(-1, 1) - 3.5
    y = np.ones(8, dtype=int)
    clf = LogisticRiskClassifier().fit(X, y)
    assert np.all(clf.risk(X) > 0.99)


def test_lr_weight_equals_row_duplication():
    rng = np.random.default_rng(22)
    X = rng.normal(size=(30, 2))
    y = (X[:, 0] + rng.normal(scale=1.0, size=30) > 0).astype(int)
    doubled = LogisticRiskClassifier(user_weight=2.0).fit(X, y)
    X_dup = np.vstack([X, X[y == 1]])
    y_dup = np.concatenate([y, np.ones(int(y.sum()), dtype=int)])
    duplicated = LogisticRiskClassifier().fit(X_dup, y_dup)
    assert np.allclose(doubled.coef_, duplicated.coef_, atol=1e-6)
    assert abs(doubled.intercept_ - duplicated.intercept_) <= 1e-6


# ---------------------------------------------------------------------------
# nearest neighbours


def test_knn_self_match_risk_one():
    X = np.array([[0.0], [1.0], [5.0], [6.0]])
    y = np.array([1, 0, 0, 1])
    clf = KNNRiskClassifier(k=1).fit(X, y)
    assert clf.risk(np.array([[0.0]]))[0] == 1.0


def test_knn_majority_and_weighted_vote():
    X = np.array([[0.0], [0.2], [0.4], [10.0]])
    y = np.array([1, 1, 0, 0])
    query = np.array([[0.1]])
    plain = KNNRiskClassifier(k=3).fit(X, y)
    assert plain.risk(query)[0] == pytest.approx(2 / 3, abs=1e-12)
    half = KNNRiskClassifier(k=3, user_weight=0.5).fit(X, y)
    assert half.risk(query)[0] == pytest.approx(0.5, abs=1e-12)


def test_knn_vanishing_kernel_falls_back_to_equal_votes():
    X = np.array([[-1.0], [1.0]])
    y = np.array([0, 1])
    clf = KNNRiskClassifier(k=2, kernel="triangular").fit(X, y)
    assert clf.risk(np.array([[0.0]]))[0] == 0.5


def test_knn_k_capped_at_training_size():
    rng = np.random.default_rng(23)
    X = rng.normal(size=(20, 2))
    y = (rng.random(20) < 0.3).astype(int)
    clf = KNNRiskClassifier(k=50).fit(X, y)
    nu = int(y.sum())
    want = weighted_user_prior(nu, 20 - nu, 1.0)
    assert clf.risk(rng.normal(size=(3, 2)))[0] == pytest.approx(want, abs=1e-12)


def test_knn_euclidean_rotation_invariant():
    rng = np.random.default_rng(24)
    X = rng.normal(size=(40, 3))
    y = (rng.random(40) < 0.4).astype(int)
    queries = rng.normal(size=(10, 3))
    Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    a = KNNRiskClassifier(k=5, kernel="gaussian").fit(X, y).risk(queries)
    b = KNNRiskClassifier(k=5, kernel="gaussian").fit(X @ Q, y).risk(queries @ Q)
    assert np.allclose(a, b, atol=1e-12)


def test_knn_fisher_metric_ignores_noise_axis():
    rng = np.random.default_rng(25)
    n = 120
    signal = np.concatenate([rng.normal(-2.0, 0.4, n // 2),
                             rng.normal(2.0, 0.4, n // 2)])
    noise = rng.normal(scale=40.0, size=n)
    X = np.column_stack([signal, noise])
    y = np.array([0] * (n // 2) + [1] * (n // 2))
    euclid = KNNRiskClassifier(k=7).fit(X, y)
    fisher = KNNRiskClassifier(k=7, metric="fisher").fit(X, y)
    acc_e = (euclid.predict(X) == y).mean()
    acc_f = (fisher.predict(X) == y).mean()
    assert acc_f > acc_e
    assert acc_f > 0.95


def test_knn_adaptive_metric_bounded_and_deterministic():
    rng = np.random.default_rng(26)
    X = rng.normal(size=(60, 3))
    y = (X[:, 0] > 0).astype(int)
    clf = KNNRiskClassifier(k=5, metric="adaptive", k_fisher=25,
                            transform_kernel="triangular").fit(X, y)
    queries = rng.normal(size=(8, 3))
    r1 = clf.risk(queries)
    r2 = clf.risk(queries)
    assert np.array_equal(r1, r2)
    assert np.all((r1 >= 0) & (r1 <= 1))


def test_knn_invalid_params_rejected():
    X = np.array([[0.0], [1.0]])
    y = np.array([0, 1])
    with pytest.raises(ValueError):
        KNNRiskClassifier(metric="cosine").fit(X, y)
    with pytest.raises(ValueError):
        KNNRiskClassifier(kernel="box").fit(X, y)
    with pytest.raises(ValueError):
        KNNRiskClassifier(k=0).fit(X, y)


# ---------------------------------------------------------------------------
# random forest


def test_forest_degenerates_to_single_tree():
    rng = np.random.default_rng(27)
    X = rng.normal(size=(80, 4))
    y = (X[:, 0] + 0.5 * X[:, 2] > 0).astype(int)
    tree = DecisionTreeRiskClassifier(min_leaf=5).fit(X, y)
    forest = RandomForestRiskClassifier(
        n_trees=1, min_leaf=5, bootstrap=False, mtry=None).fit(X, y)
    queries = rng.normal(size=(25, 4))
    assert np.array_equal(tree.risk(queries), forest.risk(queries))
    only = forest.trees_[0]
    assert np.array_equal(tree.tree_feature_, only.tree_feature_)
    assert np.array_equal(tree.tree_threshold_, only.tree_threshold_)


def test_forest_seed_reproducible():
    rng = np.random.default_rng(28)
    X = rng.normal(size=(70, 3))
    y = (X[:, 1] > 0.1).astype(int)
    queries = rng.normal(size=(9, 3))
    a = RandomForestRiskClassifier(n_trees=25, seed=7).fit(X, y).risk(queries)
    b = RandomForestRiskClassifier(n_trees=25, seed=7).fit(X, y).risk(queries)
    c = RandomForestRiskClassifier(n_trees=25, seed=8).fit(X, y).risk(queries)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_forest_separable_data_high_accuracy():
    rng = np.random.default_rng(29)
    X = np.concatenate([rng.normal(0.0, 0.5, 50),
                        rng.normal(10.0, 0.5, 50)]).reshape(-1, 1)
    y = np.array([0] * 50 + [1] * 50)
    clf = RandomForestRiskClassifier(n_trees=500, seed=3).fit(X, y)
    assert (clf.predict(X) == y).mean() >= 0.99


def test_forest_invalid_params_rejected():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    with pytest.raises(ValueError):
        RandomForestRiskClassifier(n_trees=0).fit(X, y)
    with pytest.raises(ValueError):
        RandomForestRiskClassifier(mtry=0).fit(X, y)


# ---------------------------------------------------------------------------
# shared machinery


def test_weighted_user_prior_values():
    assert weighted_user_prior(10, 10, 1.0) == 0.5
    assert weighted_user_prior(10, 10, 5.0) == 50 / 60
    assert weighted_user_prior(0, 10, 2.0) == 0.0


def test_regularize_spd_keeps_good_matrices_and_fixes_singular():
    good = np.array([[2.0, 0.3], [0.3, 1.0]])
    assert np.array_equal(regularize_spd(good), good)
    singular = np.array([[1.0, 1.0], [1.0, 1.0]])
    fixed = regularize_spd(singular)
    np.linalg.cholesky(fixed)  # must not raise
    with pytest.raises(DegenerateModelError):
        regularize_spd(np.zeros((2, 2)))


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_row_distances_survive_row_deletion(data):
    rng = np.random.default_rng(data.draw(st.integers(0, 10 ** 6)))
    n = data.draw(st.integers(2, 30))
    Y = rng.normal(size=(n, 3))
    x = rng.normal(size=3)
    mask = np.array([data.draw(st.booleans()) for _ in range(n)])
    if not mask.any():
        mask[0] = True
    full = row_sq_euclidean(x, Y)
    subset = row_sq_euclidean(x, Y[mask])
    assert np.array_equal(full[mask], subset)


def test_unfitted_model_raises():
    with pytest.raises(RuntimeError):
        GaussianModelClassifier().risk(np.zeros((1, 2)))


def test_feature_count_mismatch_rejected():
    X = np.random.default_rng(30).normal(size=(20, 3))
    y = (X[:, 0] > 0).astype(int)
    clf = GaussianModelClassifier().fit(X, y)
    with pytest.raises(ValueError):
        clf.risk(np.zeros((2, 4)))


def test_nonpositive_user_weight_rejected():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    for bad in (0.0, -1.0, float("nan")):
        with pytest.raises(ValueError):
            KNNRiskClassifier(user_weight=bad).fit(X, y)


# ---------------------------------------------------------------------------
# kernels


def test_neighbor_kernel_values():
    u = np.array([0.0, 0.5, 1.0])
    assert np.array_equal(neighbor_weights("uniform", u), [1.0, 1.0, 1.0])
    assert np.array_equal(neighbor_weights("triangular", u), [1.0, 0.5, 0.0])
    assert np.array_equal(neighbor_weights("epanechnikov", u), [1.0, 0.75, 0.0])
    assert np.allclose(neighbor_weights("gaussian", u),
                       np.exp([-0.0, -0.125, -0.5]))
    with pytest.raises(ValueError):
        neighbor_weights("box", u)


def test_unit_ball_volumes():
    assert unit_ball_volume(1) == pytest.approx(2.0, abs=1e-12)
    assert unit_ball_volume(2) == pytest.approx(math.pi, abs=1e-12)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3, abs=1e-12)


@pytest.mark.parametrize("kernel", ["uniform", "triangular", "epanechnikov",
                                    "gaussian"])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_density_kernels_integrate_to_one(kernel, d):
    r = 1.7
    # the uniform kernel steps to zero at rho = r, so integrate it over
    # its exact support; the others decay continuously
    upper = r if kernel == "uniform" else 10.0 * r
    rho = np.linspace(1e-9, upper, 200_001)
    values = density_kernel_values(kernel, rho, r, d)
    surface = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}[d]
    integral = np.trapezoid(values * surface * rho ** (d - 1), rho)
    assert integral == pytest.approx(1.0, abs=1e-6)


def test_density_kernel_per_point_radii_broadcast():
    dist = np.array([0.5, 2.0, 1.0])
    radii = np.array([1.0, 4.0, 0.5])
    got = density_kernel_values("triangular", dist, radii, 2)
    each = [density_kernel_values("triangular", np.array([d]), r, 2)[0]
            for d, r in zip(dist, radii)]
    assert np.array_equal(got, np.array(each))
    with pytest.raises(ValueError):
        density_kernel_values("uniform", dist, 0.0, 2)


# ---------------------------------------------------------------------------
# cross-method sweeps


def _sweep_data():
    rng = np.random.default_rng(31)
    X = rng.normal(size=(80, 4))
    y = (X @ np.array([1.0, -0.6, 0.3, 0.0])
         + rng.normal(scale=0.8, size=80) > 0).astype(int)
    return X, y, rng.normal(size=(30, 4))


@pytest.mark.parametrize("method", sorted(METHODS))
@pytest.mark.parametrize("weight", [0.05, 1.0, 5.0])
def test_all_methods_risk_within_unit_interval(method, weight):
    X, y, queries = _sweep_data()
    kwargs = {"user_weight": weight}
    if method == "RF":
        kwargs["n_trees"] = 20
    clf = METHODS[method](**kwargs).fit(X, y)
    r = clf.risk(queries)
    assert r.shape == (30,)
    assert np.all((r >= 0.0) & (r <= 1.0))
    assert set(np.unique(clf.predict(queries))) <= {0, 1}


@pytest.mark.parametrize("method", ["KNN", "GM", "PDFE", "NB"])
def test_weight_response_is_monotone(method):
    X, y, queries = _sweep_data()
    last = np.zeros(queries.shape[0])
    for w in WEIGHT_GRID:
        r = METHODS[method](user_weight=w).fit(X, y).risk(queries)
        assert np.all(r >= last - 1e-12)
        last = r
