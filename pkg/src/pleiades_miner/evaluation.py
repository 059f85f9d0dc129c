"""Leave-one-out evaluation, admissibility, and fast grid evaluators.

Sensitivity and specificity are kept as exact Fractions so the
admissibility rule (both at least one half) and all tie-breaks are
immune to floating-point edge effects; percentages are rendered with
banker's rounding only at display time.

The fast evaluators (kNN, Parzen density, naive Bayes, decision tree)
exist because a grid search over leave-one-out folds refits thousands
of models; each one is required to produce bit-identical confusion
counts to the naive evaluator that literally refits the classifier on
every fold, and the test suite checks that agreement. They achieve it
by reusing quantities whose floating-point values are provably
unchanged by deleting one training row (per-row distances, integer
count tables) and by replicating the classifiers' arithmetic
expressions exactly.
"""

from decimal import Decimal, ROUND_HALF_EVEN
from fractions import Fraction

import numpy as np

from .classifiers import METHODS, DegenerateModelError
from .classifiers.base import row_sq_euclidean, weighted_user_prior
from .classifiers.kernels import density_kernel_values
from .classifiers.knn import KNNRiskClassifier
from .classifiers.density import ParzenDensityClassifier

__all__ = [
    "confusion", "sensitivity", "specificity", "percent_display",
    "loocv", "loocv_method", "select_best",
    "loocv_knn_grid", "loocv_pdfe_grid", "loocv_nb_grid", "loocv_dt",
]


def confusion(y_true, y_pred):
    """Confusion counts (tp, fn, tn, fp) with 1 = user as positive."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred differ in length")
    tp = int(((y_true == 1) & (y_pred == 1)).sum())
    fn = int(((y_true == 1) & (y_pred == 0)).sum())
    tn = int(((y_true == 0) & (y_pred == 0)).sum())
    fp = int(((y_true == 0) & (y_pred == 1)).sum())
    return tp, fn, tn, fp


def sensitivity(tp, fn):
    """Exact user recall tp / (tp + fn)."""
    return Fraction(tp, tp + fn)


def specificity(tn, fp):
    """Exact non-user recall tn / (tn + fp)."""
    return Fraction(tn, tn + fp)


def percent_display(ratio):
    """Render a Fraction (or float) as a percentage string with two
    decimals, rounding half to even."""
    if isinstance(ratio, Fraction):
        value = Decimal(ratio.numerator) * 100 / Decimal(ratio.denominator)
    else:
        value = Decimal(repr(float(ratio))) * 100
    return str(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN))


def _check_loocv_inputs(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    n_user = int((y == 1).sum())
    n_non = int((y == 0).sum())
    if n_user + n_non != y.shape[0]:
        raise ValueError("labels must be 0 or 1")
    if n_user < 2 or n_non < 2:
        raise ValueError("leave-one-out needs at least two rows per class")
    return X, y.astype(np.int8)


def loocv(factory, X, y):
    """Reference leave-one-out confusion counts.

    factory() must return an unfitted classifier. One model is fit per
    row with that row held out; DegenerateModelError from any fold
    propagates so callers can mark the configuration inadmissible.
    """
    X, y = _check_loocv_inputs(X, y)
    n = X.shape[0]
    pred = np.empty(n, dtype=np.int8)
    for i in range(n):
        Xw = np.delete(X, i, axis=0)
        yw = np.delete(y, i)
        model = factory().fit(Xw, yw)
        pred[i] = model.predict(X[i:i + 1])[0]
    return confusion(y, pred)


def loocv_method(method, params, user_weight, X, y):
    """Reference LOOCV of one named method configuration."""
    cls = METHODS[method]

    def factory():
        return cls(user_weight=user_weight, **params)

    return loocv(factory, X, y)


def select_best(results):
    """Pick the best admissible configuration.

    results yields (config_id, (tp, fn, tn, fp)). Admissible means both
    sensitivity and specificity are at least one half (exactly one half
    qualifies). The winner maximizes min(sens, spec), then sens + spec,
    then has the lowest config_id. Returns (config_id, counts) or None
    when nothing is admissible.
    """
    half = Fraction(1, 2)
    best = None
    best_key = None
    for config_id, counts in results:
        tp, fn, tn, fp = counts
        sens = sensitivity(tp, fn)
        spec = specificity(tn, fp)
        if sens < half or spec < half:
            continue
        key = (min(sens, spec), sens + spec)
        if (best_key is None or key > best_key
                or (key == best_key and config_id < best[0])):
            best_key = key
            best = (config_id, counts)
    return best


# ---------------------------------------------------------------------------
# fast grid evaluators


def _counts_from_preds(y, pred):
    return confusion(y, pred)


def loocv_knn_grid(X, y, configs):
    """LOOCV counts for many kNN configurations in one pass.

    configs is a sequence of parameter dicts accepted by
    KNNRiskClassifier (including user_weight). The per-fold distance
    row and its argsort are computed once and shared by every
    configuration; neighbourhood selections are additionally cached
    across configurations differing only in vote kernel or weight.
    Bit-identical to loocv() with per-fold refits.
    """
    X, y = _check_loocv_inputs(X, y)
    n = X.shape[0]
    protos = []
    for cfg in configs:
        p = KNNRiskClassifier(**cfg)
        p.user_weight_ = float(p.user_weight)
        p.n_features_in_ = X.shape[1]
        key = (p.metric, int(p.k),
               None if p.k_fisher is None else int(p.k_fisher),
               p.transform_kernel)
        protos.append((p, key))
    preds = np.empty((len(protos), n), dtype=np.int8)
    for i in range(n):
        Xw = np.delete(X, i, axis=0)
        yw = np.delete(y, i)
        sq = row_sq_euclidean(X[i], Xw)
        order = np.argsort(sq, kind="stable")
        cache = {}
        for c, (p, key) in enumerate(protos):
            p.X_ = Xw
            p.y_ = yw
            sel = cache.get(key)
            if sel is None:
                sel = p._select_neighbors(X[i], order, sq)
                cache[key] = sel
            risk = p._vote(*sel)
            preds[c, i] = 1 if risk >= 0.5 else 0
    return [_counts_from_preds(y, preds[c]) for c in range(len(protos))]


def _class_sq_matrix(Xc):
    n = Xc.shape[0]
    sq = np.empty((n, n), dtype=np.float64)
    for i in range(n):
        sq[i] = row_sq_euclidean(Xc[i], Xc)
    return sq


def loocv_pdfe_grid(X, y, configs):
    """LOOCV counts for many Parzen-density configurations in one pass.

    configs is a sequence of dicts with k_density, kernel and
    user_weight. Distances are computed once; each fold's kernel radii
    for the held-out row's class are derived from the full-fit sorted
    distance lists (removing one value from a sorted list shifts the
    order statistics by at most one slot), and the other class reuses
    its full-fit radii unchanged. Folds where a radius degenerates to
    zero (duplicate rows) fall back to a literal refit. Bit-identical
    to loocv().
    """
    X, y = _check_loocv_inputs(X, y)
    n, d = X.shape
    idx_class = [np.flatnonzero(y == 0), np.flatnonzero(y == 1)]
    Xc = [X[idx_class[0]], X[idx_class[1]]]
    n_c = [len(idx_class[0]), len(idx_class[1])]
    pos_in_class = np.empty(n, dtype=np.int64)
    for c in (0, 1):
        pos_in_class[idx_class[c]] = np.arange(n_c[c])
    sq_mat = [_class_sq_matrix(Xc[0]), _class_sq_matrix(Xc[1])]
    sorted_sq = [np.sort(sq_mat[0], axis=1), np.sort(sq_mat[1], axis=1)]
    # distances from every row to every member of each class
    cross = []
    for c in (0, 1):
        m = np.empty((n, n_c[c]), dtype=np.float64)
        for i in range(n):
            m[i] = row_sq_euclidean(X[i], Xc[c])
        cross.append(m)

    groups = {}
    for ci, cfg in enumerate(configs):
        key = (int(cfg["k_density"]), cfg["kernel"])
        groups.setdefault(key, []).append(ci)

    preds = np.empty((len(configs), n), dtype=np.int8)
    for (k, kernel), members in groups.items():
        full_radii_sq = []
        full_has_zero = False
        for c in (0, 1):
            k_eff = min(k, n_c[c] - 1)
            r = sorted_sq[c][:, k_eff]
            full_radii_sq.append(r)
            if np.any(r <= 0.0):
                full_has_zero = True
        for i in range(n):
            c_i = int(y[i])
            c_o = 1 - c_i
            pos = pos_in_class[i]
            n_fold = [n_c[0], n_c[1]]
            n_fold[c_i] -= 1
            k_eff_fold = min(k, n_fold[c_i] - 1)

            refit_needed = full_has_zero
            if not refit_needed:
                s_k = np.delete(sorted_sq[c_i][:, k_eff_fold], pos)
                s_k1 = np.delete(sorted_sq[c_i][:, k_eff_fold + 1], pos)
                v = np.delete(sq_mat[c_i][:, pos], pos)
                r_aff_sq = np.where(s_k < v, s_k, s_k1)
                if np.any(r_aff_sq <= 0.0):
                    refit_needed = True
            if refit_needed:
                Xw = np.delete(X, i, axis=0)
                yw = np.delete(y, i)
                model = ParzenDensityClassifier(
                    k_density=k, kernel=kernel).fit(Xw, yw)
                dens_u = model._class_density(
                    X[i:i + 1], model.X_user_, model.radii_user_)[0]
                dens_n = model._class_density(
                    X[i:i + 1], model.X_non_, model.radii_non_)[0]
            else:
                dist_aff = np.sqrt(np.delete(cross[c_i][i], pos))
                contrib_aff = density_kernel_values(
                    kernel, dist_aff, np.sqrt(r_aff_sq), d)
                dens_aff = contrib_aff.sum() / n_fold[c_i]
                dist_o = np.sqrt(cross[c_o][i])
                contrib_o = density_kernel_values(
                    kernel, dist_o, np.sqrt(full_radii_sq[c_o]), d)
                dens_o = contrib_o.sum() / n_fold[c_o]
                dens_u = dens_aff if c_i == 1 else dens_o
                dens_n = dens_aff if c_i == 0 else dens_o
            n_user = n_fold[1]
            n_non = n_fold[0]
            for ci in members:
                w = float(configs[ci]["user_weight"])
                prior = weighted_user_prior(n_user, n_non, w)
                f_user = prior * dens_u
                f_non = (1.0 - prior) * dens_n
                total = f_user + f_non
                risk = prior if total <= 0.0 else f_user / total
                preds[ci, i] = 1 if risk >= 0.5 else 0
    return [_counts_from_preds(y, preds[c]) for c in range(len(configs))]


def loocv_nb_grid(X, y, weights, max_categorical=20):
    """LOOCV counts of the naive Bayes model for a grid of user weights.

    The weight enters the naive Bayes model only through the class
    prior, so all per-fold feature likelihoods are computed once
    (categorical count tables by integer downdates of the full-data
    tables, Gaussian moments recomputed on the fold with the same
    numpy expressions the classifier uses) and every weight reuses
    them. Bit-identical to loocv().
    """
    import math

    from .classifiers.bayes import _VAR_FLOOR_RATIO, _VAR_FLOOR_ABS

    X, y = _check_loocv_inputs(X, y)
    n, d = X.shape
    max_cat = int(max_categorical)
    cols_by_class = [[X[y == c][:, j] for j in range(d)] for c in (0, 1)]
    n_class = [int((y == 0).sum()), int((y == 1).sum())]
    pos_in_class = np.empty(n, dtype=np.int64)
    for c in (0, 1):
        pos_in_class[np.flatnonzero(y == c)] = np.arange(n_class[c])

    total_counts = []
    class_counts = []
    for j in range(d):
        tc = {}
        for v in X[:, j]:
            tc[v] = tc.get(v, 0) + 1
        total_counts.append(tc)
        per_class = []
        for c in (0, 1):
            cc = {}
            for v in cols_by_class[c][j]:
                cc[v] = cc.get(v, 0) + 1
            per_class.append(cc)
        class_counts.append(per_class)

    log_lik = np.empty((n, 2, d), dtype=np.float64)
    for i in range(n):
        c_i = int(y[i])
        pos = pos_in_class[i]
        nc_fold = [n_class[0], n_class[1]]
        nc_fold[c_i] -= 1
        for j in range(d):
            x = X[i, j]
            V = len(total_counts[j]) - (1 if total_counts[j][x] == 1 else 0)
            if V <= max_cat:
                for c in (0, 1):
                    cnt = class_counts[j][c].get(x, 0)
                    if c == c_i:
                        cnt -= 1
                    if cnt > 0:
                        log_lik[i, c, j] = math.log(
                            (cnt + 1) / (nc_fold[c] + V))
                    else:
                        log_lik[i, c, j] = math.log(
                            1.0 / (nc_fold[c] + V))
            else:
                col_fold = np.delete(X[:, j], i)
                overall_var = float(np.var(col_fold, ddof=1))
                floor = _VAR_FLOOR_RATIO * overall_var
                if floor <= 0.0:
                    floor = _VAR_FLOOR_ABS
                for c in (0, 1):
                    col_c = cols_by_class[c][j]
                    if c == c_i:
                        col_c = np.delete(col_c, pos)
                    mean = float(col_c.mean())
                    var = (float(np.var(col_c, ddof=1))
                           if col_c.shape[0] >= 2 else 0.0)
                    var = max(var, floor)
                    log_lik[i, c, j] = -0.5 * (
                        math.log(2.0 * math.pi * var) + (x - mean) ** 2 / var)

    out = []
    for w in weights:
        w = float(w)
        pred = np.empty(n, dtype=np.int8)
        for i in range(n):
            c_i = int(y[i])
            n_user = n_class[1] - (1 if c_i == 1 else 0)
            n_non = n_class[0] - (1 if c_i == 0 else 0)
            prior = weighted_user_prior(n_user, n_non, w)
            score0 = math.log(1.0 - prior)
            score1 = math.log(prior)
            for j in range(d):
                score0 += log_lik[i, 0, j]
                score1 += log_lik[i, 1, j]
            gap = min(max(score0 - score1, -745.0), 745.0)
            risk = 1.0 / (1.0 + math.exp(gap))
            pred[i] = 1 if risk >= 0.5 else 0
        out.append(confusion(y, pred))
    return out


def loocv_dt(X, y, criterion="entropy", min_leaf=3, user_weight=1.0):
    """LOOCV counts for one decision-tree configuration.

    Uses the compiled scan kernel when numba is importable and the pure
    reference tree otherwise; both routes produce identical counts (the
    kernel mirrors the reference arithmetic expression for expression,
    and the test suite holds them to bit equality).
    """
    X, y = _check_loocv_inputs(X, y)
    from . import _speed
    if _speed.HAVE_NUMBA:
        return _speed.dt_loocv_counts(X, y, criterion, int(min_leaf),
                                      float(user_weight))
    return loocv_method(
        "DT", {"criterion": criterion, "min_leaf": int(min_leaf)},
        float(user_weight), X, y)
