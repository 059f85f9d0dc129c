"""Naive Bayes risk classifier over mixed feature types.

Each feature is treated independently. Features with at most
max_categorical distinct training values are handled as categorical
with add-one smoothing; the rest get per-class univariate Gaussians.
The user class prior is weighted by user_weight; likelihoods are
accumulated in log space.
"""

import math

import numpy as np

from .base import RiskClassifier, weighted_user_prior, class_split

__all__ = ["NaiveBayesRiskClassifier"]

_VAR_FLOOR_RATIO = 1e-9
_VAR_FLOOR_ABS = 1e-12


class NaiveBayesRiskClassifier(RiskClassifier):
    """Independent-feature Bayes risk model.

    Parameters
    ----------
    user_weight : prior multiplicity of the user class
    max_categorical : largest number of distinct values a feature may
        take and still be modelled as categorical

    For a categorical feature with V distinct training values the
    smoothed class likelihood of value x is (count_class[x] + 1) /
    (n_class + V); values unseen in a class (or entirely unseen at
    predict time) contribute 1 / (n_class + V). Gaussian features use
    ddof=1 variances floored at 1e-9 times the overall feature variance
    (an absolute floor covers constant-in-class features).
    """

    def __init__(self, user_weight=1.0, max_categorical=20):
        self.user_weight = user_weight
        self.max_categorical = max_categorical

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        Xn, Xu = class_split(X, y)
        self.prior_user_ = weighted_user_prior(
            Xu.shape[0], Xn.shape[0], self.user_weight_)
        self.feature_models_ = []
        for j in range(X.shape[1]):
            col = X[:, j]
            values = np.unique(col)
            if values.shape[0] <= int(self.max_categorical):
                V = values.shape[0]
                tables = []
                for Xc in (Xn, Xu):
                    n_c = Xc.shape[0]
                    counts = {}
                    for v in Xc[:, j]:
                        counts[v] = counts.get(v, 0) + 1
                    tables.append({
                        v: math.log((c + 1) / (n_c + V))
                        for v, c in counts.items()
                    })
                unseen = (math.log(1.0 / (Xn.shape[0] + V)),
                          math.log(1.0 / (Xu.shape[0] + V)))
                self.feature_models_.append(("cat", tables, unseen))
            else:
                overall_var = float(np.var(col, ddof=1))
                floor = _VAR_FLOOR_RATIO * overall_var
                if floor <= 0.0:
                    floor = _VAR_FLOOR_ABS
                stats = []
                for Xc in (Xn, Xu):
                    mean = float(Xc[:, j].mean())
                    var = (float(np.var(Xc[:, j], ddof=1))
                           if Xc.shape[0] >= 2 else 0.0)
                    stats.append((mean, max(var, floor)))
                self.feature_models_.append(("gauss", stats, None))
        return self

    def risk(self, X):
        X = self._validate_risk(X)
        out = np.empty(X.shape[0], dtype=np.float64)
        log_prior = (math.log(1.0 - self.prior_user_),
                     math.log(self.prior_user_))
        for i in range(X.shape[0]):
            score = [log_prior[0], log_prior[1]]
            for j, (kind, per_class, unseen) in enumerate(self.feature_models_):
                x = X[i, j]
                if kind == "cat":
                    for c in (0, 1):
                        score[c] += per_class[c].get(x, unseen[c])
                else:
                    for c in (0, 1):
                        mean, var = per_class[c]
                        score[c] -= 0.5 * (math.log(2.0 * math.pi * var)
                                           + (x - mean) ** 2 / var)
            gap = min(max(score[0] - score[1], -745.0), 745.0)
            out[i] = 1.0 / (1.0 + math.exp(gap))
        return out
