"""Linear discriminant and logistic risk classifiers.

The Fisher discriminant projects onto omega solving
(S_user + S_non) omega = mu_user - mu_non and thresholds the projection
at the cut maximizing the weighted entropy gain, mirroring a one-node
decision stump on the projected axis. Its risk output is hard 0/1.

The logistic model maximizes a class-weighted log-likelihood (user rows
count user_weight times) by damped Newton iterations.
"""

import math

import numpy as np

from .base import DegenerateModelError, RiskClassifier, solve_spd, class_split
from .tree import node_impurity

__all__ = ["FisherLDAClassifier", "LogisticRiskClassifier"]


class FisherLDAClassifier(RiskClassifier):
    """Fisher discriminant with an entropy-gain threshold.

    Degenerate training sets (equal class means, singular pooled
    scatter, or a class with fewer than two rows) raise
    DegenerateModelError so callers can mark the configuration
    inadmissible instead of scoring garbage.
    """

    def __init__(self, user_weight=1.0):
        self.user_weight = user_weight

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        Xn, Xu = class_split(X, y)
        if Xu.shape[0] < 2 or Xn.shape[0] < 2:
            raise DegenerateModelError(
                "each class needs at least two rows to estimate scatter")
        mean_diff = Xu.mean(axis=0) - Xn.mean(axis=0)
        if not np.any(mean_diff != 0.0):
            raise DegenerateModelError("class means coincide")
        scatter = (np.cov(Xu, rowvar=False, ddof=1)
                   + np.cov(Xn, rowvar=False, ddof=1))
        self.omega_ = solve_spd(scatter, mean_diff)
        proj = X @ self.omega_

        order = np.argsort(proj, kind="stable")
        v = proj[order]
        lab = y[order]
        n = v.shape[0]
        w = self.user_weight_
        nu_total = int(lab.sum())
        nn_total = n - nu_total
        parent_imp = node_impurity("entropy", nu_total, nn_total, w)
        parent_mass = nu_total * w + nn_total

        best_gain = -1.0
        best_thr = v[0]
        nu_left = 0
        nn_left = 0
        for pos in range(n - 1):
            if lab[pos]:
                nu_left += 1
            else:
                nn_left += 1
            if v[pos + 1] == v[pos]:
                continue
            nu_right = nu_total - nu_left
            nn_right = nn_total - nn_left
            mass_left = nu_left * w + nn_left
            mass_right = nu_right * w + nn_right
            gain = (parent_imp
                    - (mass_left / parent_mass)
                    * node_impurity("entropy", nu_left, nn_left, w)
                    - (mass_right / parent_mass)
                    * node_impurity("entropy", nu_right, nn_right, w))
            if gain > best_gain:
                thr = v[pos] + (v[pos + 1] - v[pos]) / 2.0
                if thr >= v[pos + 1]:
                    thr = v[pos]
                best_gain = gain
                best_thr = thr
        if best_gain < 0.0:
            raise DegenerateModelError(
                "all projections coincide; no threshold separates anything")
        self.threshold_ = best_thr
        # orient the rule so the side holding the larger share of the
        # projected user mean is called user
        self.user_above_ = bool(
            (Xu @ self.omega_).mean() > (Xn @ self.omega_).mean())
        return self

    def risk(self, X):
        X = self._validate_risk(X)
        above = (X @ self.omega_) > self.threshold_
        if not self.user_above_:
            above = ~above
        return above.astype(np.float64)


class LogisticRiskClassifier(RiskClassifier):
    """Class-weighted logistic regression fit by damped Newton steps.

    The intercept is always included. Separable data is detectable
    through the separable_ flag (coefficient norm escaping past 1e3).
    """

    def __init__(self, user_weight=1.0, max_iter=100, tol=1e-8):
        self.user_weight = user_weight
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        n, d = X.shape
        Z = np.hstack([np.ones((n, 1)), X])
        sw = np.where(y == 1, self.user_weight_, 1.0)
        t = y.astype(np.float64)
        beta = np.zeros(d + 1)

        def weighted_loglik(b):
            eta = Z @ b
            # log(1 + exp(eta)) computed stably
            return float(np.sum(sw * (t * eta - np.logaddexp(0.0, eta))))

        ll = weighted_loglik(beta)
        self.converged_ = False
        for _ in range(int(self.max_iter)):
            eta = Z @ beta
            p = 1.0 / (1.0 + np.exp(-eta))
            grad = Z.T @ (sw * (t - p))
            if float(np.abs(grad).max()) < self.tol:
                self.converged_ = True
                break
            r = sw * p * (1.0 - p)
            H = (Z * r[:, None]).T @ Z
            try:
                step = solve_spd(H, grad)
            except DegenerateModelError:
                break
            # damped update: halve the step until the likelihood improves
            scale = 1.0
            for _ in range(30):
                candidate = beta + scale * step
                ll_new = weighted_loglik(candidate)
                if ll_new >= ll or not math.isfinite(ll):
                    break
                scale /= 2.0
            else:
                break
            beta = candidate
            ll = ll_new
        self.intercept_ = float(beta[0])
        self.coef_ = beta[1:].copy()
        self.separable_ = bool(np.linalg.norm(beta) > 1e3)
        return self

    def risk(self, X):
        X = self._validate_risk(X)
        eta = self.intercept_ + X @ self.coef_
        return 1.0 / (1.0 + np.exp(-eta))
