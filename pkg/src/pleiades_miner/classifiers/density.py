"""Density-based risk classifiers.

GaussianModelClassifier fits one multivariate normal per class and
returns the weighted posterior of the user class. ParzenDensityClassifier
estimates each class density with per-point variable-radius kernels,
the radius of a training point being its distance to the k-th nearest
neighbour within the same class.
"""

import numpy as np

from .base import (DegenerateModelError, RiskClassifier, regularize_spd,
                   weighted_user_prior, class_split, row_sq_euclidean)
from .kernels import DENSITY_KERNELS, density_kernel_values

__all__ = ["GaussianModelClassifier", "ParzenDensityClassifier"]


def _log_gaussian(X, mean, cov):
    """Log density of N(mean, cov) at the rows of X."""
    d = mean.shape[0]
    L = np.linalg.cholesky(cov)
    diff = X - mean
    z = np.linalg.solve(L, diff.T)
    maha = np.einsum("ij,ij->j", z, z)
    log_det = 2.0 * np.log(np.diag(L)).sum()
    return -0.5 * (d * np.log(2.0 * np.pi) + log_det + maha)


class GaussianModelClassifier(RiskClassifier):
    """Two-class Gaussian model with weighted user prior.

    The user prior is n_user * user_weight / (n_user * user_weight +
    n_non). Risks come from the posterior computed in log space.
    """

    def __init__(self, user_weight=1.0):
        self.user_weight = user_weight

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        Xn, Xu = class_split(X, y)
        if Xu.shape[0] < 2 or Xn.shape[0] < 2:
            raise DegenerateModelError(
                "each class needs at least two rows to estimate covariance")
        self.mean_user_ = Xu.mean(axis=0)
        self.mean_non_ = Xn.mean(axis=0)
        self.cov_user_ = regularize_spd(
            np.atleast_2d(np.cov(Xu, rowvar=False, ddof=1)))
        self.cov_non_ = regularize_spd(
            np.atleast_2d(np.cov(Xn, rowvar=False, ddof=1)))
        self.prior_user_ = weighted_user_prior(
            Xu.shape[0], Xn.shape[0], self.user_weight_)
        return self

    def risk(self, X):
        X = self._validate_risk(X)
        log_user = (_log_gaussian(X, self.mean_user_, self.cov_user_)
                    + np.log(self.prior_user_))
        log_non = (_log_gaussian(X, self.mean_non_, self.cov_non_)
                   + np.log(1.0 - self.prior_user_))
        # posterior = a / (a + b) = 1 / (1 + exp(log b - log a))
        return 1.0 / (1.0 + np.exp(np.clip(log_non - log_user, -745.0, 745.0)))


class ParzenDensityClassifier(RiskClassifier):
    """Variable-radius kernel density risk estimation.

    Each training point's kernel radius is the distance to its
    k_density-th nearest neighbour within its own class (excluding
    itself); classes with fewer than k_density + 1 rows use the largest
    same-class neighbour distance available. A zero radius (duplicate
    points) falls back to the smallest positive same-class distance, or
    raises if the class is entirely one point repeated.

    risk = f_user / (f_user + f_non) with class densities weighted by
    the weighted class priors; when both densities vanish at a query
    point (possible with compact kernels) the weighted prior is
    returned and the fallback is counted in prior_fallbacks_.
    """

    def __init__(self, k_density=5, kernel="gaussian", user_weight=1.0):
        self.k_density = k_density
        self.kernel = kernel
        self.user_weight = user_weight

    @staticmethod
    def _radii(Xc, k):
        n = Xc.shape[0]
        if n < 2:
            raise DegenerateModelError(
                "a class needs at least two rows for kernel radii")
        sq = np.empty((n, n), dtype=np.float64)
        for i in range(n):
            sq[i] = row_sq_euclidean(Xc[i], Xc)
        dist = np.sqrt(np.sort(sq, axis=1))  # column 0 is self (0.0)
        k_eff = min(int(k), n - 1)
        r = dist[:, k_eff].copy()
        if np.any(r <= 0.0):
            positive = dist[:, 1:][dist[:, 1:] > 0.0]
            if positive.size == 0:
                raise DegenerateModelError(
                    "all rows of one class coincide; no usable kernel radius")
            r[r <= 0.0] = positive.min()
        return r

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        if self.kernel not in DENSITY_KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if int(self.k_density) < 1:
            raise ValueError("k_density must be at least 1")
        Xn, Xu = class_split(X, y)
        self.X_user_ = Xu
        self.X_non_ = Xn
        self.radii_user_ = self._radii(Xu, self.k_density)
        self.radii_non_ = self._radii(Xn, self.k_density)
        self.prior_user_ = weighted_user_prior(
            Xu.shape[0], Xn.shape[0], self.user_weight_)
        self.prior_fallbacks_ = 0
        return self

    def _class_density(self, X, Xc, radii):
        d = Xc.shape[1]
        total = np.empty(X.shape[0], dtype=np.float64)
        for q in range(X.shape[0]):
            dist = np.sqrt(row_sq_euclidean(X[q], Xc))
            contrib = density_kernel_values(self.kernel, dist, radii, d)
            total[q] = contrib.sum()
        return total / Xc.shape[0]

    def risk(self, X):
        X = self._validate_risk(X)
        f_user = self.prior_user_ * self._class_density(
            X, self.X_user_, self.radii_user_)
        f_non = (1.0 - self.prior_user_) * self._class_density(
            X, self.X_non_, self.radii_non_)
        total = f_user + f_non
        out = np.empty(X.shape[0], dtype=np.float64)
        dead = total <= 0.0
        self.prior_fallbacks_ += int(dead.sum())
        out[dead] = self.prior_user_
        live = ~dead
        out[live] = f_user[live] / total[live]
        return out
