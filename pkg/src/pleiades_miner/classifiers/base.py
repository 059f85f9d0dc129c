"""Shared estimator machinery for the risk classifiers.

Every classifier in this package is a binary risk model: fit(X, y) takes
0/1 labels where 1 marks a user row, risk(X) returns values in [0, 1],
and predict(X) thresholds the risk at one half. A user_weight parameter
scales the influence of user rows during training (priors, impurity
gains, leaf fractions, likelihoods), which shifts the operating point
between sensitivity and specificity.
"""

import numpy as np
from sklearn.base import BaseEstimator

from .._validation import check_X_y, check_array, check_is_fitted, check_user_weight

__all__ = [
    "DegenerateModelError",
    "RiskClassifier",
    "weighted_user_prior",
    "regularize_spd",
    "solve_spd",
    "class_split",
    "row_sq_euclidean",
]

# Escalating ridge levels tried when a covariance matrix is singular:
# S + lam * trace(S)/dim * I for lam in the schedule.
_RIDGE_SCHEDULE = (0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2)


class DegenerateModelError(ValueError):
    """The training fold does not admit this model (singular geometry)."""


class RiskClassifier(BaseEstimator):
    """Base class wiring risk() into the fit/predict protocol."""

    def fit(self, X, y):
        raise NotImplementedError

    def risk(self, X):
        raise NotImplementedError

    def predict(self, X):
        return (self.risk(X) >= 0.5).astype(np.int8)

    def _validate_fit(self, X, y):
        X, y = check_X_y(X, y, min_rows=2)
        self.n_features_in_ = X.shape[1]
        self.user_weight_ = check_user_weight(getattr(self, "user_weight", 1.0))
        return X, y

    def _validate_risk(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, fitted for {self.n_features_in_}")
        return X


def weighted_user_prior(n_user, n_non, user_weight):
    """Prior probability of the user class with user rows counted
    user_weight times."""
    mass_user = n_user * user_weight
    return mass_user / (mass_user + n_non)


def regularize_spd(S):
    """Return an SPD-regularized copy of S.

    Adds lam * trace(S)/dim * I with lam escalating from 0 up to 1e-2
    until a Cholesky factorization succeeds. Raises DegenerateModelError
    when even the largest ridge leaves the matrix singular (including
    the zero-trace case).
    """
    S = np.atleast_2d(np.asarray(S, dtype=np.float64))
    dim = S.shape[0]
    base = np.trace(S) / dim
    eye = np.eye(dim)
    for lam in _RIDGE_SCHEDULE:
        candidate = S + lam * base * eye
        try:
            np.linalg.cholesky(candidate)
        except np.linalg.LinAlgError:
            continue
        return candidate
    raise DegenerateModelError(
        "covariance matrix is singular beyond the ridge schedule")


def solve_spd(S, b):
    """Solve S x = b after SPD regularization of S."""
    return np.linalg.solve(regularize_spd(S), b)


def class_split(X, y):
    """(X_non, X_user) partition of the training rows."""
    y = np.asarray(y)
    return X[y == 0], X[y == 1]


def row_sq_euclidean(x, Y):
    """Squared Euclidean distances from the point x to each row of Y.

    Computed as ((Y - x) ** 2) summed per row, so each output value
    depends only on x and that row of Y, never on the other rows. The
    leave-one-out evaluators rely on this: deleting training rows leaves
    the remaining distances bit-identical, which a matrix-product
    formulation of the same quantity does not guarantee.
    """
    diff = Y - x
    return (diff * diff).sum(axis=1)
