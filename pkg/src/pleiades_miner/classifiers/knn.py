"""Weighted k-nearest-neighbour risk estimation.

Three neighbourhood geometries are supported:

euclidean
    plain Euclidean k nearest neighbours.
fisher
    a local Fisher discriminant direction is estimated from a pilot
    Euclidean neighbourhood and the k nearest points along that
    direction are kept.
adaptive
    the pilot neighbourhood's kernel-weighted within-class covariance
    whitens the metric and the k nearest points under the whitened
    (Mahalanobis-like) distance are kept.

Neighbour votes are kernel weights K(d_i / d_max); user votes count
user_weight times. The risk is the user share of the total vote.
"""

import numpy as np

from .base import (DegenerateModelError, RiskClassifier, solve_spd,
                   regularize_spd, row_sq_euclidean)
from .kernels import NEIGHBOR_KERNELS, neighbor_weights

__all__ = ["METRICS", "KNNRiskClassifier"]

METRICS = ("euclidean", "fisher", "adaptive")


class KNNRiskClassifier(RiskClassifier):
    """k-nearest-neighbour risk with optional locally adapted metrics.

    Parameters
    ----------
    k : number of voting neighbours
    metric : 'euclidean', 'fisher' or 'adaptive'
    kernel : vote kernel over d_i / d_max ('uniform', 'triangular',
        'epanechnikov', 'gaussian')
    k_fisher : pilot neighbourhood size for the fisher and adaptive
        metrics; None means the whole training set
    transform_kernel : kernel weighting the pilot neighbourhood when
        estimating the adaptive metric
    user_weight : multiplicity of user votes
    """

    def __init__(self, k=5, metric="euclidean", kernel="uniform",
                 k_fisher=None, transform_kernel="uniform", user_weight=1.0):
        self.k = k
        self.metric = metric
        self.kernel = kernel
        self.k_fisher = k_fisher
        self.transform_kernel = transform_kernel
        self.user_weight = user_weight

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        if self.metric not in METRICS:
            raise ValueError(
                f"unknown metric {self.metric!r}; expected one of {METRICS}")
        if self.kernel not in NEIGHBOR_KERNELS:
            raise ValueError(f"unknown kernel {self.kernel!r}")
        if self.transform_kernel not in NEIGHBOR_KERNELS:
            raise ValueError(f"unknown kernel {self.transform_kernel!r}")
        if int(self.k) < 1:
            raise ValueError("k must be at least 1")
        self.X_ = X
        self.y_ = y
        return self

    def _pilot_size(self):
        n = self.X_.shape[0]
        if self.metric == "euclidean":
            return min(int(self.k), n)
        if self.k_fisher is None:
            return n
        return min(int(self.k_fisher), n)

    def _select_neighbors(self, x, order_euclid, sq_euclid):
        """Indices of the voting neighbourhood and their distances."""
        k = min(int(self.k), self.X_.shape[0])
        if self.metric == "euclidean":
            idx = order_euclid[:k]
            return idx, np.sqrt(sq_euclid[idx])

        pilot = order_euclid[:self._pilot_size()]
        lab = self.y_[pilot]
        n_user = int(lab.sum())
        if n_user == 0 or n_user == lab.shape[0]:
            # single-class pilot neighbourhood: no discriminant or
            # within-class structure to estimate, fall back to Euclidean
            idx = order_euclid[:k]
            return idx, np.sqrt(sq_euclid[idx])

        P = self.X_[pilot]
        if self.metric == "fisher":
            Pu = P[lab == 1]
            Pn = P[lab == 0]
            mean_diff = Pu.mean(axis=0) - Pn.mean(axis=0)
            scatter = np.zeros((P.shape[1], P.shape[1]))
            if Pu.shape[0] >= 2:
                scatter += np.cov(Pu, rowvar=False, ddof=1)
            if Pn.shape[0] >= 2:
                scatter += np.cov(Pn, rowvar=False, ddof=1)
            try:
                omega = solve_spd(scatter, mean_diff)
            except DegenerateModelError:
                idx = order_euclid[:k]
                return idx, np.sqrt(sq_euclid[idx])
            proj = np.abs((P - x) @ omega)
            keep = np.argsort(proj, kind="stable")[:k]
            idx = pilot[keep]
            return idx, proj[keep]

        # adaptive: kernel-weighted pooled within-class covariance of
        # the pilot neighbourhood defines a whitened distance
        dist = np.sqrt(sq_euclid[pilot])
        d_max = dist[-1]
        u = dist / d_max if d_max > 0.0 else np.zeros_like(dist)
        wk = neighbor_weights(self.transform_kernel, u)
        if wk.sum() <= 0.0:
            wk = np.ones_like(wk)
        S = np.zeros((P.shape[1], P.shape[1]))
        for cls in (0, 1):
            sel = lab == cls
            wc = wk[sel]
            centroid = (wc[:, None] * P[sel]).sum(axis=0) / wc.sum()
            R = P[sel] - centroid
            S += (wc[:, None] * R).T @ R
        S /= wk.sum()
        try:
            S = regularize_spd(S)
        except DegenerateModelError:
            idx = order_euclid[:k]
            return idx, np.sqrt(sq_euclid[idx])
        diff = P - x
        maha = np.einsum("ij,ij->i", diff, np.linalg.solve(S, diff.T).T)
        np.maximum(maha, 0.0, out=maha)
        maha = np.sqrt(maha)
        keep = np.argsort(maha, kind="stable")[:k]
        idx = pilot[keep]
        return idx, maha[keep]

    def risk(self, X):
        X = self._validate_risk(X)
        out = np.empty(X.shape[0], dtype=np.float64)
        for i in range(X.shape[0]):
            sq = row_sq_euclidean(X[i], self.X_)
            order = np.argsort(sq, kind="stable")
            idx, dist = self._select_neighbors(X[i], order, sq)
            out[i] = self._vote(idx, dist)
        return out

    def _vote(self, idx, dist):
        d_max = dist.max() if dist.shape[0] else 0.0
        u = dist / d_max if d_max > 0.0 else np.zeros_like(dist)
        votes = neighbor_weights(self.kernel, u)
        lab = self.y_[idx]
        user_vote = votes[lab == 1].sum() * self.user_weight_
        non_vote = votes[lab == 0].sum()
        total = user_vote + non_vote
        if total <= 0.0:
            # a kernel that vanishes at u = 1 can zero every vote when
            # all neighbours are equidistant; fall back to equal votes
            nu = int(lab.sum())
            user_vote = nu * self.user_weight_
            non_vote = lab.shape[0] - nu
            total = user_vote + non_vote
        return user_vote / total
