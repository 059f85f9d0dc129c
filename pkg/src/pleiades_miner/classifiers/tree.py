"""Binary risk decision tree with weighted impurity gains.

Splits are axis-aligned thresholds chosen by exhaustive scan: candidate
thresholds are the midpoints between consecutive distinct sorted values
of each feature within the node. Class counts are weighted (user rows
count user_weight times) inside the impurity formulas, while the
min_leaf constraint applies to raw row counts. Ties between equally
good splits resolve to the lowest feature index, then the smallest
threshold. Growth stops when the best gain is not positive or a split
would create a child smaller than min_leaf.

An optional oblique split on the Fisher discriminant direction of the
node is considered alongside the axis splits and is taken only when its
gain is strictly greater.
"""

import math

import numpy as np

from .base import DegenerateModelError, RiskClassifier, solve_spd, class_split

__all__ = ["CRITERIA", "node_impurity", "split_gain",
           "DecisionTreeRiskClassifier"]

CRITERIA = ("entropy", "gini", "dkm")

_LEAF = -1
_FISHER = -2


def node_impurity(criterion, n_user, n_non, user_weight):
    """Impurity of a node from raw class counts and the user weight.

    The class masses are m_user = n_user * user_weight and m_non =
    n_non; probabilities are masses over total mass M.

    entropy: -(p log2 p + q log2 q), with 0 log 0 = 0
    gini:    1 - (p^2 + q^2)
    dkm:     2 sqrt(p q)
    """
    mu = n_user * user_weight
    M = mu + n_non
    p = mu / M
    q = n_non / M
    if criterion == "entropy":
        e = 0.0
        if p > 0.0:
            e -= p * math.log2(p)
        if q > 0.0:
            e -= q * math.log2(q)
        return e
    if criterion == "gini":
        return 1.0 - (p * p + q * q)
    if criterion == "dkm":
        return 2.0 * math.sqrt(p * q)
    raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")


def split_gain(criterion, n_user_left, n_non_left, n_user_right, n_non_right,
               user_weight=1.0):
    """Weighted impurity gain of a binary split from child class counts.

    gain = impurity(parent) - sum_children (child mass / parent mass)
    * impurity(child), where user rows contribute user_weight each to
    the masses. Both split sides must hold at least one row.
    """
    if n_user_left + n_non_left == 0 or n_user_right + n_non_right == 0:
        raise ValueError("both split sides must be nonempty")
    nu = n_user_left + n_user_right
    nn = n_non_left + n_non_right
    parent_mass = nu * user_weight + nn
    mass_left = n_user_left * user_weight + n_non_left
    mass_right = n_user_right * user_weight + n_non_right
    return (node_impurity(criterion, nu, nn, user_weight)
            - (mass_left / parent_mass)
            * node_impurity(criterion, n_user_left, n_non_left, user_weight)
            - (mass_right / parent_mass)
            * node_impurity(criterion, n_user_right, n_non_right, user_weight))


def _best_threshold_scan(values, labels, criterion, min_leaf, user_weight,
                         parent_impurity, parent_mass):
    """Best (gain, threshold) over midpoint candidates of one feature.

    values and labels are the node's rows. Scans candidates in ascending
    threshold order keeping the first strict maximum.
    """
    order = np.argsort(values, kind="stable")
    v = values[order]
    lab = labels[order]
    n = v.shape[0]
    n_user_total = int(lab.sum())
    n_non_total = n - n_user_total

    best_gain = 0.0
    best_thr = 0.0
    found = False
    nu_left = 0
    nn_left = 0
    for pos in range(n - 1):
        if lab[pos]:
            nu_left += 1
        else:
            nn_left += 1
        if v[pos + 1] == v[pos]:
            continue
        n_left = pos + 1
        n_right = n - n_left
        if n_left < min_leaf or n_right < min_leaf:
            continue
        nu_right = n_user_total - nu_left
        nn_right = n_non_total - nn_left
        mass_left = nu_left * user_weight + nn_left
        mass_right = nu_right * user_weight + nn_right
        gain = (parent_impurity
                - (mass_left / parent_mass)
                * node_impurity(criterion, nu_left, nn_left, user_weight)
                - (mass_right / parent_mass)
                * node_impurity(criterion, nu_right, nn_right, user_weight))
        if gain > best_gain:
            thr = v[pos] + (v[pos + 1] - v[pos]) / 2.0
            if thr >= v[pos + 1]:
                thr = v[pos]
            best_gain = gain
            best_thr = thr
            found = True
    return (best_gain, best_thr) if found else None


class DecisionTreeRiskClassifier(RiskClassifier):
    """Risk decision tree grown by weighted impurity gain.

    Parameters
    ----------
    criterion : 'entropy', 'gini' or 'dkm'
    min_leaf : smallest raw row count allowed in a leaf
    user_weight : multiplicity of user rows in gains and leaf fractions
    fisher_splits : also consider an oblique split on the node's Fisher
        discriminant direction, taken only on strictly greater gain
    """

    def __init__(self, criterion="entropy", min_leaf=3, user_weight=1.0,
                 fisher_splits=False):
        self.criterion = criterion
        self.min_leaf = min_leaf
        self.user_weight = user_weight
        self.fisher_splits = fisher_splits

    # internal hook used by the random forest: when rng/mtry are set,
    # each node scans a random feature subset of the given size.
    def _grow(self, X, y, rng=None, mtry=None):
        if self.criterion not in CRITERIA:
            raise ValueError(
                f"unknown criterion {self.criterion!r}; expected one of {CRITERIA}")
        min_leaf = int(self.min_leaf)
        if min_leaf < 1:
            raise ValueError("min_leaf must be at least 1")
        w = self.user_weight_
        d = X.shape[1]

        feature = []
        threshold = []
        left = []
        right = []
        risk_value = []
        omega = []

        def new_node():
            feature.append(_LEAF)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            risk_value.append(0.0)
            omega.append(None)
            return len(feature) - 1

        root = new_node()
        stack = [(root, np.arange(X.shape[0]))]
        while stack:
            node, rows = stack.pop()
            lab = y[rows]
            nu = int(lab.sum())
            nn = rows.shape[0] - nu
            risk_value[node] = (nu * w) / (nu * w + nn)
            if nu == 0 or nn == 0 or rows.shape[0] < 2 * min_leaf:
                continue
            parent_imp = node_impurity(self.criterion, nu, nn, w)
            parent_mass = nu * w + nn

            if rng is not None and mtry is not None and mtry < d:
                candidates = np.sort(rng.choice(d, size=mtry, replace=False))
            else:
                candidates = range(d)

            best_gain = 0.0
            best_feat = _LEAF
            best_thr = 0.0
            for f in candidates:
                res = _best_threshold_scan(
                    X[rows, f], lab, self.criterion, min_leaf, w,
                    parent_imp, parent_mass)
                if res is not None and res[0] > best_gain:
                    best_gain, best_thr = res
                    best_feat = f

            best_omega = None
            if self.fisher_splits and nu >= 2 and nn >= 2:
                Xn, Xu = class_split(X[rows], lab)
                try:
                    direction = solve_spd(
                        np.cov(Xu, rowvar=False, ddof=1)
                        + np.cov(Xn, rowvar=False, ddof=1),
                        Xu.mean(axis=0) - Xn.mean(axis=0))
                except DegenerateModelError:
                    direction = None
                if direction is not None:
                    res = _best_threshold_scan(
                        X[rows] @ direction, lab, self.criterion, min_leaf, w,
                        parent_imp, parent_mass)
                    if res is not None and res[0] > best_gain:
                        best_gain, best_thr = res
                        best_feat = _FISHER
                        best_omega = direction

            if best_feat == _LEAF:
                continue
            if best_feat == _FISHER:
                go_left = (X[rows] @ best_omega) <= best_thr
                omega[node] = best_omega
            else:
                go_left = X[rows, best_feat] <= best_thr
            feature[node] = best_feat
            threshold[node] = best_thr
            left_id = new_node()
            right_id = new_node()
            left[node] = left_id
            right[node] = right_id
            # right is pushed first so the left child is processed next
            # (pre-order, left first); the forest's per-node RNG draws
            # depend on this order.
            stack.append((right_id, rows[~go_left]))
            stack.append((left_id, rows[go_left]))

        self.tree_feature_ = np.array(feature, dtype=np.int64)
        self.tree_threshold_ = np.array(threshold, dtype=np.float64)
        self.tree_left_ = np.array(left, dtype=np.int64)
        self.tree_right_ = np.array(right, dtype=np.int64)
        self.tree_risk_ = np.array(risk_value, dtype=np.float64)
        self.tree_omega_ = omega
        return self

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        return self._grow(X, y)

    def risk(self, X):
        X = self._validate_risk(X)
        out = np.empty(X.shape[0], dtype=np.float64)
        for i in range(X.shape[0]):
            node = 0
            while self.tree_feature_[node] != _LEAF:
                f = self.tree_feature_[node]
                if f == _FISHER:
                    value = X[i] @ self.tree_omega_[node]
                else:
                    value = X[i, f]
                if value <= self.tree_threshold_[node]:
                    node = self.tree_left_[node]
                else:
                    node = self.tree_right_[node]
            out[i] = self.tree_risk_[node]
        return out
