"""Random forest of risk decision trees.

Each tree sees a bootstrap resample and scans a fresh random feature
subset at every node. All randomness flows from one seeded PCG64
generator: the master generator draws one child seed per tree, and each
tree's generator drives its bootstrap and its per-node subsets in
deterministic pre-order. Forest risk is the mean of the tree risks.
"""

import math

import numpy as np

from .base import RiskClassifier
from .tree import DecisionTreeRiskClassifier

__all__ = ["RandomForestRiskClassifier"]


class RandomForestRiskClassifier(RiskClassifier):
    """Bagged decision-tree risk model.

    Parameters
    ----------
    n_trees : ensemble size
    min_leaf, criterion, user_weight : passed to each tree
    bootstrap : resample rows with replacement per tree
    mtry : per-node feature subset size; 'sqrt' means ceil(sqrt(d)),
        None disables subsetting
    seed : master seed; identical seeds give identical forests

    With bootstrap=False, mtry=None and n_trees=1 the forest is exactly
    a single decision tree.
    """

    def __init__(self, n_trees=100, min_leaf=3, criterion="entropy",
                 bootstrap=True, mtry="sqrt", seed=0, user_weight=1.0):
        self.n_trees = n_trees
        self.min_leaf = min_leaf
        self.criterion = criterion
        self.bootstrap = bootstrap
        self.mtry = mtry
        self.seed = seed
        self.user_weight = user_weight

    def fit(self, X, y):
        X, y = self._validate_fit(X, y)
        if int(self.n_trees) < 1:
            raise ValueError("n_trees must be at least 1")
        d = X.shape[1]
        if self.mtry is None:
            mtry = None
        elif self.mtry == "sqrt":
            mtry = math.ceil(math.sqrt(d))
        else:
            mtry = int(self.mtry)
            if not 1 <= mtry <= d:
                raise ValueError("mtry must be between 1 and the feature count")

        master = np.random.Generator(np.random.PCG64(int(self.seed)))
        tree_seeds = master.integers(2 ** 63, size=int(self.n_trees))
        self.trees_ = []
        for s in tree_seeds:
            rng = np.random.Generator(np.random.PCG64(int(s)))
            if self.bootstrap:
                rows = rng.integers(X.shape[0], size=X.shape[0])
                Xt, yt = X[rows], y[rows]
                if yt.min() == yt.max():
                    # a resample that lost one class entirely cannot
                    # split; retrain on the original rows instead
                    Xt, yt = X, y
            else:
                Xt, yt = X, y
            tree = DecisionTreeRiskClassifier(
                criterion=self.criterion, min_leaf=self.min_leaf,
                user_weight=self.user_weight)
            tree.user_weight_ = self.user_weight_
            tree.n_features_in_ = d
            tree._grow(Xt, yt, rng=rng, mtry=mtry)
            self.trees_.append(tree)
        return self

    def risk(self, X):
        X = self._validate_risk(X)
        total = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees_:
            total += tree.risk(X)
        return total / len(self.trees_)
