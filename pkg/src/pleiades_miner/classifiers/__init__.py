"""Risk classifiers sharing the fit/risk/predict estimator interface.

All classifiers expose risk(X) in [0, 1] (the estimated probability of
the user class) and predict(X) thresholding risk at 0.5. The relative
cost of misclassifying users is tuned through user_weight, which every
method accepts.
"""

from .base import (DegenerateModelError, RiskClassifier, weighted_user_prior,
                   regularize_spd, solve_spd, class_split)
from .kernels import (NEIGHBOR_KERNELS, DENSITY_KERNELS, neighbor_weights,
                      density_kernel_values, unit_ball_volume)
from .knn import KNNRiskClassifier, METRICS
from .tree import DecisionTreeRiskClassifier, CRITERIA, node_impurity, split_gain
from .linear import FisherLDAClassifier, LogisticRiskClassifier
from .density import GaussianModelClassifier, ParzenDensityClassifier
from .bayes import NaiveBayesRiskClassifier
from .forest import RandomForestRiskClassifier

# canonical method registry used by the search grid and model bundles
METHODS = {
    "KNN": KNNRiskClassifier,
    "DT": DecisionTreeRiskClassifier,
    "LDA": FisherLDAClassifier,
    "LR": LogisticRiskClassifier,
    "NB": NaiveBayesRiskClassifier,
    "GM": GaussianModelClassifier,
    "PDFE": ParzenDensityClassifier,
    "RF": RandomForestRiskClassifier,
}

# misclassification-cost grid scanned by the search
WEIGHT_GRID = (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 1.15, 1.5, 2.0, 3.0, 5.0)

__all__ = [
    "DegenerateModelError", "RiskClassifier", "weighted_user_prior",
    "regularize_spd", "solve_spd", "class_split",
    "NEIGHBOR_KERNELS", "DENSITY_KERNELS", "neighbor_weights",
    "density_kernel_values", "unit_ball_volume",
    "KNNRiskClassifier", "METRICS",
    "DecisionTreeRiskClassifier", "CRITERIA", "node_impurity", "split_gain",
    "FisherLDAClassifier", "LogisticRiskClassifier",
    "GaussianModelClassifier", "ParzenDensityClassifier",
    "NaiveBayesRiskClassifier", "RandomForestRiskClassifier",
    "METHODS", "WEIGHT_GRID",
]
