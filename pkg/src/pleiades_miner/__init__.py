"""Drug-consumption risk mining toolkit.

A library and CLI covering an end-to-end survey-mining pipeline:
categorical attribute quantification, feature ranking, an exhaustive
leave-one-out classifier search under a max-min sensitivity/specificity
rule, usage correlation analysis with multiple-testing control,
personality-profile statistics, risk-surface grids, and cell-level
reproduction of the source study's published tables.
"""

__version__ = "0.1.0"

from .datasets import (ATTRIBUTE_COLUMNS, BASES, PLEIADES, TARGET_DRUGS,
                       Table, load_table, pleiad_usage_counts,
                       screen_overclaimers, usage_counts, user_vector)
from .quantify import (OrdinalQuantifier, dummy_code, ordinal_midpoints,
                       ordinal_thresholds, pca_eig, quantify_table, t_score)
from .ranking import (double_kaiser_ranking, principal_variables,
                      sparse_component_elimination)
from .classifiers import (METHODS, WEIGHT_GRID, DecisionTreeRiskClassifier,
                          FisherLDAClassifier, GaussianModelClassifier,
                          KNNRiskClassifier, LogisticRiskClassifier,
                          NaiveBayesRiskClassifier, ParzenDensityClassifier,
                          RandomForestRiskClassifier)
from .evaluation import loocv, loocv_method, select_best
from .search import enumerate_configs, load_space, run_search
from .correlation import (benjamini_hochberg, bonferroni, pcc_matrix,
                          rig_matrix, usage_matrix)
from .profiles import (describe_raw, group_stats, moderate_code,
                       normative_t_scores, sample_t_scores)
from .bundle import fit_bundle, load_bundle, make_bundle, save_bundle
from .riskmap import risk_map, write_risk_map
from .reproduce import run_reproduce

__all__ = [
    "__version__",
    "ATTRIBUTE_COLUMNS", "BASES", "PLEIADES", "TARGET_DRUGS", "Table",
    "load_table", "pleiad_usage_counts", "screen_overclaimers",
    "usage_counts", "user_vector",
    "OrdinalQuantifier", "dummy_code", "ordinal_midpoints",
    "ordinal_thresholds", "pca_eig", "quantify_table", "t_score",
    "double_kaiser_ranking", "principal_variables",
    "sparse_component_elimination",
    "METHODS", "WEIGHT_GRID", "DecisionTreeRiskClassifier",
    "FisherLDAClassifier", "GaussianModelClassifier", "KNNRiskClassifier",
    "LogisticRiskClassifier", "NaiveBayesRiskClassifier",
    "ParzenDensityClassifier", "RandomForestRiskClassifier",
    "loocv", "loocv_method", "select_best",
    "enumerate_configs", "load_space", "run_search",
    "benjamini_hochberg", "bonferroni", "pcc_matrix", "rig_matrix",
    "usage_matrix",
    "describe_raw", "group_stats", "moderate_code", "normative_t_scores",
    "sample_t_scores",
    "fit_bundle", "load_bundle", "make_bundle", "save_bundle",
    "risk_map", "write_risk_map",
    "run_reproduce",
]
