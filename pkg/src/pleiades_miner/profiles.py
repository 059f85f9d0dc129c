"""Personality-profile descriptives and group comparisons.

Raw-score descriptives (mean, confidence interval, SD, sample skewness
G1 and excess kurtosis G2), T-score transforms against sample or
normative anchors, user/non-user group comparisons with Welch (default)
or pooled-variance t-tests, and the moderate-band profile codes.
"""

import csv
from importlib import resources

import numpy as np
from scipy import stats

from .quantify import t_score

__all__ = [
    "FACTORS", "load_norms", "mean_ci", "describe_raw",
    "sample_t_scores", "normative_t_scores", "t_score_stats",
    "group_stats", "moderate_code", "arrow",
]

FACTORS = ("nscore", "escore", "oscore", "ascore", "cscore")


def load_norms():
    """Normative factor means and SDs bundled with the package."""
    out = {}
    text = (resources.files("pleiades_miner") / "expected" / "norms.csv"
            ).read_text(encoding="utf-8")
    rows = [r for r in text.splitlines() if r and not r.startswith("#")]
    for rec in csv.DictReader(rows):
        out[rec["factor"]] = (float(rec["norm_mean"]), float(rec["norm_sd"]))
    return out


def mean_ci(values, confidence=0.95):
    """Sample mean with a t-distribution confidence interval."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    if n < 2:
        raise ValueError("confidence interval needs at least two values")
    m = float(values.mean())
    sd = float(values.std(ddof=1))
    half = float(stats.t.ppf(0.5 + confidence / 2.0, n - 1)) * sd / np.sqrt(n)
    return m, m - half, m + half


def describe_raw(X, confidence=0.95):
    """Per-column descriptives of a raw score matrix.

    Returns a list of dicts with mean, ci_lo, ci_hi, sd, skewness (G1,
    the bias-corrected sample skewness) and kurtosis (G2, bias-corrected
    excess kurtosis).
    """
    X = np.asarray(X, dtype=np.float64)
    out = []
    for j in range(X.shape[1]):
        col = X[:, j]
        m, lo, hi = mean_ci(col, confidence)
        out.append({
            "mean": m,
            "ci_lo": lo,
            "ci_hi": hi,
            "sd": float(col.std(ddof=1)),
            "skewness": float(stats.skew(col, bias=False)),
            "kurtosis": float(stats.kurtosis(col, fisher=True, bias=False)),
        })
    return out


def sample_t_scores(X):
    """T-scores anchored at the sample itself (mean 50, SD 10)."""
    X = np.asarray(X, dtype=np.float64)
    return t_score(X, X.mean(axis=0), X.std(axis=0, ddof=1))


def normative_t_scores(X, norms, factors=FACTORS):
    """T-scores of raw columns against normative means and SDs.

    norms maps factor token to (mean, sd); factors names the columns of
    X in order.
    """
    X = np.asarray(X, dtype=np.float64)
    out = np.empty_like(X)
    for j, factor in enumerate(factors):
        center, scale = norms[factor]
        out[:, j] = t_score(X[:, j], center, scale)
    return out


def t_score_stats(T, confidence=0.95):
    """Mean, confidence interval and SD per T-score column."""
    T = np.asarray(T, dtype=np.float64)
    out = []
    for j in range(T.shape[1]):
        m, lo, hi = mean_ci(T[:, j], confidence)
        out.append({"mean": m, "ci_lo": lo, "ci_hi": hi,
                    "sd": float(T[:, j].std(ddof=1))})
    return out


def group_stats(T, y, welch=True, confidence=0.95):
    """User/non-user comparison per column of a score matrix.

    Returns a list of dicts with group sizes, group means with
    confidence intervals, and the two-sided p-value of the mean
    difference (Welch's unequal-variance t-test by default, the
    pooled-variance test when welch is false).
    """
    T = np.asarray(T, dtype=np.float64)
    y = np.asarray(y)
    users = T[y == 1]
    nons = T[y == 0]
    if users.shape[0] < 2 or nons.shape[0] < 2:
        raise ValueError("both groups need at least two rows")
    out = []
    for j in range(T.shape[1]):
        um, ulo, uhi = mean_ci(users[:, j], confidence)
        nm, nlo, nhi = mean_ci(nons[:, j], confidence)
        p = float(stats.ttest_ind(users[:, j], nons[:, j],
                                  equal_var=not welch).pvalue)
        out.append({
            "n_users": int(users.shape[0]),
            "n_nonusers": int(nons.shape[0]),
            "user_mean": um, "user_ci_lo": ulo, "user_ci_hi": uhi,
            "nonuser_mean": nm, "nonuser_ci_lo": nlo, "nonuser_ci_hi": nhi,
            "p": p,
        })
    return out


def moderate_code(mean_t):
    """Moderate-band profile code of a group mean T-score.

    Within the moderate band: [44, 49) is "-", [49, 51] is "0",
    (51, 56] is "+". Means outside [44, 56] keep the sign code of the
    nearer side but are flagged as out of band.

    Returns (code, in_band).
    """
    if mean_t < 44.0:
        return "-", False
    if mean_t > 56.0:
        return "+", False
    if mean_t < 49.0:
        return "-", True
    if mean_t <= 51.0:
        return "0", True
    return "+", True


def arrow(p, mean_user, mean_non, alpha=0.01):
    """Direction marker of a significant group difference.

    "up" when users score significantly higher than non-users, "down"
    when significantly lower, "none" otherwise.
    """
    if p < alpha:
        return "up" if mean_user > mean_non else "down"
    return "none"
