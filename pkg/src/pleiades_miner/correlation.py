"""Pairwise association structure of usage indicators.

Two complementary views: Pearson correlations between the 0/1 user
indicators (with t-distribution p-values and multiplicity corrections),
and the asymmetric relative information gain RIG(t|g), the share of the
entropy of t removed by conditioning on g.
"""

import numpy as np
from scipy import stats

from .datasets import TARGET_DRUGS, user_vector

__all__ = [
    "usage_matrix", "pcc_matrix", "pcc_permutation_p",
    "bonferroni", "benjamini_hochberg",
    "binary_entropy", "rig_matrix", "mutual_pairs", "symmetric_rig_pairs",
    "BANDS", "band_label", "links_above",
]

# correlation-strength band edges per usage basis: values below the
# first edge are "weak" and fall under the display threshold
BANDS = {
    "decade": (0.4, 0.45, 0.5),
    "year": (0.35, 0.40, 0.5),
    "month": (0.35, 0.40, 0.5),
    "week": (0.35, 0.40, 0.5),
}
_BAND_LABELS = ("weak", "medium", "strong", "very strong")


def usage_matrix(table, basis, drugs=TARGET_DRUGS):
    """n x len(drugs) 0/1 matrix of user flags at the given basis."""
    cols = [user_vector(table, drug, basis) for drug in drugs]
    return np.column_stack(cols).astype(np.int8)


def pcc_matrix(B):
    """Pearson correlations of the columns of B with two-sided p-values.

    Returns (R, P). The test statistic is t = r sqrt((n-2)/(1-r^2))
    with n - 2 degrees of freedom. Constant columns produce r = 0 and
    p = 1 for their pairs; |r| = 1 produces p = 0.
    """
    B = np.asarray(B, dtype=np.float64)
    n, m = B.shape
    if n < 3:
        raise ValueError("need at least three rows for correlation tests")
    C = B - B.mean(axis=0)
    cov = (C.T @ C) / (n - 1)
    sd = np.sqrt(np.diag(cov))
    R = np.eye(m)
    P = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            denom = sd[i] * sd[j]
            if denom == 0.0:
                r, p = 0.0, 1.0
            else:
                r = min(1.0, max(-1.0, cov[i, j] / denom))
                if abs(r) >= 1.0:
                    p = 0.0
                else:
                    t = r * np.sqrt((n - 2) / (1.0 - r * r))
                    p = 2.0 * stats.t.sf(abs(t), n - 2)
            R[i, j] = R[j, i] = r
            P[i, j] = P[j, i] = p
    return R, P


def pcc_permutation_p(x, y, n_permutations=10000, seed=0):
    """Permutation p-value for the correlation of two vectors.

    Permutes y with a PCG64 generator; the p-value uses the standard
    add-one correction so it is never exactly zero.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = np.sqrt((xc * xc).sum() * (yc * yc).sum())
    if denom == 0.0:
        return 1.0
    observed = abs(float(xc @ yc / denom))
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    hits = 0
    for _ in range(int(n_permutations)):
        perm = rng.permutation(yc)
        r = abs(float(xc @ perm / denom))
        if r >= observed:
            hits += 1
    return (1 + hits) / (n_permutations + 1)


def bonferroni(p_values, alpha=0.001, m=None):
    """Boolean rejections at family-wise level alpha over m tests."""
    p = np.asarray(p_values, dtype=np.float64)
    if m is None:
        m = p.size
    return p <= alpha / m


def benjamini_hochberg(p_values, q=0.01, m=None):
    """Step-up false-discovery-rate rejections at level q over m tests.

    The largest k with p_(k) <= k q / m fixes the cutoff; every p-value
    at or below p_(k) is rejected.
    """
    p = np.asarray(p_values, dtype=np.float64)
    if m is None:
        m = p.size
    order = np.argsort(p, kind="stable")
    sorted_p = p[order]
    ranks = np.arange(1, p.size + 1)
    passing = sorted_p <= ranks * q / m
    out = np.zeros(p.size, dtype=bool)
    if passing.any():
        k = int(np.flatnonzero(passing).max())
        out[order[:k + 1]] = True
    return out


def binary_entropy(values):
    """Shannon entropy (base 2) of a 0/1 vector."""
    values = np.asarray(values)
    p = float(values.mean())
    h = 0.0
    if p > 0.0:
        h -= p * np.log2(p)
    if p < 1.0:
        h -= (1.0 - p) * np.log2(1.0 - p)
    return h


def rig_matrix(B):
    """RIG(t|g) = (H(t) - H(t|g)) / H(t) for all column pairs.

    Row index is the target t, column index the given g. The diagonal
    is 1 by definition, as are rows with H(t) = 0 (a degenerate target
    is fully determined without conditioning).
    """
    B = np.asarray(B)
    m = B.shape[1]
    out = np.empty((m, m), dtype=np.float64)
    H = np.array([binary_entropy(B[:, j]) for j in range(m)])
    n = B.shape[0]
    for t in range(m):
        for g in range(m):
            if t == g:
                out[t, g] = 1.0
                continue
            if H[t] == 0.0:
                out[t, g] = 1.0
                continue
            cond = 0.0
            for v in (0, 1):
                rows = B[:, g] == v
                n_v = int(rows.sum())
                if n_v == 0:
                    continue
                cond += (n_v / n) * binary_entropy(B[rows, t])
            out[t, g] = (H[t] - cond) / H[t]
    return out


def mutual_pairs(R, threshold=0.15):
    """Unordered column pairs whose RIG exceeds threshold both ways."""
    m = R.shape[0]
    return [(i, j) for i in range(m) for j in range(i + 1, m)
            if R[i, j] > threshold and R[j, i] > threshold]


def symmetric_rig_pairs(R, ratio=0.2):
    """Unordered pairs whose two RIG directions differ by less than
    the given fraction of the smaller one."""
    m = R.shape[0]
    out = []
    for i in range(m):
        for j in range(i + 1, m):
            lo = min(R[i, j], R[j, i])
            if lo > 0.0 and abs(R[i, j] - R[j, i]) / lo < ratio:
                out.append((i, j))
    return out


def band_label(r, basis, bands=None):
    """Strength label of a correlation under the basis' band edges."""
    edges = (bands or BANDS)[basis]
    label = _BAND_LABELS[0]
    for edge, name in zip(edges, _BAND_LABELS[1:]):
        if r >= edge:
            label = name
    return label


def links_above(R, names, threshold):
    """(name_a, name_b, r) for every unordered pair with r >= threshold."""
    m = R.shape[0]
    return [(names[i], names[j], float(R[i, j]))
            for i in range(m) for j in range(i + 1, m)
            if R[i, j] >= threshold]
