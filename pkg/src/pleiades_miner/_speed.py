"""Optional compiled kernels (numba) for the hot leave-one-out loops.

The decision-tree LOOCV kernel reproduces the reference tree's
arithmetic expression for expression with fastmath disabled, so its
confusion counts are bit-identical to refitting DecisionTreeRiskClassifier
on every fold; the test suite enforces that equality. Two structural
facts make the kernel fast without changing any float:

* the per-node value scan only needs each node's rows in sorted order
  per feature, which a single global stable presort plus stable
  partitions maintains (equal values keep their relative order, and
  split boundaries never cut through a block of equal values);
* only the held-out row's root-to-leaf path influences its prediction,
  so the off-path subtrees are never grown.

Everything degrades gracefully: when numba is not importable the
callers fall back to the pure reference implementations.
"""

import math

import numpy as np

__all__ = ["HAVE_NUMBA", "dt_loocv_counts"]

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap

_ENTROPY, _GINI, _DKM = 0, 1, 2
_CRITERION_IDS = {"entropy": _ENTROPY, "gini": _GINI, "dkm": _DKM}


@njit(cache=True, fastmath=False)
def _impurity(crit, nu, nn, w):
    mu = nu * w
    M = mu + nn
    p = mu / M
    q = nn / M
    if crit == _ENTROPY:
        e = 0.0
        if p > 0.0:
            e -= p * math.log2(p)
        if q > 0.0:
            e -= q * math.log2(q)
        return e
    if crit == _GINI:
        return 1.0 - (p * p + q * q)
    return 2.0 * math.sqrt(p * q)


@njit(cache=True, fastmath=False)
def _dt_loocv_kernel(X, y, presort, crit, min_leaf, w):
    n, d = X.shape
    preds = np.empty(n, dtype=np.int8)
    rows = np.empty((d, n - 1), dtype=np.int64)

    for i in range(n):
        for f in range(d):
            t = 0
            for a in range(n):
                r = presort[f, a]
                if r != i:
                    rows[f, t] = r
                    t += 1
        start = 0
        end = n - 1
        risk = 0.0
        while True:
            m = end - start
            nu = 0
            for a in range(start, end):
                nu += y[rows[0, a]]
            nn = m - nu
            mu = nu * w
            risk = mu / (mu + nn)
            if nu == 0 or nn == 0 or m < 2 * min_leaf:
                break
            parent_imp = _impurity(crit, nu, nn, w)
            parent_mass = nu * w + nn

            best_gain = 0.0
            best_f = -1
            best_thr = 0.0
            for f in range(d):
                nu_left = 0
                nn_left = 0
                for pos in range(m - 1):
                    r = rows[f, start + pos]
                    if y[r] == 1:
                        nu_left += 1
                    else:
                        nn_left += 1
                    v1 = X[r, f]
                    v2 = X[rows[f, start + pos + 1], f]
                    if v2 == v1:
                        continue
                    n_left = pos + 1
                    n_right = m - n_left
                    if n_left < min_leaf or n_right < min_leaf:
                        continue
                    nu_right = nu - nu_left
                    nn_right = nn - nn_left
                    mass_left = nu_left * w + nn_left
                    mass_right = nu_right * w + nn_right
                    gain = (parent_imp
                            - (mass_left / parent_mass)
                            * _impurity(crit, nu_left, nn_left, w)
                            - (mass_right / parent_mass)
                            * _impurity(crit, nu_right, nn_right, w))
                    if gain > best_gain:
                        thr = v1 + (v2 - v1) / 2.0
                        if thr >= v2:
                            thr = v1
                        best_gain = gain
                        best_f = f
                        best_thr = thr
            if best_f < 0:
                break

            go_left = X[i, best_f] <= best_thr
            kept = 0
            for f in range(d):
                t = start
                for a in range(start, end):
                    r = rows[f, a]
                    if (X[r, best_f] <= best_thr) == go_left:
                        rows[f, t] = r
                        t += 1
                kept = t - start
            end = start + kept
        preds[i] = 1 if risk >= 0.5 else 0
    return preds


def dt_loocv_counts(X, y, criterion, min_leaf, user_weight):
    """Leave-one-out confusion counts for one decision-tree setup.

    Returns (tp, fn, tn, fp), bit-identical to refitting the reference
    tree on every fold.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    yi = np.ascontiguousarray(np.asarray(y), dtype=np.int64)
    n, d = X.shape
    presort = np.empty((d, n), dtype=np.int64)
    for f in range(d):
        presort[f] = np.argsort(X[:, f], kind="stable")
    preds = _dt_loocv_kernel(
        X, yi, presort, _CRITERION_IDS[criterion], int(min_leaf),
        float(user_weight))
    tp = int(((yi == 1) & (preds == 1)).sum())
    fn = int(((yi == 1) & (preds == 0)).sum())
    tn = int(((yi == 0) & (preds == 0)).sum())
    fp = int(((yi == 0) & (preds == 1)).sum())
    return tp, fn, tn, fp
