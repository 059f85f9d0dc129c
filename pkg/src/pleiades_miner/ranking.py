"""Unsupervised feature ranking and elimination.

Three complementary views of attribute importance:

* principal variables: greedy forward selection maximizing the variance
  of the data explained by projection onto the span of the selected
  columns;
* double Kaiser ranking: iterated PCA where a feature's importance is
  its largest loading magnitude over the informative components, and
  features falling below the uniform-loading threshold are eliminated
  one at a time;
* sparse component elimination: sparsified principal components with a
  variance floor; features absent from every retained component are
  dropped in waves and the decomposition restarts.
"""

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_array
from .quantify import kaiser_count, pca_eig

__all__ = [
    "RankedFeature",
    "principal_variables",
    "double_kaiser_ranking",
    "DoubleKaiserResult",
    "sparse_component_elimination",
    "SparseEliminationResult",
]


@dataclass
class RankedFeature:
    index: int
    fve: float
    cfve: float
    constant: bool = False


def principal_variables(X):
    """Greedy principal-variable ranking.

    Picks columns one at a time, each time adding the column that most
    increases the fraction of total variance explained by regression on
    the selected columns. Returns a list of RankedFeature in selection
    order; fve is the marginal gain, cfve the running total. Constant
    columns explain nothing, are flagged, and are appended last in index
    order. The final cfve reaches 1 up to numerical tolerance.
    """
    X = check_array(X, min_rows=2)
    n, d = X.shape
    Xc = X - X.mean(axis=0)
    variances = (Xc ** 2).sum(axis=0) / (n - 1)
    total = variances.sum()
    if total <= 0:
        return [RankedFeature(j, 0.0, 0.0, True) for j in range(d)]

    constant = variances == 0
    remaining = [j for j in range(d) if not constant[j]]
    selected = []
    out = []
    explained_prev = 0.0
    while remaining:
        best_j = None
        best_expl = -np.inf
        for j in remaining:
            cols = selected + [j]
            basis = Xc[:, cols]
            coef, *_ = np.linalg.lstsq(basis, Xc, rcond=None)
            fitted = basis @ coef
            expl = (fitted ** 2).sum() / (n - 1)
            if expl > best_expl:
                best_expl = expl
                best_j = j
        selected.append(best_j)
        remaining.remove(best_j)
        out.append(RankedFeature(
            best_j,
            (best_expl - explained_prev) / total,
            best_expl / total,
        ))
        explained_prev = best_expl
    for j in range(d):
        if constant[j]:
            out.append(RankedFeature(j, 0.0, explained_prev / total, True))
    return out


@dataclass
class DoubleKaiserResult:
    ranking: list
    removed: list = field(default_factory=list)
    importances: dict = field(default_factory=dict)


def double_kaiser_ranking(X):
    """Iterated-PCA importance ranking with uniform-loading elimination.

    At each round, PCA of the surviving columns defines the informative
    components (eigenvalue above the mean); a feature's importance is
    its largest absolute loading across them. Features with importance
    strictly below 1/sqrt(n_surviving) are trivial; the least important
    one is removed (lowest index on ties) and the round repeats. The
    final ranking lists survivors by decreasing importance (lowest index
    first on ties) followed by the removed features, most recently
    removed first.
    """
    X = check_array(X, min_rows=2)
    d = X.shape[1]
    current = list(range(d))
    removed = []
    importances = {}
    while True:
        vals, vecs, _ = pca_eig(X[:, current])
        n_inf = kaiser_count(vals)
        if n_inf == 0:
            n_inf = vecs.shape[1]
        imp = np.abs(vecs[:, :n_inf]).max(axis=1)
        for pos, j in enumerate(current):
            importances[j] = float(imp[pos])
        threshold = 1.0 / np.sqrt(len(current))
        trivial = imp < threshold
        if not trivial.any() or len(current) == 1:
            break
        drop_pos = int(np.argmin(imp))
        removed.append(current.pop(drop_pos))
    survivors = sorted(current, key=lambda j: (-importances[j], j))
    ranking = survivors + list(reversed(removed))
    return DoubleKaiserResult(ranking, removed, importances)


@dataclass
class SparseEliminationResult:
    waves: list
    kept: list
    components: np.ndarray


def _leading_eigvec(cov, support):
    sub = cov[np.ix_(support, support)]
    vals, vecs = np.linalg.eigh(sub)
    v = vecs[:, -1]
    lead = np.argmax(np.abs(v))
    if v[lead] < 0:
        v = -v
    w = np.zeros(cov.shape[0])
    w[support] = v
    return w


def _sparsify(cov, c):
    """Leading eigenvector with loadings below c zeroed one at a time."""
    d = cov.shape[0]
    support = list(range(d))
    w = _leading_eigvec(cov, support)
    while len(support) > 1:
        mags = np.abs(w[support])
        pos = int(np.argmin(mags))
        if mags[pos] >= c:
            break
        support.pop(pos)
        w = _leading_eigvec(cov, support)
    return w


def sparse_component_elimination(X):
    """Feature elimination through sparsified principal components.

    Components are extracted by deflation. Each component starts as the
    leading eigenvector; loadings with magnitude below 1/sqrt(n_feat)
    are zeroed smallest-first, re-solving on the surviving support after
    each zeroing. A component whose explained variance falls below the
    mean column variance of the round's data is discarded and extraction
    stops. Features with zero loading in every retained component are
    removed together (one wave) and the whole procedure restarts on the
    surviving features. Returns the removal waves (original column
    indices), the kept features, and the final retained components
    (rows = components, columns = kept features).
    """
    X = check_array(X, min_rows=2)
    d = X.shape[1]
    current = list(range(d))
    waves = []
    components = np.zeros((0, len(current)))
    while True:
        Xr = X[:, current]
        n_feat = len(current)
        cov0 = np.atleast_2d(np.cov(Xr, rowvar=False, ddof=1))
        h = np.trace(cov0) / n_feat
        c = 1.0 / np.sqrt(n_feat)
        Xd = Xr - Xr.mean(axis=0)
        retained = []
        for _ in range(n_feat):
            cov = np.atleast_2d(np.cov(Xd, rowvar=False, ddof=1))
            w = _sparsify(cov, c)
            var_c = float(w @ cov @ w)
            if var_c < h:
                break
            retained.append(w)
            Xd = Xd - np.outer(Xd @ w, w)
        if not retained:
            components = np.zeros((0, n_feat))
            break
        components = np.vstack(retained)
        used = (components != 0).any(axis=0)
        if used.all():
            break
        wave = [current[pos] for pos in range(n_feat) if not used[pos]]
        waves.append(wave)
        current = [j for pos, j in enumerate(current) if used[pos]]
        if len(current) == 0:
            break
    return SparseEliminationResult(waves, current, components)
