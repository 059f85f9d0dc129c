"""Quantification of categorical survey attributes.

Ordinal categories are mapped to real values through the inverse normal
CDF: category boundaries sit at the standard normal quantiles of the
cumulative empirical frequencies, and each category is represented by
the quantile of its probability midpoint. Nominal categories are either
one-hot (dummy) coded or mapped to a single value through a PCA of the
remaining numeric attributes (category centroids projected onto their
own leading principal direction).

T-score helpers rescale raw scores to mean 50 / SD 10, either against
the sample itself or against external normative constants.
"""

import numpy as np
from scipy.special import ndtri
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_array

__all__ = [
    "category_counts",
    "ordinal_thresholds",
    "ordinal_midpoints",
    "quantify_ordinal",
    "t_score",
    "pca_eig",
    "kaiser_count",
    "centroid_pca_values",
    "quantify_nominal",
    "dummy_code",
    "OrdinalQuantifier",
    "ordered_categories",
    "quantify_table",
]


def category_counts(values, categories=None):
    """Counts per category. Categories default to sorted distinct values."""
    values = list(values)
    if categories is None:
        categories = sorted(set(values))
    categories = list(categories)
    index = {c: i for i, c in enumerate(categories)}
    counts = np.zeros(len(categories), dtype=np.int64)
    for v in values:
        try:
            counts[index[v]] += 1
        except KeyError:
            raise ValueError(f"value {v!r} not in declared categories") from None
    return categories, counts


def ordinal_thresholds(counts):
    """Standard normal quantiles of cumulative category frequencies.

    For counts (n_1..n_k) returns t_i = ndtri(sum_{j<=i} p_j) for
    i = 1..k-1 (the k-th cumulative is 1 and is omitted). The result is
    invariant under rescaling of the counts.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 1 or counts.size < 1:
        raise ValueError("counts must be a non-empty 1-D sequence")
    if (counts < 0).any():
        raise ValueError("counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise ValueError("counts must sum to a positive value")
    cum = np.cumsum(counts) / total
    return ndtri(cum[:-1])


def ordinal_midpoints(counts):
    """Representative value per category plus zero-count flags.

    Category i maps to ndtri(sum_{j<i} p_j + p_i / 2). A zero-count
    category collapses onto its upper threshold; such categories are
    flagged because their value is not supported by any observation.
    Returns (values, zero_count_flags).
    """
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 1 or counts.size < 1:
        raise ValueError("counts must be a non-empty 1-D sequence")
    if (counts < 0).any():
        raise ValueError("counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise ValueError("counts must sum to a positive value")
    p = counts / total
    below = np.concatenate(([0.0], np.cumsum(p)[:-1]))
    # rounding in the cumulative sum must not push the argument outside
    # [0, 1]: a zero-count edge category sits exactly on the boundary
    values = ndtri(np.clip(below + p / 2.0, 0.0, 1.0))
    return values, counts == 0


def quantify_ordinal(values, categories=None):
    """Quantify one ordinal column.

    Returns (mapped, mapping, flags): the per-row float values, the
    category -> value dict, and the category -> zero-count flag dict.
    """
    categories, counts = category_counts(values, categories)
    reps, zero = ordinal_midpoints(counts)
    mapping = dict(zip(categories, reps.tolist()))
    flags = dict(zip(categories, zero.tolist()))
    mapped = np.array([mapping[v] for v in values], dtype=np.float64)
    return mapped, mapping, flags


def t_score(raw, center, scale):
    """Linear rescaling to the T metric: 10 * (raw - center) / scale + 50.

    center and scale may be scalars or per-column arrays broadcastable
    against raw.
    """
    raw = np.asarray(raw, dtype=np.float64)
    scale = np.asarray(scale, dtype=np.float64)
    if (scale <= 0).any():
        raise ValueError("scale must be positive")
    return 10.0 * (raw - center) / scale + 50.0


def pca_eig(X, ddof=1):
    """Covariance PCA with deterministic conventions.

    Returns (eigenvalues, components, mean): eigenvalues in descending
    order (stable under ties), components as columns matching the
    eigenvalue order, each flipped so that its largest-magnitude
    coordinate is positive (first such coordinate on ties).
    """
    X = check_array(X, min_rows=2)
    mean = X.mean(axis=0)
    cov = np.cov(X, rowvar=False, ddof=ddof)
    cov = np.atleast_2d(cov)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0:
            vecs[:, j] = -col
    return vals, vecs, mean


def kaiser_count(eigenvalues):
    """Number of informative components: eigenvalues above their mean."""
    vals = np.asarray(eigenvalues, dtype=np.float64)
    return int((vals > vals.mean()).sum())


def centroid_pca_values(X_other, labels):
    """Quantify one nominal column against the remaining numeric columns.

    Projects rows onto the informative principal components of X_other,
    computes per-category centroids there, extracts the leading
    principal direction of the centroids (weighted by category counts so
    the resulting values have weighted mean zero), and assigns each
    category its centroid's coordinate along that direction.

    Returns (mapping, per_row_values).
    """
    X_other = check_array(X_other, min_rows=2)
    labels = list(labels)
    if len(labels) != X_other.shape[0]:
        raise ValueError("labels and X_other disagree on row count")

    vals, vecs, mean = pca_eig(X_other)
    n_inf = kaiser_count(vals)
    if n_inf == 0:
        n_inf = 1
    proj = (X_other - mean) @ vecs[:, :n_inf]

    categories, counts = category_counts(labels)
    cat_index = {c: i for i, c in enumerate(categories)}
    centroids = np.zeros((len(categories), n_inf), dtype=np.float64)
    for row, lab in zip(proj, labels):
        centroids[cat_index[lab]] += row
    centroids /= counts[:, None]

    weights = counts / counts.sum()
    center = weights @ centroids
    shifted = centroids - center
    scaled = shifted * np.sqrt(weights)[:, None]
    # leading right singular vector of the weighted centroid cloud
    _, s, vt = np.linalg.svd(scaled, full_matrices=False)
    direction = vt[0]
    lead = np.argmax(np.abs(direction))
    if direction[lead] < 0:
        direction = -direction
    values = shifted @ direction

    mapping = dict(zip(categories, values.tolist()))
    per_row = np.array([mapping[lab] for lab in labels], dtype=np.float64)
    return mapping, per_row


def quantify_nominal(X_other, labels):
    """Alias for centroid_pca_values returning the same pair."""
    return centroid_pca_values(X_other, labels)


def dummy_code(labels, categories=None):
    """One 0/1 indicator column per category; each row sums to one.

    Returns (matrix, categories).
    """
    categories, _ = category_counts(labels, categories)
    index = {c: i for i, c in enumerate(categories)}
    out = np.zeros((len(list(labels)), len(categories)), dtype=np.float64)
    for i, lab in enumerate(labels):
        out[i, index[lab]] = 1.0
    assert (out.sum(axis=1) == 1.0).all()
    return out, categories


def ordered_categories(values):
    """Distinct values in their natural order.

    Numeric order when every distinct value parses as a number (raw
    survey codes like 9 vs 10 must not sort lexicographically),
    lexicographic otherwise.
    """
    distinct = set(values)
    try:
        return sorted(distinct, key=float)
    except ValueError:
        return sorted(distinct)


def quantify_table(table, nominal_mode="catpca"):
    """Quantify every attribute column of a raw-coded respondent table.

    Ordinal columns get the midpoint-quantile mapping with categories in
    natural order. Nominal columns get either a single centroid-projection
    value per category ("catpca") or indicator expansion ("dummy"). In
    catpca mode nominal columns are processed in schema order, each one
    quantified against every other attribute column already in numeric
    form (all ordinals plus previously processed nominals).

    Returns (header, rows, mapping_records). header/rows are ready for
    CSV output: the id and usage cells pass through verbatim, quantified
    cells are full-precision reprs. mapping_records is a list of dicts
    with keys column, category, value, note.
    """
    from .datasets import (ATTRIBUTE_COLUMNS, DRUG_COLUMNS, NOMINAL_COLUMNS)

    if nominal_mode not in ("catpca", "dummy"):
        raise ValueError(
            f"nominal_mode must be 'catpca' or 'dummy', got {nominal_mode!r}")

    ordinal_cols = [c for c in ATTRIBUTE_COLUMNS if c not in NOMINAL_COLUMNS]
    numeric = {}
    mappings = []
    for col in ordinal_cols:
        raw = table.column(col)
        cats = ordered_categories(raw)
        mapped, mapping, flags = quantify_ordinal(raw, categories=cats)
        numeric[col] = mapped
        for cat in cats:
            mappings.append({
                "column": col, "category": cat,
                "value": repr(mapping[cat]),
                "note": "zero-count" if flags[cat] else "",
            })

    dummy_columns = {}
    if nominal_mode == "catpca":
        done = list(ordinal_cols)
        for col in (c for c in ATTRIBUTE_COLUMNS if c in NOMINAL_COLUMNS):
            X_other = np.column_stack([numeric[c] for c in done])
            mapping, per_row = centroid_pca_values(X_other, table.column(col))
            numeric[col] = per_row
            done.append(col)
            for cat in sorted(mapping):
                mappings.append({"column": col, "category": cat,
                                 "value": repr(mapping[cat]), "note": ""})
    else:
        for col in NOMINAL_COLUMNS:
            labels = table.column(col)
            cats = ordered_categories(labels)
            mat, cats = dummy_code(labels, categories=cats)
            names = [f"{col}={cat}" for cat in cats]
            dummy_columns[col] = (names, mat)
            for cat, name in zip(cats, names):
                mappings.append({"column": col, "category": cat,
                                 "value": name, "note": "indicator column"})

    header = ["id"]
    for col in ATTRIBUTE_COLUMNS:
        if col in dummy_columns:
            header.extend(dummy_columns[col][0])
        else:
            header.append(col)
    header.extend(DRUG_COLUMNS)

    ids = table.column("id")
    drug_cells = [table.column(d) for d in DRUG_COLUMNS]
    rows = []
    for i in range(table.n_rows):
        row = [ids[i]]
        for col in ATTRIBUTE_COLUMNS:
            if col in dummy_columns:
                row.extend(repr(v) for v in dummy_columns[col][1][i].tolist())
            else:
                row.append(repr(float(numeric[col][i])))
        row.extend(cells[i] for cells in drug_cells)
        rows.append(row)
    return header, rows, mappings


class OrdinalQuantifier(BaseEstimator, TransformerMixin):
    """Column-wise ordinal quantifier with the midpoint-quantile mapping.

    Fits one category -> value mapping per column of a 2-D object array
    (or list of lists) and transforms rows to floats. Unseen categories
    at transform time raise.
    """

    def fit(self, X, y=None):
        rows = [list(r) for r in X]
        if not rows:
            raise ValueError("X must contain at least one row")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("X rows have inconsistent lengths")
        self.mappings_ = []
        self.zero_count_flags_ = []
        for j in range(width):
            _, mapping, flags = quantify_ordinal([r[j] for r in rows])
            self.mappings_.append(mapping)
            self.zero_count_flags_.append(flags)
        self.n_features_in_ = width
        return self

    def transform(self, X):
        if not hasattr(self, "mappings_"):
            raise RuntimeError("OrdinalQuantifier is not fitted; call fit() first")
        rows = [list(r) for r in X]
        out = np.empty((len(rows), self.n_features_in_), dtype=np.float64)
        for i, r in enumerate(rows):
            if len(r) != self.n_features_in_:
                raise ValueError("row width differs from fitted width")
            for j, v in enumerate(r):
                try:
                    out[i, j] = self.mappings_[j][v]
                except KeyError:
                    raise ValueError(
                        f"unseen category {v!r} in column {j}") from None
        return out
