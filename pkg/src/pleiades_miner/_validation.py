"""Input validation helpers shared by estimators and pipeline functions."""

import numpy as np

__all__ = [
    "check_array",
    "check_X_y",
    "check_is_fitted",
    "check_user_weight",
]


def check_array(X, *, name="X", min_rows=1, min_cols=1, dtype=np.float64):
    """Coerce X to a 2-D float array and reject non-finite values."""
    arr = np.asarray(X, dtype=dtype)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_rows:
        raise ValueError(f"{name} needs at least {min_rows} rows, got {arr.shape[0]}")
    if arr.shape[1] < min_cols:
        raise ValueError(f"{name} needs at least {min_cols} columns, got {arr.shape[1]}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or infinite values")
    return arr


def check_X_y(X, y, *, min_rows=1):
    """Validate a feature matrix together with binary 0/1 labels."""
    X = check_array(X, min_rows=min_rows)
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"y must be 1-dimensional, got shape {y.shape}")
    if y.shape[0] != X.shape[0]:
        raise ValueError(
            f"X and y disagree on sample count: {X.shape[0]} vs {y.shape[0]}")
    uniq = np.unique(y)
    if not np.isin(uniq, (0, 1)).all():
        raise ValueError(f"y must contain only 0 and 1, got values {uniq!r}")
    return X, y.astype(np.int8)


def check_is_fitted(estimator, attribute):
    """Raise if the estimator has not been fitted yet."""
    if not hasattr(estimator, attribute):
        raise RuntimeError(
            f"{type(estimator).__name__} is not fitted; call fit() first")


def check_user_weight(user_weight):
    w = float(user_weight)
    if not np.isfinite(w) or w <= 0:
        raise ValueError(f"user_weight must be a positive finite number, got {user_weight!r}")
    return w
