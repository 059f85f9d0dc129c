"""Weighting and density kernels.

Neighbor-weight kernels act on the ratio u = d / d_max in [0, 1] and
return unnormalized weights. Density kernels are radially symmetric
probability densities on R^d scaled to a radius r, integrating to one.
"""

import math

import numpy as np

__all__ = [
    "NEIGHBOR_KERNELS",
    "DENSITY_KERNELS",
    "neighbor_weights",
    "unit_ball_volume",
    "density_kernel_values",
]


def _uniform(u):
    return np.ones_like(u)


def _triangular(u):
    return 1.0 - u


def _epanechnikov(u):
    return 1.0 - u ** 2


def _gaussian(u):
    return np.exp(-0.5 * u ** 2)


NEIGHBOR_KERNELS = {
    "uniform": _uniform,
    "triangular": _triangular,
    "epanechnikov": _epanechnikov,
    "gaussian": _gaussian,
}

DENSITY_KERNELS = ("uniform", "triangular", "epanechnikov", "gaussian")


def neighbor_weights(kernel, u):
    """Evaluate a neighbor-weight kernel on ratios u in [0, 1]."""
    try:
        fn = NEIGHBOR_KERNELS[kernel]
    except KeyError:
        raise ValueError(
            f"unknown kernel {kernel!r}; expected one of {list(NEIGHBOR_KERNELS)}"
        ) from None
    return fn(np.asarray(u, dtype=np.float64))


def unit_ball_volume(d):
    """Volume of the d-dimensional unit ball."""
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def density_kernel_values(kernel, dist, r, d):
    """Evaluate a unit-integral kernel of radius r at distances dist.

    dist is an array of Euclidean distances in R^d; r may be a scalar
    or an array broadcasting against dist (per-point radii). The compact
    kernels (uniform, triangular, epanechnikov) vanish beyond r; the
    gaussian kernel uses r as its bandwidth.
    """
    dist = np.asarray(dist, dtype=np.float64)
    r = np.asarray(r, dtype=np.float64)
    if np.any(r <= 0):
        raise ValueError("kernel radius must be positive")
    u = dist / r
    volume = unit_ball_volume(d) * r ** d
    if kernel == "uniform":
        return np.where(u <= 1.0, 1.0 / volume, 0.0)
    if kernel == "triangular":
        return np.where(u <= 1.0, (d + 1.0) / volume * (1.0 - u), 0.0)
    if kernel == "epanechnikov":
        return np.where(u <= 1.0, (d + 2.0) / (2.0 * volume) * (1.0 - u ** 2), 0.0)
    if kernel == "gaussian":
        return (2.0 * math.pi) ** (-d / 2.0) * r ** (-d) * np.exp(-0.5 * u ** 2)
    raise ValueError(
        f"unknown kernel {kernel!r}; expected one of {list(DENSITY_KERNELS)}")
