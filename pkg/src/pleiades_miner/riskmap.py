"""Risk surfaces of a fitted model bundle over two features.

The map varies two features over their training ranges on a regular
grid, pins every other feature at its training median, and evaluates
the refitted bundle's risk at each grid point. A categorical slice
feature produces one surface per observed category. Output is plain
CSV (a long table plus one wide matrix per slice); rendering is left
to external tools.
"""

import os

import numpy as np

from .bundle import fit_bundle, _decode_array

__all__ = ["risk_map", "write_risk_map"]


def risk_map(bundle, x_feature, y_feature, slice_feature=None, grid=200):
    """Evaluate the bundle's risk over a 2-D feature grid.

    Returns a dict with the axis values, the slice values (a single
    None when no slice feature is given), and one grid x grid risk
    matrix per slice value (rows indexed by the y axis).
    """
    features = bundle["features"]
    for name in (x_feature, y_feature):
        if name not in features:
            raise ValueError(f"{name!r} is not a bundle feature {features}")
    if x_feature == y_feature:
        raise ValueError("x and y must be different features")
    if slice_feature is not None:
        if slice_feature not in features:
            raise ValueError(
                f"{slice_feature!r} is not a bundle feature {features}")
        if slice_feature in (x_feature, y_feature):
            raise ValueError("slice feature must differ from the axes")
    grid = int(grid)
    if grid < 2:
        raise ValueError("grid must be at least 2")

    model = fit_bundle(bundle)
    X = _decode_array(bundle["X"])
    ix = features.index(x_feature)
    iy = features.index(y_feature)
    xs = np.linspace(X[:, ix].min(), X[:, ix].max(), grid)
    ys = np.linspace(X[:, iy].min(), X[:, iy].max(), grid)
    base = np.median(X, axis=0)

    if slice_feature is None:
        slice_values = [None]
        islice = None
    else:
        islice = features.index(slice_feature)
        slice_values = [float(v) for v in np.unique(X[:, islice])]

    gx, gy = np.meshgrid(xs, ys)
    points = np.tile(base, (grid * grid, 1))
    points[:, ix] = gx.ravel()
    points[:, iy] = gy.ravel()

    surfaces = {}
    for value in slice_values:
        if islice is not None:
            points[:, islice] = value
        surfaces[value] = model.risk(points).reshape(grid, grid)
    return {
        "x_feature": x_feature, "y_feature": y_feature,
        "slice_feature": slice_feature,
        "xs": xs, "ys": ys, "slice_values": slice_values,
        "risk": surfaces,
    }


def _slice_tag(value):
    if value is None:
        return ""
    text = repr(float(value))
    return text.replace("-", "m").replace(".", "p")


def write_risk_map(result, out_dir):
    """Write riskmap.csv (long form) and one wide matrix per slice."""
    os.makedirs(out_dir, exist_ok=True)
    xs, ys = result["xs"], result["ys"]
    long_path = os.path.join(out_dir, "riskmap.csv")
    with open(long_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,slice,risk\n")
        for value in result["slice_values"]:
            surface = result["risk"][value]
            stext = "" if value is None else repr(float(value))
            for r, yv in enumerate(ys):
                yr = repr(float(yv))
                for c, xv in enumerate(xs):
                    fh.write(f"{float(xv)!r},{yr},{stext},"
                             f"{float(surface[r, c])!r}\n")
    written = [long_path]
    for value in result["slice_values"]:
        surface = result["risk"][value]
        tag = _slice_tag(value)
        name = f"riskmap_grid_{tag}.csv" if tag else "riskmap_grid.csv"
        path = os.path.join(out_dir, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("y\\x," + ",".join(repr(float(v)) for v in xs) + "\n")
            for r, yv in enumerate(ys):
                fh.write(repr(float(yv)) + ","
                         + ",".join(repr(float(v)) for v in surface[r])
                         + "\n")
        written.append(path)
    return written
