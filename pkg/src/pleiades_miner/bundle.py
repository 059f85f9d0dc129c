"""Self-contained model bundles.

A bundle is a JSON document holding a training recipe: the method name,
its parameters, the user weight, the feature tokens, and the training
matrix itself. Loading a bundle refits the classifier deterministically
from the stored data, so predictions are reproducible from the file
alone and no binary serialization format is involved.
"""

import base64
import json

import numpy as np

from .classifiers import METHODS

__all__ = ["BUNDLE_FORMAT", "make_bundle", "save_bundle", "load_bundle",
           "fit_bundle", "bundle_risk"]

BUNDLE_FORMAT = "pleiades-miner/model@1"


def _encode_array(a):
    a = np.ascontiguousarray(a)
    return {
        "dtype": str(a.dtype),
        "shape": list(a.shape),
        "data": base64.b64encode(a.tobytes()).decode("ascii"),
    }


def _decode_array(spec):
    raw = base64.b64decode(spec["data"])
    a = np.frombuffer(raw, dtype=np.dtype(spec["dtype"]))
    return a.reshape(spec["shape"]).copy()


def make_bundle(method, params, user_weight, features, basis, target, X, y,
                seed=0):
    """Assemble a bundle dict from a training configuration."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    return {
        "format": BUNDLE_FORMAT,
        "method": method,
        "params": dict(params),
        "user_weight": float(user_weight),
        "features": list(features),
        "basis": basis,
        "target": target,
        "X": _encode_array(np.asarray(X, dtype=np.float64)),
        "y": _encode_array(np.asarray(y, dtype=np.int8)),
        "seed": int(seed),
    }


def save_bundle(bundle, dest):
    with open(dest, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(bundle, fh, indent=2)
        fh.write("\n")


def load_bundle(source):
    with open(source, "r", encoding="utf-8") as fh:
        bundle = json.load(fh)
    fmt = bundle.get("format")
    if fmt != BUNDLE_FORMAT:
        raise ValueError(f"unsupported bundle format {fmt!r}")
    return bundle


def fit_bundle(bundle):
    """Refit the stored classifier from the bundle's training data."""
    cls = METHODS[bundle["method"]]
    params = dict(bundle["params"])
    if bundle["method"] == "RF":
        params.setdefault("seed", bundle.get("seed", 0))
    model = cls(user_weight=bundle["user_weight"], **params)
    X = _decode_array(bundle["X"])
    y = _decode_array(bundle["y"])
    return model.fit(X, y)


def bundle_risk(bundle, X):
    """Risk scores of new rows under the bundle's refitted model."""
    return fit_bundle(bundle).risk(np.asarray(X, dtype=np.float64))
