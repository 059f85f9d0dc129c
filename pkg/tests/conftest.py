"""Shared fixtures: synthetic survey tables and gated real-data inputs.

The real public dataset is not bundled. Tests that need it read file
paths from environment variables and skip with instructions when they
are unset:

  PLEIADES_DATA      quantified public survey CSV (canonical schema)
  PLEIADES_RAW_DATA  raw factor-score CSV (id,nscore,escore,oscore,
                     ascore,cscore)
  PLEIADES_RUN_SEARCH=1  opt into the long reduced-grid search check
"""

import io
import os

import numpy as np
import pytest

from pleiades_miner.datasets import (ATTRIBUTE_COLUMNS, COLUMNS, Table,
                                     load_table)

DATA_ENV = "PLEIADES_DATA"
RAW_ENV = "PLEIADES_RAW_DATA"
SEARCH_ENV = "PLEIADES_RUN_SEARCH"

_DRUG_COLS = COLUMNS[13:]


def make_rows(n=240, seed=7, n_levels=None):
    """Synthetic survey rows in the canonical schema.

    Attribute cells are discrete float grids (mimicking a quantified
    release); usage categories follow a noisy linear score so that
    attributes carry real signal. The control substance is CL0
    everywhere. Returns (rows, attributes dict, usage dict).
    """
    rng = np.random.default_rng(seed)
    levels = {"age": 6, "gender": 2, "education": 9, "country": 7,
              "ethnicity": 7, "nscore": 41, "escore": 41, "oscore": 41,
              "ascore": 41, "cscore": 41, "impulsive": 10, "ss": 11}
    if n_levels:
        levels.update(n_levels)
    att = {}
    for name in ATTRIBUTE_COLUMNS:
        k = levels[name]
        grid = np.round(np.linspace(-2.2, 2.2, k), 5)
        att[name] = grid[rng.integers(0, k, size=n)]
    X = np.column_stack([att[a] for a in ATTRIBUTE_COLUMNS])
    usage = {}
    for d in _DRUG_COLS:
        if d == "semer":
            usage[d] = np.zeros(n, dtype=np.int64)
            continue
        w = rng.normal(size=X.shape[1]) * (rng.random(X.shape[1]) < 0.4)
        score = X @ w + rng.normal(scale=0.8, size=n)
        qs = np.quantile(score, [0.45, 0.6, 0.7, 0.8, 0.9, 0.96])
        usage[d] = np.searchsorted(qs, score)
    rows = []
    for i in range(n):
        row = [f"P{i:04d}"]
        row += [repr(float(att[a][i])) for a in ATTRIBUTE_COLUMNS]
        row += [f"CL{usage[d][i]}" for d in _DRUG_COLS]
        rows.append(row)
    return rows, att, usage


def rows_to_csv_text(rows):
    buf = io.StringIO()
    buf.write(",".join(COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


@pytest.fixture(scope="session")
def synth_rows():
    return make_rows()


@pytest.fixture(scope="session")
def synth_table(synth_rows):
    rows, _, _ = synth_rows
    return Table(rows)


@pytest.fixture(scope="session")
def synth_csv(tmp_path_factory, synth_rows):
    rows, _, _ = synth_rows
    path = tmp_path_factory.mktemp("synth") / "quantified.csv"
    path.write_text(rows_to_csv_text(rows))
    return str(path)


@pytest.fixture(scope="session")
def public_table():
    path = os.environ.get(DATA_ENV)
    if not path:
        pytest.skip(f"set {DATA_ENV} to the quantified public survey CSV")
    return load_table(path)


@pytest.fixture(scope="session")
def public_data_path():
    path = os.environ.get(DATA_ENV)
    if not path:
        pytest.skip(f"set {DATA_ENV} to the quantified public survey CSV")
    return path


@pytest.fixture(scope="session")
def raw_scores():
    path = os.environ.get(RAW_ENV)
    if not path:
        pytest.skip(f"set {RAW_ENV} to the raw factor-score CSV "
                    "(id,nscore,escore,oscore,ascore,cscore)")
    from pleiades_miner.datasets import load_raw_scores
    return load_raw_scores(path)[1]


def search_opt_in():
    return os.environ.get(SEARCH_ENV) == "1"
