"""Tabular survey data: schema, loading, screening, and usage targets.

The canonical table has one row per respondent: an id column, twelve
personal attribute columns, eighteen substance usage columns, one
fictitious control substance column (used to screen over-claimers), and
usage values drawn from the seven-level scale CL0..CL6.

Cell values are kept exactly as parsed, so writing a loaded table back
out reproduces every decimal verbatim.
"""

import csv
import io
from pathlib import Path

import numpy as np

__all__ = [
    "COLUMNS",
    "ATTRIBUTE_COLUMNS",
    "NOMINAL_COLUMNS",
    "DRUG_COLUMNS",
    "TARGET_DRUGS",
    "CONTROL_DRUG",
    "USAGE_LEVELS",
    "BASES",
    "PLEIADES",
    "Table",
    "load_table",
    "screen_overclaimers",
    "user_vector",
    "usage_counts",
    "pleiad_usage_counts",
    "RAW_SCORE_COLUMNS",
    "load_raw_scores",
]

ATTRIBUTE_COLUMNS = [
    "age", "gender", "education", "country", "ethnicity",
    "nscore", "escore", "oscore", "ascore", "cscore", "impulsive", "ss",
]

# Attributes without a natural linear order; everything else is ordinal.
NOMINAL_COLUMNS = ["country", "ethnicity"]

TARGET_DRUGS = [
    "alcohol", "amphet", "amyl", "benzos", "caff", "cannabis", "choc",
    "coke", "crack", "ecstasy", "heroin", "ketamine", "legalh", "lsd",
    "meth", "mmushrooms", "nicotine", "vsa",
]

CONTROL_DRUG = "semer"

DRUG_COLUMNS = [
    "alcohol", "amphet", "amyl", "benzos", "caff", "cannabis", "choc",
    "coke", "crack", "ecstasy", "heroin", "ketamine", "legalh", "lsd",
    "meth", "mmushrooms", "nicotine", "semer", "vsa",
]

COLUMNS = ["id"] + ATTRIBUTE_COLUMNS + DRUG_COLUMNS

USAGE_LEVELS = ["CL0", "CL1", "CL2", "CL3", "CL4", "CL5", "CL6"]

# Minimal usage level that makes a respondent a "user" on each basis.
BASES = {"decade": 2, "year": 3, "month": 4, "week": 5}

# Correlation pleiades: a respondent belongs to a pleiad group if they
# are a user of any member substance on the given basis.
PLEIADES = {
    "heroinPl": ["crack", "coke", "meth", "heroin"],
    "ecstasyPl": ["amphet", "cannabis", "coke", "ketamine", "lsd",
                  "mmushrooms", "legalh", "ecstasy"],
    "benzoPl": ["meth", "amphet", "coke", "benzos"],
}


class Table:
    """An immutable respondent table with verbatim string cells."""

    def __init__(self, rows):
        self.rows = [list(r) for r in rows]
        for i, r in enumerate(self.rows):
            if len(r) != len(COLUMNS):
                raise ValueError(
                    f"row {i} has {len(r)} cells, expected {len(COLUMNS)}")
        self._col = {name: j for j, name in enumerate(COLUMNS)}

    @property
    def n_rows(self):
        return len(self.rows)

    def column(self, name):
        j = self._col[name]
        return [r[j] for r in self.rows]

    def attribute_matrix(self, columns=None):
        """Attribute columns as a float matrix (quantified tables)."""
        columns = list(columns) if columns is not None else ATTRIBUTE_COLUMNS
        idx = [self._col[c] for c in columns]
        try:
            return np.array(
                [[float(r[j]) for j in idx] for r in self.rows], dtype=np.float64)
        except ValueError as exc:
            raise ValueError(f"non-numeric attribute cell: {exc}") from None

    def usage_codes(self, drug):
        j = self._col[drug]
        return np.array([int(r[j][2:]) for r in self.rows], dtype=np.int64)

    def select(self, keep_mask):
        return Table([r for r, keep in zip(self.rows, keep_mask) if keep])

    def write(self, destination):
        """Write the table as CSV, reproducing cell strings verbatim."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(self.rows)
        text = buf.getvalue()
        if isinstance(destination, (str, Path)):
            Path(destination).write_text(text)
        else:
            destination.write(text)

    def __eq__(self, other):
        return isinstance(other, Table) and self.rows == other.rows


def _validate_usage(rows):
    levels = set(USAGE_LEVELS)
    drug_idx = [(d, COLUMNS.index(d)) for d in DRUG_COLUMNS]
    for i, r in enumerate(rows):
        for d, j in drug_idx:
            if r[j] not in levels:
                raise ValueError(
                    f"row {i}: column {d} has invalid usage value {r[j]!r}; "
                    f"expected one of {USAGE_LEVELS}")


def load_table(source):
    """Load a respondent table from a CSV file path or text stream.

    The header row must name exactly the canonical columns, in order
    (surrounding whitespace is tolerated). Usage columns must contain
    CL0..CL6 values.
    """
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return load_table(fh)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise ValueError("empty input: expected a header row") from None
    header = [h.strip() for h in header]
    if header != COLUMNS:
        raise ValueError(
            "unexpected header; the first line must name these columns in "
            f"order: {','.join(COLUMNS)} (got: {','.join(header)})")
    rows = [[c.strip() for c in r] for r in reader if r]
    table = Table(rows)
    _validate_usage(table.rows)
    return table


def screen_overclaimers(table):
    """Drop respondents claiming use of the fictitious control substance.

    Returns (screened_table, n_removed). Applying the screen twice is a
    no-op.
    """
    codes = table.usage_codes(CONTROL_DRUG)
    keep = codes == 0
    return table.select(keep), int((~keep).sum())


def user_vector(table, target, basis):
    """Boolean user indicator for a drug or pleiad on the given basis."""
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}; expected one of {list(BASES)}")
    threshold = BASES[basis]
    if target in PLEIADES:
        members = PLEIADES[target]
        out = np.zeros(table.n_rows, dtype=bool)
        for drug in members:
            out |= table.usage_codes(drug) >= threshold
        return out
    if target not in TARGET_DRUGS:
        raise ValueError(
            f"unknown target {target!r}; expected a drug column or one of "
            f"{list(PLEIADES)}")
    return table.usage_codes(target) >= threshold


def usage_counts(table):
    """Per-drug, per-basis user counts and percentages.

    Returns a list of (drug, basis, count, percent) with percent on the
    0..100 scale, unrounded.
    """
    n = table.n_rows
    out = []
    for drug in TARGET_DRUGS:
        codes = table.usage_codes(drug)
        for basis, threshold in BASES.items():
            count = int((codes >= threshold).sum())
            out.append((drug, basis, count, 100.0 * count / n))
    return out


def pleiad_usage_counts(table):
    """Per-pleiad, per-basis user counts and percentages."""
    n = table.n_rows
    out = []
    for pleiad in PLEIADES:
        for basis in BASES:
            count = int(user_vector(table, pleiad, basis).sum())
            out.append((pleiad, basis, count, 100.0 * count / n))
    return out


RAW_SCORE_COLUMNS = ["nscore", "escore", "oscore", "ascore", "cscore"]


def load_raw_scores(source):
    """Load a raw factor-score CSV.

    The file must have a header line id,nscore,escore,oscore,ascore,
    cscore with one row per respondent (raw questionnaire sums, not
    quantified values). Returns (ids, X) with X an n x 5 float array in
    the header's column order.
    """
    with open(source, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = [c.strip() for c in next(reader)]
        expected = ["id"] + RAW_SCORE_COLUMNS
        if header != expected:
            raise ValueError(
                f"raw score file must have columns {expected}, got {header}")
        ids = []
        rows = []
        for rec in reader:
            if not rec:
                continue
            ids.append(rec[0])
            rows.append([float(v) for v in rec[1:]])
    if not rows:
        raise ValueError("raw score file has no data rows")
    return ids, np.asarray(rows, dtype=np.float64)
