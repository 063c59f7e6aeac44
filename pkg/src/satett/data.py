"""Observed-data model: dataset container, CSV ingestion, validation.

A `TrialDataset` row is (y, a, s, v, xtilde): outcome, treatment arm,
source indicator (1 = target trial), discrete subgroup code, and the
remaining covariates.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from satett.errors import (
    DomainError,
    EmptyInputError,
    NotFoundError,
    SchemaError,
)

SIDECAR_KEYS = ("outcome", "treatment", "source", "subgroup", "covariates")


@dataclass(frozen=True)
class TrialDataset:
    """Immutable table of trial + external observations.

    All arrays have length n. `a` and `s` are 0/1 integer arrays, `v` is
    an integer subgroup code, `xtilde` is the n-by-p covariate matrix.
    """

    y: np.ndarray
    a: np.ndarray
    s: np.ndarray
    v: np.ndarray
    xtilde: np.ndarray
    covariate_names: tuple = ()

    def __post_init__(self):
        for arr in (self.y, self.a, self.s, self.v, self.xtilde):
            arr.setflags(write=False)

    @property
    def n(self):
        return self.y.shape[0]

    @property
    def p(self):
        return self.xtilde.shape[1]


@dataclass(frozen=True)
class SubgroupTarget:
    """A pre-planned subgroup: integer code plus display label."""

    v: int
    label: str = ""


@dataclass(frozen=True)
class PositivityDiagnostics:
    """Summary of fitted treatment probabilities among external units."""

    min_pi: float
    max_ratio: float
    pi: np.ndarray = field(repr=False, default=None)

    def count_below(self, threshold):
        if self.pi is None:
            return 0
        return int(np.sum(self.pi < threshold))


def make_dataset(y, a, s, v, xtilde, covariate_names=()):
    """Build a TrialDataset from array-likes, checking the invariants."""
    y = np.asarray(y, dtype=float)
    a = np.asarray(a)
    s = np.asarray(s)
    v = np.asarray(v)
    xtilde = np.asarray(xtilde, dtype=float)
    if xtilde.ndim == 1:
        xtilde = xtilde.reshape(-1, 1)
    n = y.shape[0]
    if n == 0:
        raise EmptyInputError("dataset has no rows")
    for name, arr in (("a", a), ("s", s), ("v", v), ("xtilde", xtilde)):
        if arr.shape[0] != n:
            raise DomainError(f"column {name} has length {arr.shape[0]}, expected {n}")
    for name, arr in (("a", a), ("s", s)):
        bad = np.where(~np.isin(arr, (0, 1)))[0]
        if bad.size:
            raise DomainError(f"column {name} must be 0/1; violated at row {bad[0]}")
    ds = TrialDataset(
        y=y,
        a=a.astype(np.int64),
        s=s.astype(np.int64),
        v=np.asarray(v).astype(np.int64),
        xtilde=xtilde,
        covariate_names=tuple(covariate_names),
    )
    return ds


def load_csv(path, schema):
    """Read a trial CSV using a sidecar column mapping.

    `schema` maps the keys outcome/treatment/source/subgroup to column
    names and `covariates` to a list of column names.
    """
    for key in SIDECAR_KEYS:
        if key not in schema:
            raise SchemaError(f"sidecar config missing key '{key}'")
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse_csv(fh, schema)


def _parse_csv(fh, schema):
    reader = csv.DictReader(fh)
    if reader.fieldnames is None:
        raise EmptyInputError("CSV file is empty")
    needed = [schema["outcome"], schema["treatment"], schema["source"], schema["subgroup"]]
    needed += list(schema["covariates"])
    for col in needed:
        if col not in reader.fieldnames:
            raise SchemaError(f"CSV is missing mapped column '{col}'")
    rows = list(reader)
    if not rows:
        raise EmptyInputError("CSV contains a header but no data rows")

    def parse(col, row_idx, row, as_int=False):
        raw = row[col]
        try:
            val = float(raw)
        except (TypeError, ValueError):
            raise DomainError(f"column '{col}' row {row_idx}: cannot parse '{raw}'")
        if as_int:
            if val != int(val):
                raise DomainError(f"column '{col}' row {row_idx}: expected integer, got {raw}")
            return int(val)
        return val

    y, a, s, v, xt = [], [], [], [], []
    for i, row in enumerate(rows):
        y.append(parse(schema["outcome"], i, row))
        ai = parse(schema["treatment"], i, row, as_int=True)
        si = parse(schema["source"], i, row, as_int=True)
        if ai not in (0, 1):
            raise DomainError(f"treatment must be 0/1; row {i} has {ai}")
        if si not in (0, 1):
            raise DomainError(f"source must be 0/1; row {i} has {si}")
        a.append(ai)
        s.append(si)
        v.append(parse(schema["subgroup"], i, row, as_int=True))
        xt.append([parse(c, i, row) for c in schema["covariates"]])
    return make_dataset(y, a, s, v, xt, covariate_names=schema["covariates"])


def write_csv(data, path, schema):
    """Inverse of load_csv: write the dataset with 17 significant digits."""
    cols = [schema["outcome"], schema["treatment"], schema["source"], schema["subgroup"]]
    cols += list(schema["covariates"])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for i in range(data.n):
        row = [
            np.format_float_scientific(data.y[i], precision=16),
            int(data.a[i]),
            int(data.s[i]),
            int(data.v[i]),
        ]
        row += [np.format_float_scientific(x, precision=16) for x in data.xtilde[i]]
        writer.writerow(row)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())


def validate(data):
    """Check the testable dataset invariants; returns a list of violations.

    Violations are plain strings naming the invariant and the offending
    rows or cells. Untestable exchangeability assumptions are not checked.
    """
    violations = []
    bad = np.where(~np.isfinite(data.y))[0]
    if bad.size:
        violations.append(f"non-finite values in y at rows {bad.tolist()}")
    bad = np.where(~np.isfinite(data.xtilde).all(axis=1))[0]
    if bad.size:
        violations.append(f"non-finite values in xtilde at rows {bad.tolist()}")
    for name, arr in (("a", data.a), ("s", data.s)):
        bad = np.where(~np.isin(arr, (0, 1)))[0]
        if bad.size:
            violations.append(f"{name} not in {{0,1}} at rows {bad.tolist()}")
    trial = data.s == 1
    for vv in np.unique(data.v[trial]):
        for arm in (0, 1):
            if not np.any(trial & (data.v == vv) & (data.a == arm)):
                violations.append(
                    f"empty trial cell (a={arm}, v={vv}, s=1): subgroup {vv} lacks arm {arm}"
                )
    return violations


def subgroup_masks(data, target):
    """Index sets for {V=v, S=1}, {A=1, V=v}, and {A=0, V=v}."""
    if not np.any(data.v == target.v):
        raise NotFoundError(f"subgroup code {target.v} not present in data")
    in_v = data.v == target.v
    trial_v = np.where(in_v & (data.s == 1))[0]
    treated_v = np.where(in_v & (data.a == 1))[0]
    control_v = np.where(in_v & (data.a == 0))[0]
    return trial_v, treated_v, control_v
