"""Dataset generators, compositional ingestion, and delimited point IO.

Point CSV format: header x0,...,xp (plus an optional trailing label column),
one unit vector per row, UTF-8 with LF line endings. Floats are written with
repr (shortest round-trip), so write-then-read reproduces coordinates
exactly.

Compositional CSV format: named non-negative category columns plus a label
column. Rows are l1-normalized and mapped to the sphere by elementwise
square root, e.g. (1, 1, 2) -> (1/2, 1/2, 1/sqrt(2)).
"""

import csv
from dataclasses import dataclass

import numpy as np

from .density import SLParams
from .sampling import sample_radial_oracle, sample_sn_proposal
from .sphere import unit_vector

# The two-component circle benchmark: spherical normal components with
# locations and concentrations fixed by the original study design.
SMALL_MIX_MU1 = unit_vector([-0.251, -0.968])
SMALL_MIX_LAM1 = 10.0
SMALL_MIX_MU2 = unit_vector([0.399, 0.917])
SMALL_MIX_LAM2 = 2.0

# Synthetic household stand-in: per-group scales match the fitted values on
# the real survey data; the locations are hand-picked inside the positive
# octant of S^2 with geodesic separation near 1.07.
HOUSEHOLD_MU_FEMALE = unit_vector([0.92, 0.20, 0.33])
HOUSEHOLD_MU_MALE = unit_vector([0.20, 0.92, 0.33])
HOUSEHOLD_SIGMA_FEMALE = 0.0643
HOUSEHOLD_SIGMA_MALE = 0.1426
HOUSEHOLD_CATEGORIES = ("food", "housing", "service")


def sample_small_mix(rng: np.random.Generator, n_total: int = 200, multinomial: bool = False):
    """Two-component spherical normal sample on the circle.

    Returns (points (n_total, 2), labels (n_total,)). Class sizes are an even
    split by default; multinomial=True draws them from Multinomial(n_total,
    [1/2, 1/2]) instead.
    """
    if n_total < 2:
        raise ValueError(f"n_total must be >= 2, got {n_total}")
    if multinomial:
        n1 = int(rng.binomial(n_total, 0.5))
    else:
        n1 = n_total // 2
    n2 = n_total - n1
    parts, labels = [], []
    if n1:
        parts.append(sample_sn_proposal(SMALL_MIX_MU1, SMALL_MIX_LAM1, n1, rng))
        labels.append(np.zeros(n1, dtype=int))
    if n2:
        parts.append(sample_sn_proposal(SMALL_MIX_MU2, SMALL_MIX_LAM2, n2, rng))
        labels.append(np.ones(n2, dtype=int))
    return np.concatenate(parts), np.concatenate(labels)


def sample_household_standin(rng: np.random.Generator, n_per_group: int = 20):
    """Synthetic two-group compositional dataset mimicking the survey layout.

    Draws spherical Laplace blobs per group, then converts to compositions by
    squaring coordinates (the l1 + sqrt ingestion maps them back to |x|).
    Returns (compositions (N, 3), genders list).
    """
    if n_per_group < 1:
        raise ValueError(f"n_per_group must be >= 1, got {n_per_group}")
    female = sample_radial_oracle(
        SLParams(HOUSEHOLD_MU_FEMALE, HOUSEHOLD_SIGMA_FEMALE), n_per_group, rng
    )
    male = sample_radial_oracle(
        SLParams(HOUSEHOLD_MU_MALE, HOUSEHOLD_SIGMA_MALE), n_per_group, rng
    )
    points = np.concatenate([female, male])
    genders = ["female"] * n_per_group + ["male"] * n_per_group
    return points**2, genders


def compositional_to_sphere(values: np.ndarray) -> np.ndarray:
    """l1-normalize non-negative rows and take elementwise square roots."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError(f"expected a 2-D array of compositions, got shape {values.shape}")
    if np.any(values < 0.0):
        raise ValueError("compositional values must be non-negative")
    totals = values.sum(axis=1)
    zero = np.flatnonzero(totals <= 0.0)
    if zero.size:
        raise ValueError(f"row {zero[0]} has zero total and cannot be normalized")
    return np.sqrt(values / totals[:, None])


def write_points_csv(path, points: np.ndarray, labels=None):
    """Write unit vectors (and optional labels) in the point CSV format."""
    points = np.asarray(points, dtype=float)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        header = [f"x{i}" for i in range(points.shape[1])]
        if labels is not None:
            header.append("label")
        writer.writerow(header)
        for i, row in enumerate(points):
            out = [repr(float(v)) for v in row]
            if labels is not None:
                out.append(str(labels[i]))
            writer.writerow(out)


def read_points_csv(path):
    """Read the point CSV format. Returns (points, labels or None).

    Coordinates are returned exactly as stored; rows more than 1e-6 away from
    unit norm raise ValueError naming the offending row.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise ValueError(f"{path}: empty file")
        has_label = header[-1] == "label"
        ncoord = len(header) - (1 if has_label else 0)
        expected = [f"x{i}" for i in range(ncoord)]
        if header[:ncoord] != expected or ncoord < 2:
            raise ValueError(f"{path}: expected header x0,...,xp(,label), got {header}")
        rows, labels = [], []
        for ln, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ValueError(f"{path}: line {ln}: expected {len(header)} fields, got {len(rec)}")
            try:
                coords = [float(v) for v in rec[:ncoord]]
            except ValueError as exc:
                raise ValueError(f"{path}: line {ln}: {exc}") from None
            rows.append(coords)
            if has_label:
                labels.append(rec[-1])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    points = np.array(rows, dtype=float)
    norms = np.linalg.norm(points, axis=1)
    off = np.flatnonzero(np.abs(norms - 1.0) > 1e-6)
    if off.size:
        raise ValueError(
            f"{path}: line {off[0] + 2}: norm {norms[off[0]]:.8f} is not within 1e-6 of 1"
        )
    return points, (labels if has_label else None)


def write_compositional_csv(path, values: np.ndarray, labels, categories=HOUSEHOLD_CATEGORIES,
                            label_column: str = "gender"):
    """Write a compositional CSV with named category columns plus a label."""
    values = np.asarray(values, dtype=float)
    if values.shape[1] != len(categories):
        raise ValueError(f"{values.shape[1]} columns but {len(categories)} category names")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(categories) + [label_column])
        for row, lab in zip(values, labels):
            writer.writerow([repr(float(v)) for v in row] + [str(lab)])


def read_compositional_csv(path, categories=HOUSEHOLD_CATEGORIES, label_column: str = "gender"):
    """Read named category columns plus a label column.

    Returns (values (N, len(categories)), labels). Missing columns raise
    ValueError listing the columns the file does provide.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValueError(f"{path}: empty file")
        missing = [c for c in list(categories) + [label_column] if c not in reader.fieldnames]
        if missing:
            raise ValueError(
                f"{path}: missing columns {missing}; file provides {list(reader.fieldnames)}"
            )
        values, labels = [], []
        for ln, rec in enumerate(reader, start=2):
            try:
                values.append([float(rec[c]) for c in categories])
            except (TypeError, ValueError):
                raise ValueError(f"{path}: line {ln}: non-numeric category value") from None
            labels.append(rec[label_column])
    if not values:
        raise ValueError(f"{path}: no data rows")
    return np.array(values, dtype=float), labels
