"""Domain types, matrix utilities, dataset manifests and file IO.

Connectivity matrices travel as plain CSV (one row per line, comma-separated
decimals); a dataset manifest is a CSV with header ``subject_id,path,label``
whose relative paths resolve against the manifest's own directory.
"""

import csv
import hashlib
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError

logger = logging.getLogger(__name__)

ASYMMETRY_TOL = 1e-12
MANIFEST_HEADER = ("subject_id", "path", "label")
CSV_FLOAT_FMT = "%.17g"  # round-trips float64 exactly


@dataclass(frozen=True)
class Connectome:
    """Symmetric nonnegative weighted adjacency matrix with zero diagonal."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"weights must be square, got shape {w.shape}")
        if w.shape[0] < 3:
            raise ValueError(f"need at least 3 nodes, got {w.shape[0]}")
        if not np.isfinite(w).all():
            raise ValueError("weights contain non-finite entries")
        if np.abs(w - w.T).max() > ASYMMETRY_TOL:
            raise ValueError("weights are not symmetric")
        if np.diagonal(w).any():
            raise ValueError("diagonal must be zero")
        if (w < 0).any():
            raise ValueError("weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def r(self):
        """Number of nodes (ROIs)."""
        return self.weights.shape[0]


@dataclass(frozen=True)
class Population:
    """Ordered set of same-size connectomes sharing one class label."""

    subjects: tuple
    class_label: str
    subject_ids: tuple

    def __post_init__(self):
        subjects = tuple(self.subjects)
        ids = tuple(self.subject_ids)
        if not subjects:
            raise ValueError("population must contain at least one subject")
        if len(ids) != len(subjects):
            raise ValueError("subject_ids and subjects must have equal length")
        if len(set(ids)) != len(ids):
            raise ValueError("subject_ids must be unique")
        r = subjects[0].r
        if any(s.r != r for s in subjects):
            raise ValueError("all subjects must share the same node count")
        object.__setattr__(self, "subjects", subjects)
        object.__setattr__(self, "subject_ids", ids)

    def __len__(self):
        return len(self.subjects)

    @property
    def r(self):
        return self.subjects[0].r


@dataclass(frozen=True)
class DatasetManifest:
    """List of (subject_id, path, label) rows describing a dataset on disk."""

    entries: tuple  # of (subject_id, path, label)
    format_version: str = "1"

    def labels(self):
        """Distinct class labels in first-appearance order."""
        seen = []
        for _, _, label in self.entries:
            if label not in seen:
                seen.append(label)
        return seen


def load_connectome(path):
    """Read an r x r CSV matrix and repair it into a valid Connectome.

    The matrix is symmetrized as (M + M^T)/2, negative entries are replaced
    by their absolute value, and the diagonal is forced to zero.  Asymmetry
    beyond 1e-12 is repaired silently but logged.
    """
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise DataFormatError(f"{path}:{line_no}: non-numeric token") from exc
    if not rows:
        raise DataFormatError(f"{path}: empty matrix file")
    r = len(rows)
    if any(len(row) != r for row in rows):
        raise DataFormatError(f"{path}: matrix is not square ({r} rows)")
    if r < 3:
        raise DataFormatError(f"{path}: need at least 3 nodes, got {r}")
    m = np.array(rows, dtype=np.float64)
    if not np.isfinite(m).all():
        raise DataFormatError(f"{path}: non-finite entry")
    asym = np.abs(m - m.T).max()
    if asym > ASYMMETRY_TOL:
        logger.warning("repairing asymmetry %.3e in %s via (M+M^T)/2", asym, path)
    m = (m + m.T) / 2.0
    m = np.abs(m)
    np.fill_diagonal(m, 0.0)
    return Connectome(m)


def save_connectome(c, path):
    """Write Connectome weights as CSV; load_connectome round-trips exactly."""
    np.savetxt(path, c.weights, delimiter=",", fmt=CSV_FLOAT_FMT)


def vectorize(c):
    """Upper off-diagonal triangular part in row-major (k < l) order."""
    r = c.r
    iu = np.triu_indices(r, k=1)
    return c.weights[iu].copy()


def devectorize(values, r=None):
    """Inverse of vectorize: rebuild the symmetric zero-diagonal matrix."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1:
        raise ValueError("values must be a flat vector")
    if r is None:
        r = int(round((1 + math.sqrt(1 + 8 * values.size)) / 2))
    if r * (r - 1) // 2 != values.size:
        raise ValueError(f"vector of length {values.size} is not a triangular number")
    m = np.zeros((r, r), dtype=np.float64)
    iu = np.triu_indices(r, k=1)
    m[iu] = values
    m += m.T
    return Connectome(m)


def stack_features(p):
    """N x r(r-1)/2 feature matrix; row i is vectorize(subject i)."""
    if len(p) == 0:
        raise ValueError("population is empty")
    return np.vstack([vectorize(s) for s in p.subjects])


def load_manifest(path):
    """Parse a manifest CSV; relative paths resolve against the manifest dir."""
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != MANIFEST_HEADER:
            raise DataFormatError(
                f"{path}: expected header {','.join(MANIFEST_HEADER)}"
            )
        for row in reader:
            if not row:
                continue
            if len(row) != 3:
                raise DataFormatError(f"{path}: malformed row {row!r}")
            sid, mpath, label = (tok.strip() for tok in row)
            if not os.path.isabs(mpath):
                mpath = os.path.join(base, mpath)
            if not os.path.exists(mpath):
                raise DataFormatError(f"{path}: missing matrix file {mpath}")
            entries.append((sid, mpath, label))
    if not entries:
        raise DataFormatError(f"{path}: manifest has no entries")
    ids = [e[0] for e in entries]
    if len(set(ids)) != len(ids):
        raise DataFormatError(f"{path}: duplicate subject ids")
    return DatasetManifest(entries=tuple(entries))


def save_manifest(manifest, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_HEADER)
        for row in manifest.entries:
            writer.writerow(row)


def load_population(manifest, label):
    """Load every manifest entry carrying `label`, in manifest order."""
    subjects, ids = [], []
    for sid, path, row_label in manifest.entries:
        if row_label == label:
            subjects.append(load_connectome(path))
            ids.append(sid)
    if not subjects:
        raise DataFormatError(f"no subjects with label {label!r} in manifest")
    return Population(tuple(subjects), label, tuple(ids))


def load_populations(manifest):
    """Load the two-class dataset, populations ordered by sorted label."""
    labels = sorted(set(manifest.labels()))
    if len(labels) != 2:
        raise DataFormatError(
            f"full pipeline needs exactly two classes, got {labels}"
        )
    return tuple(load_population(manifest, label) for label in labels)


def manifest_digest(path):
    """SHA-256 over the manifest bytes and every referenced matrix file."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    manifest = load_manifest(path)
    for _, mpath, _ in manifest.entries:
        with open(mpath, "rb") as fh:
            h.update(fh.read())
    return h.hexdigest()
