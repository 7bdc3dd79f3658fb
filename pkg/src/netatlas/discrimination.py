"""Atlas differencing, discriminative edge selection, linear max-margin
classification, and the stratified cross-validation harness.

The classifier solves the standard soft-margin problem

    min_{w,b}  (1/2)||w||^2 + c_reg * sum_i max(0, 1 - y_i (w.x_i + b))

in the dual with an unregularized bias, via deterministic pairwise coordinate
descent (working pairs keep sum alpha_i y_i = 0 feasible).  Folds rebuild both
class atlases from training subjects only, so held-out data never touches
edge selection or the trained model.
"""

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import CSV_FLOAT_FMT, Population, load_populations
from .diffusion import MODE_MULTI, AtlasParams, estimate_atlas
from .errors import DegenerateLabelsError, PipelineError, TooFewSubjectsError

logger = logging.getLogger(__name__)

SVM_TOL = 1e-8
SVM_EPOCHS = 1000
DEFAULT_C_REG = 1.0
DEFAULT_N_F = 5


@dataclass(frozen=True)
class ResidualMatrix:
    r_mat: np.ndarray


@dataclass(frozen=True)
class EdgeSelection:
    edges: tuple  # of (k, l) with k < l, strongest first
    scores: np.ndarray
    n_f: int


@dataclass(frozen=True)
class LinearClassifier:
    weights: np.ndarray
    bias: float
    c_reg: float

    def decision(self, features):
        return np.asarray(features, dtype=np.float64) @ self.weights + self.bias

    def predict(self, features):
        """sign(w.x + b) with ties mapped to +1."""
        return np.where(self.decision(features) >= 0.0, 1, -1)


@dataclass(frozen=True)
class FoldResult:
    fold: int
    n_train: int
    n_test: int
    accuracy: float
    sensitivity: float
    specificity: float
    edges: tuple  # of (k, l, score)


@dataclass(frozen=True)
class CvReport:
    folds: tuple
    positive_label: str
    negative_label: str
    n_folds: int
    n_f: int
    seed: int
    mode: str

    def _mean_std(self, attr):
        vals = np.array([getattr(f, attr) for f in self.folds])
        return float(vals.mean()), float(vals.std())

    @property
    def mean_accuracy(self):
        return self._mean_std("accuracy")[0]

    def summary(self):
        out = {}
        for attr in ("accuracy", "sensitivity", "specificity"):
            mean, std = self._mean_std(attr)
            out[f"mean_{attr}"] = mean
            out[f"std_{attr}"] = std
        return out


def residual(a1, a2):
    """Entrywise absolute difference of two same-mode atlases, zero diagonal."""
    if a1.a.shape != a2.a.shape:
        raise ValueError("atlases have different sizes")
    if a1.kernel_mode != a2.kernel_mode:
        raise ValueError(
            f"cannot difference atlases of different modes "
            f"({a1.kernel_mode!r} vs {a2.kernel_mode!r})"
        )
    m = np.abs(a1.a - a2.a)
    np.fill_diagonal(m, 0.0)
    return ResidualMatrix(r_mat=m)


def select_top(r_mat, n_f):
    """Top n_f strictly positive upper-triangular residual edges.

    Sorted by descending score; ties break lexicographically by (k, l).
    May return fewer than n_f edges — callers must check.
    """
    if n_f < 1:
        raise ValueError("n_f must be at least 1")
    m = r_mat.r_mat
    iu, il = np.triu_indices(m.shape[0], k=1)
    vals = m[iu, il]
    keep = vals > 0
    iu, il, vals = iu[keep], il[keep], vals[keep]
    order = np.lexsort((il, iu, -vals))[: int(n_f)]
    edges = tuple((int(k), int(l)) for k, l in zip(iu[order], il[order]))
    return EdgeSelection(edges=edges, scores=vals[order].copy(), n_f=int(n_f))


def extract_features(c, sel):
    """Connectome weights at the selected edges, in selection order."""
    if sel.edges and max(max(k, l) for k, l in sel.edges) >= c.r:
        raise IndexError("edge selection indexes past the connectome size")
    return np.array([c.weights[k, l] for k, l in sel.edges], dtype=np.float64)


def feature_matrix(subjects, sel):
    return np.vstack([extract_features(s, sel) for s in subjects])


def _pair_step(alpha, g, x, y, kdiag, c_reg, i, j):
    """One working-pair update (i from the lower set, j from the upper set).

    Moves alpha along the direction that keeps sum alpha*y = 0; the step is
    the unconstrained minimizer clipped to the box.
    """
    quad = kdiag[i] + kdiag[j] - 2.0 * float(x[i] @ x[j])
    quad = max(quad, 1e-12)
    d = (g[i] - g[j]) / quad
    cap_i = c_reg - alpha[i] if y[i] > 0 else alpha[i]
    cap_j = alpha[j] if y[j] > 0 else c_reg - alpha[j]
    d = min(d, cap_i, cap_j)
    if d <= 0.0:
        return False
    alpha[i] += y[i] * d
    alpha[j] -= y[j] * d
    # land exactly on the box so the working-set membership tests stay exact
    snap = 1e-10 * max(1.0, c_reg)
    for t in (i, j):
        if alpha[t] < snap:
            alpha[t] = 0.0
        elif alpha[t] > c_reg - snap:
            alpha[t] = c_reg
    g -= d * (x @ (x[i] - x[j]))
    return True


def _violation_sets(alpha, y, c_reg):
    lower = ((y > 0) & (alpha < c_reg)) | ((y < 0) & (alpha > 0))
    upper = ((y < 0) & (alpha < c_reg)) | ((y > 0) & (alpha > 0))
    return lower, upper


def train_svm(features, labels, c_reg=DEFAULT_C_REG, epochs=SVM_EPOCHS, seed=0):
    """Fit the linear soft-margin classifier by pairwise dual coordinate descent.

    Each epoch sweeps the training indices in a seeded shuffled order and
    pairs every violating index with the most violating partner; training
    stops when the maximal dual violation drops to 1e-8 or after `epochs`
    sweeps.  Deterministic given (features, labels, seed).
    """
    x = np.ascontiguousarray(np.asarray(features, dtype=np.float64))
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("features must be n x d with one label per row")
    if not ((y > 0).any() and (y < 0).any()):
        raise DegenerateLabelsError("training labels must include both classes")
    if c_reg <= 0:
        raise ValueError("c_reg must be positive")
    n = x.shape[0]
    alpha = np.zeros(n)
    g = y.copy()  # g_t = y_t - v.x_t with v = sum alpha_t y_t x_t
    kdiag = np.einsum("ij,ij->i", x, x)
    rng = np.random.default_rng(seed)

    m_low = m_up = 0.0
    for _ in range(epochs):
        progressed = False
        for t in rng.permutation(n):
            lower, upper = _violation_sets(alpha, y, c_reg)
            best = None
            if lower[t] and upper.any():
                j = int(np.flatnonzero(upper)[np.argmin(g[upper])])
                if g[t] - g[j] > SVM_TOL:
                    best = (g[t] - g[j], t, j)
            if upper[t] and lower.any():
                i = int(np.flatnonzero(lower)[np.argmax(g[lower])])
                if g[i] - g[t] > SVM_TOL and (best is None or g[i] - g[t] > best[0]):
                    best = (g[i] - g[t], i, t)
            if best is not None:
                progressed |= _pair_step(alpha, g, x, y, kdiag, c_reg, best[1], best[2])
        lower, upper = _violation_sets(alpha, y, c_reg)
        m_low = g[lower].max() if lower.any() else -np.inf
        m_up = g[upper].min() if upper.any() else np.inf
        if m_low - m_up <= SVM_TOL or not progressed:
            break

    if not np.isfinite(m_low):
        m_low = m_up
    if not np.isfinite(m_up):
        m_up = m_low
    w = (alpha * y) @ x
    b = 0.5 * (m_low + m_up)
    return LinearClassifier(weights=w, bias=float(b), c_reg=float(c_reg))


def _stratified_folds(n_subjects, n_folds, rng):
    """Shuffle indices and deal them into n_folds blocks of near-equal size."""
    perm = rng.permutation(n_subjects)
    return [np.sort(chunk) for chunk in np.array_split(perm, n_folds)]


def _subset(pop, idx):
    return Population(
        tuple(pop.subjects[i] for i in idx),
        pop.class_label,
        tuple(pop.subject_ids[i] for i in idx),
    )


def run_cv(
    manifest,
    params=None,
    n_folds=5,
    n_f=DEFAULT_N_F,
    seed=0,
    mode=MODE_MULTI,
    c_reg=DEFAULT_C_REG,
    threads=1,
):
    """Stratified k-fold evaluation of the atlas-difference classifier.

    Per fold: estimate both class atlases on the training subjects only,
    select the top n_f residual edges, train the linear classifier on the
    training features and score the held-out subjects.  The positive class is
    the lexicographically first label.
    """
    if n_folds < 2:
        raise ValueError("n_folds must be at least 2")
    if params is None:
        params = AtlasParams(seed=seed)
    pop_pos, pop_neg = load_populations(manifest)
    if len(pop_pos) < n_folds or len(pop_neg) < n_folds:
        raise TooFewSubjectsError(
            f"need at least {n_folds} subjects per class for {n_folds}-fold CV"
        )
    rng = np.random.default_rng(seed)
    # positive class is permuted first; the draw order is part of the contract
    folds_pos = _stratified_folds(len(pop_pos), n_folds, rng)
    folds_neg = _stratified_folds(len(pop_neg), n_folds, rng)

    results = []
    for k in range(n_folds):
        train_pos = _subset(pop_pos, np.setdiff1d(np.arange(len(pop_pos)), folds_pos[k]))
        train_neg = _subset(pop_neg, np.setdiff1d(np.arange(len(pop_neg)), folds_neg[k]))
        test_pos = _subset(pop_pos, folds_pos[k])
        test_neg = _subset(pop_neg, folds_neg[k])

        atlas_pos = estimate_atlas(train_pos, mode, params, threads=threads)
        atlas_neg = estimate_atlas(train_neg, mode, params, threads=threads)
        sel = select_top(residual(atlas_pos, atlas_neg), n_f)
        if not sel.edges:
            raise PipelineError(
                f"fold {k}: class atlases are identical, nothing to select"
            )

        x_train = np.vstack(
            [feature_matrix(train_pos.subjects, sel), feature_matrix(train_neg.subjects, sel)]
        )
        y_train = np.concatenate(
            [np.ones(len(train_pos)), -np.ones(len(train_neg))]
        )
        clf = train_svm(x_train, y_train, c_reg=c_reg, seed=seed + k)

        x_test = np.vstack(
            [feature_matrix(test_pos.subjects, sel), feature_matrix(test_neg.subjects, sel)]
        )
        y_test = np.concatenate([np.ones(len(test_pos)), -np.ones(len(test_neg))])
        pred = clf.predict(x_test)
        tp = int(((pred > 0) & (y_test > 0)).sum())
        tn = int(((pred < 0) & (y_test < 0)).sum())
        results.append(
            FoldResult(
                fold=k,
                n_train=len(train_pos) + len(train_neg),
                n_test=len(y_test),
                accuracy=(tp + tn) / len(y_test),
                sensitivity=tp / len(test_pos),
                specificity=tn / len(test_neg),
                edges=tuple(
                    (k2, l2, float(s)) for (k2, l2), s in zip(sel.edges, sel.scores)
                ),
            )
        )
        logger.info(
            "fold %d: accuracy %.3f (%d selected edges)", k, results[-1].accuracy, len(sel.edges)
        )

    return CvReport(
        folds=tuple(results),
        positive_label=pop_pos.class_label,
        negative_label=pop_neg.class_label,
        n_folds=n_folds,
        n_f=n_f,
        seed=seed,
        mode=mode,
    )


def report_to_dict(report, params=None, manifest_digest=None, c_reg=DEFAULT_C_REG):
    """Plain-type dict form of a CvReport for JSON serialization."""
    return {
        "positive_label": report.positive_label,
        "negative_label": report.negative_label,
        "n_folds": report.n_folds,
        "n_f": report.n_f,
        "seed": report.seed,
        "mode": report.mode,
        "c_reg": c_reg,
        "params": params.as_dict() if params is not None else None,
        "manifest_digest": manifest_digest,
        "summary": report.summary(),
        "folds": [
            {
                "fold": f.fold,
                "n_train": f.n_train,
                "n_test": f.n_test,
                "accuracy": f.accuracy,
                "sensitivity": f.sensitivity,
                "specificity": f.specificity,
                "edges": [[k, l, s] for k, l, s in f.edges],
            }
            for f in report.folds
        ],
    }


def save_report(report, path, params=None, manifest_digest=None, c_reg=DEFAULT_C_REG):
    payload = report_to_dict(
        report, params=params, manifest_digest=manifest_digest, c_reg=c_reg
    )
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def edges_to_csv(report, path):
    """Selected edges per fold as fold,k,l,score rows for visualization."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("fold", "k", "l", "score"))
        for f in report.folds:
            for k, l, s in f.edges:
                writer.writerow((f.fold, k, l, CSV_FLOAT_FMT % s))
