"""Deterministic k-means used to split a class into subspaces.

The pipeline only consumes the cluster labels (they become the supervision
targets for the kernel weighting), so the clustering is kept exactly
reproducible: k-means++ seeding driven by one RNG stream, Lloyd iterations to
an assignment fixpoint, ties always resolved toward the lowest index.
"""

from dataclasses import dataclass

import numpy as np

from .errors import TooFewSubjectsError

MAX_LLOYD_ITER = 300


@dataclass(frozen=True)
class ClusterAssignment:
    labels: np.ndarray
    n_c: int
    inertia: float


def _sq_dists(x, centroids):
    # (n, k) squared Euclidean distances
    diff = x[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kmeans_pp_init(x, k, rng):
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]), dtype=np.float64)
    centroids[0] = x[int(rng.integers(n))]
    d2 = ((x - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total > 0:
            # inverse-CDF sampling keeps the choice a function of distance
            # ratios only, so the stream survives uniform rescaling
            u = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), u, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centroids[j] = x[idx]
        d2 = np.minimum(d2, ((x - x[idx]) ** 2).sum(axis=1))
    return centroids


def _lloyd(x, centroids, max_iter=MAX_LLOYD_ITER):
    """Lloyd iterations to an assignment fixpoint; returns inertia history."""
    n, k = x.shape[0], centroids.shape[0]
    prev = None
    history = []
    labels = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = _sq_dists(x, centroids)
        labels = d2.argmin(axis=1)  # ties -> lowest cluster index
        costs = d2[np.arange(n), labels]
        for j in range(k):
            if not (labels == j).any():
                idx = int(np.argmax(costs))  # farthest point reseeds cluster j
                labels[idx] = j
                centroids[j] = x[idx]
                costs[idx] = -1.0
        history.append(float(((x - centroids[labels]) ** 2).sum()))
        if prev is not None and np.array_equal(labels, prev):
            break
        prev = labels
        for j in range(k):
            centroids[j] = x[labels == j].mean(axis=0)
    return labels, centroids, history


def cluster(features, n_c, seed):
    """Partition rows of `features` into n_c clusters, reproducibly.

    Identical (features, n_c, seed) always produce identical labels.
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("features must be a 2-D matrix")
    n = x.shape[0]
    if n_c < 1:
        raise ValueError("n_c must be at least 1")
    if n < n_c:
        raise TooFewSubjectsError(f"{n} subjects cannot form {n_c} clusters")
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(x, n_c, rng)
    labels, centroids, history = _lloyd(x, centroids)
    inertia = float(((x - centroids[labels]) ** 2).sum())
    return ClusterAssignment(labels=labels, n_c=n_c, inertia=inertia)
