"""Status matrices, KNN local kernels, cross-diffusion and atlas fusion.

Each subject's network is globally normalized by the inverse of its diagonal
normalization kernel (status matrix P, diagonal pinned at 1/2) and locally
sparsified into a row-stochastic KNN kernel Q.  The population then runs
n_star synchronous rounds of

    P_i  <-  sym( Q_i @ (mean of the other P_j) @ Q_i^T )

and the atlas is the entrywise mean of the diffused status matrices.  Updates
are Jacobi-style: every round reads only the previous round's values, so the
result is equivariant under subject reordering and independent of how many
worker threads split the per-subject work.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .clustering import cluster
from .core import CSV_FLOAT_FMT, stack_features
from .errors import DegenerateNodeError, PopulationTooSmallError, SingularKernelError
from .mkl import NormalizationKernel, learn_subject_weights, normalization_kernel
from .topology import avg_topology, closeness_centrality, eigenvector_centrality, strength

logger = logging.getLogger(__name__)

MODE_MULTI = "multi"
MODE_DEGREE = "degree"
MODE_CLOSENESS = "closeness"
MODE_EIGENVECTOR = "eigenvector"
KERNEL_MODES = (MODE_MULTI, MODE_DEGREE, MODE_CLOSENESS, MODE_EIGENVECTOR)

DEFAULT_N_STAR = 20
DEFAULT_Q_NN = 25
DEFAULT_N_CLUSTERS = 3


@dataclass(frozen=True)
class AtlasParams:
    """Pipeline tunables with the published defaults."""

    n_star: int = DEFAULT_N_STAR
    q_nn: int = DEFAULT_Q_NN
    n_c: int = DEFAULT_N_CLUSTERS
    lam: float = 0.1
    sigma: float = None  # None = median heuristic
    seed: int = 0

    def as_dict(self):
        return {
            "n_star": self.n_star,
            "q_nn": self.q_nn,
            "n_c": self.n_c,
            "lambda": self.lam,
            "sigma": self.sigma,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class StatusMatrix:
    p: np.ndarray


@dataclass(frozen=True)
class LocalKernel:
    q: np.ndarray
    neighbors: np.ndarray  # (r, q_nn) indices, strongest first


@dataclass(frozen=True)
class Atlas:
    a: np.ndarray
    class_label: str
    kernel_mode: str
    iterations: int


def status_matrix(x, kernel):
    """P(k,l) = X(k,l) / (2 * kernel_diag(k)) off-diagonal, 1/2 on it."""
    diag = np.asarray(kernel.diag, dtype=np.float64)
    if (diag <= 0).any():
        raise SingularKernelError("kernel diagonal must be strictly positive")
    p = x.weights / (2.0 * diag[:, None])
    np.fill_diagonal(p, 0.5)
    return StatusMatrix(p=p)


def local_kernel(x, q_nn):
    """Row-normalized similarity to the q_nn strongest neighbors of each node.

    Ties break toward the smaller index; the node itself is excluded.  A row
    whose selected neighbors all have zero weight stays all-zero.
    """
    r = x.r
    if not 1 <= q_nn <= r - 1:
        raise ValueError(f"q_nn must be in [1, {r - 1}], got {q_nn}")
    w = x.weights
    q = np.zeros_like(w)
    neighbors = np.empty((r, q_nn), dtype=np.int64)
    for k in range(r):
        row = w[k].copy()
        row[k] = -np.inf  # self never a neighbor
        order = np.argsort(-row, kind="stable")  # descending, ties by index
        nbr = order[:q_nn]
        neighbors[k] = nbr
        total = w[k, nbr].sum()
        if total > 0:
            q[k, nbr] = w[k, nbr] / total
    return LocalKernel(q=q, neighbors=neighbors)


def _run_rounds(p_stack, q_stack, n_star, threads=1):
    n = p_stack.shape[0]
    cur = p_stack.copy()
    nxt = np.empty_like(cur)
    for round_no in range(n_star):
        s = cur.sum(axis=0)
        if threads <= 1:
            _backend.diffusion_round(cur, q_stack, s, nxt, 0, n)
        else:
            bounds = np.linspace(0, n, threads + 1).astype(int)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(_backend.diffusion_round, cur, q_stack, s, nxt, lo, hi)
                    for lo, hi in zip(bounds[:-1], bounds[1:])
                    if hi > lo
                ]
                for f in futures:
                    f.result()
        cur, nxt = nxt, cur
        if logger.isEnabledFor(logging.DEBUG):
            norm = float(np.sqrt((cur**2).sum(axis=(1, 2))).mean())
            logger.debug("round %d: mean Frobenius norm of P = %.6g", round_no + 1, norm)
    return cur


def cross_diffuse(status, local, n_star, threads=1):
    """n_star synchronous diffusion rounds; each P is re-symmetrized per round."""
    n = len(status)
    if n < 2:
        raise PopulationTooSmallError("cross-diffusion needs at least two subjects")
    if len(local) != n:
        raise ValueError("status and local kernel lists must align")
    if n_star < 0:
        raise ValueError("n_star must be nonnegative")
    p_stack = np.ascontiguousarray(np.stack([s.p for s in status]))
    if n_star == 0:
        return [StatusMatrix(p=p_stack[i].copy()) for i in range(n)]
    q_stack = np.ascontiguousarray(np.stack([l.q for l in local]))
    out = _run_rounds(p_stack, q_stack, n_star, threads=threads)
    return [StatusMatrix(p=out[i].copy()) for i in range(n)]


def fuse(status):
    """Entrywise mean of the diffused status matrices."""
    if not status:
        raise ValueError("cannot fuse an empty list")
    return np.mean([s.p for s in status], axis=0)


def _parallel_map(fn, items, threads):
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _single_mode_kernel(c, mode):
    """Ablation kernel: one max-normalized centrality, unit subject weight."""
    if mode == MODE_DEGREE:
        v = strength(c)
    elif mode == MODE_CLOSENESS:
        v = closeness_centrality(c)
    elif mode == MODE_EIGENVECTOR:
        v = eigenvector_centrality(c)
    else:
        raise ValueError(f"unknown kernel mode {mode!r}")
    m = v.max()
    if m <= 0:
        raise DegenerateNodeError(int(np.argmax(v <= 0)), f"{mode} centrality is identically zero")
    return NormalizationKernel(diag=v / m)


def estimate_atlas(population, mode, params=None, threads=1):
    """Run the full per-class pipeline and fuse the population atlas.

    `multi` mode clusters the subjects, learns supervised subject weights and
    normalizes each network by its weighted average topology; the ablation
    modes (`degree`, `closeness`, `eigenvector`) set all weights to one and
    normalize by the single named centrality.
    """
    if params is None:
        params = AtlasParams()
    if mode not in KERNEL_MODES:
        raise ValueError(f"mode must be one of {KERNEL_MODES}, got {mode!r}")
    n = len(population)
    if n < 2:
        raise PopulationTooSmallError("atlas estimation needs at least two subjects")
    subjects = population.subjects
    if mode == MODE_MULTI:
        assign = cluster(stack_features(population), params.n_c, params.seed)
        topologies = _parallel_map(avg_topology, subjects, threads)
        weights = learn_subject_weights(topologies, assign, lam=params.lam, sigma=params.sigma)
        kernels = [normalization_kernel(weights.w[i], topologies[i]) for i in range(n)]
    else:
        kernels = _parallel_map(lambda c: _single_mode_kernel(c, mode), subjects, threads)
    status = [status_matrix(subjects[i], kernels[i]) for i in range(n)]
    local = _parallel_map(lambda c: local_kernel(c, params.q_nn), subjects, threads)
    diffused = cross_diffuse(status, local, params.n_star, threads=threads)
    a = fuse(diffused)
    # rounds symmetrize every P, so this is a no-op for n_star >= 1; with zero
    # rounds the raw status matrices are row-scaled and need it
    a = (a + a.T) / 2.0
    return Atlas(a=a, class_label=population.class_label, kernel_mode=mode, iterations=params.n_star)


def save_atlas(atlas, params, csv_path, manifest_digest=None):
    """Write the atlas matrix as CSV plus a JSON sidecar with provenance."""
    csv_path = Path(csv_path)
    np.savetxt(csv_path, atlas.a, fmt=CSV_FLOAT_FMT, delimiter=",")
    sidecar = {
        "class_label": atlas.class_label,
        "kernel_mode": atlas.kernel_mode,
        "iterations": atlas.iterations,
        "r": int(atlas.a.shape[0]),
        "params": params.as_dict(),
        "manifest_digest": manifest_digest,
    }
    side_path = csv_path.with_suffix(".json")
    side_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return side_path


def load_atlas(csv_path):
    """Read an atlas CSV and its JSON sidecar back into an Atlas."""
    csv_path = Path(csv_path)
    a = np.loadtxt(csv_path, delimiter=",", dtype=np.float64, ndmin=2)
    meta = json.loads(csv_path.with_suffix(".json").read_text())
    return Atlas(
        a=a,
        class_label=meta["class_label"],
        kernel_mode=meta["kernel_mode"],
        iterations=meta["iterations"],
    )
