"""Supervised kernel weighting of training subjects.

Each subject's fused topology diagonal t_i is embedded as an RBF similarity
profile s_i over the training set; the rank-one Gram s_i s_i^T is that
subject's base kernel.  A margin quadratic program over per-group probability
simplices yields gamma, and the closed form
w_i = gamma^T Y (gram_i / trace_i) Y gamma recovers one nonnegative weight per
subject.  Weights are rescaled to mean one so every kernel mode runs the
diffusion at a comparable scale.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateLabelsError,
    InvalidBandwidthError,
    SingularKernelError,
    VanishingWeightError,
)

GAMMA_TOL = 1e-10
GAMMA_MAX_ITER = 50000
WEIGHT_FLOOR = 1e-12
DEFAULT_LAMBDA = 0.1


@dataclass(frozen=True)
class BaseKernel:
    """Rank-one PSD Gram matrix over training subjects."""

    gram: np.ndarray
    trace: float


@dataclass(frozen=True)
class GammaSolution:
    gamma: np.ndarray
    group_of: np.ndarray  # 0 for the +1 simplex, 1 for the -1 simplex
    objective: float


@dataclass(frozen=True)
class SubjectWeights:
    """Nonnegative per-subject weights, rescaled so their sum is n_tr."""

    w: np.ndarray


@dataclass(frozen=True)
class NormalizationKernel:
    """Diagonal kernel w_i * t_i whose inverse normalizes the raw network."""

    diag: np.ndarray

    def __post_init__(self):
        if (np.asarray(self.diag) < WEIGHT_FLOOR).any():
            raise SingularKernelError("kernel diagonal entry below 1e-12")


def pairwise_sq_dists(t):
    diff = t[:, None, :] - t[None, :, :]
    return np.einsum("abd,abd->ab", diff, diff)


def median_bandwidth(t):
    """Median of the nonzero pairwise distances; 1.0 if all coincide."""
    d = np.sqrt(pairwise_sq_dists(t))
    iu = np.triu_indices(len(t), k=1)
    vals = d[iu]
    vals = vals[vals > 0]
    if vals.size == 0:
        return 1.0
    return float(np.median(vals))


def build_base_kernels(topologies, sigma=None):
    """RBF similarity profiles over topology diagonals, one rank-one kernel each.

    sigma=None selects the median heuristic over nonzero pairwise distances.
    """
    t = np.vstack([np.asarray(a.diag, dtype=np.float64) for a in topologies])
    if len(t) < 2:
        raise ValueError("need at least two subjects to build base kernels")
    if sigma is None:
        sigma = median_bandwidth(t)
    if sigma <= 0:
        raise InvalidBandwidthError(f"sigma must be positive, got {sigma}")
    d2 = pairwise_sq_dists(t)
    s = np.exp(-d2 / (2.0 * sigma * sigma))  # row i = profile of subject i
    kernels = []
    for i in range(len(t)):
        si = s[i]
        kernels.append(BaseKernel(gram=np.outer(si, si), trace=float(si @ si)))
    return kernels


def average_kernel(kernels):
    """K_hat = mean of trace-normalized Grams."""
    n = len(kernels)
    khat = np.zeros_like(kernels[0].gram)
    for k in kernels:
        khat += k.gram / k.trace
    return khat / n


def project_simplex(v):
    """Euclidean projection onto the probability simplex (sort algorithm)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(v) + 1)
    cond = u - css / idx > 0
    rho = idx[cond][-1]
    theta = css[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


def _project_groups(gamma, pos, neg):
    out = gamma.copy()
    out[pos] = project_simplex(gamma[pos])
    out[neg] = project_simplex(gamma[neg])
    return out


def solve_gamma(kernels, labels, lam=DEFAULT_LAMBDA, tol=GAMMA_TOL, max_iter=GAMMA_MAX_ITER):
    """Minimize gamma^T Y K_hat Y gamma + lam*||gamma||^2 over the two simplices.

    Projected gradient with step 1/L, L the gradient Lipschitz constant,
    until the iterate moves less than `tol` in the max norm.
    """
    labels = np.asarray(labels, dtype=np.float64)
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    pos = labels > 0
    neg = labels < 0
    if not pos.any() or not neg.any():
        raise DegenerateLabelsError("both label groups must be nonempty")
    khat = average_kernel(kernels)
    m = (labels[:, None] * labels[None, :]) * khat  # Y K_hat Y
    lip = 2.0 * (float(np.linalg.eigvalsh(m)[-1]) + lam)
    gamma = np.zeros(len(labels))
    gamma[pos] = 1.0 / pos.sum()
    gamma[neg] = 1.0 / neg.sum()
    if lip > 0:
        step = 1.0 / lip
        for _ in range(max_iter):
            grad = 2.0 * (m @ gamma + lam * gamma)
            nxt = _project_groups(gamma - step * grad, pos, neg)
            delta = np.abs(nxt - gamma).max()
            gamma = nxt
            if delta <= tol:
                break
    objective = float(gamma @ m @ gamma + lam * gamma @ gamma)
    group_of = np.where(pos, 0, 1).astype(np.int64)
    return GammaSolution(gamma=gamma, group_of=group_of, objective=objective)


def compute_weights(gamma_sol, kernels, labels):
    """Closed-form recovery: w_i = gamma^T Y (gram_i/trace_i) Y gamma."""
    labels = np.asarray(labels, dtype=np.float64)
    z = labels * gamma_sol.gamma
    w = np.array([float(z @ (k.gram @ z)) / k.trace for k in kernels])
    return np.maximum(w, 0.0)  # PSD quadratic form; clip rounding noise


def learn_subject_weights(topologies, clusters, lam=DEFAULT_LAMBDA, sigma=None):
    """One weight per training subject from its cluster label.

    n_c = 1 keeps all weights at one; n_c = 2 is a single two-group solve;
    n_c > 2 runs one-vs-rest per cluster and averages the recovered weights.
    The final vector is rescaled to sum to n_tr (mean one); a fully symmetric
    instance where every closed-form weight vanishes falls back to uniform.
    """
    n = len(topologies)
    if n < 2:
        raise ValueError("need at least two subjects")
    ids = np.asarray(clusters.labels)
    n_c = clusters.n_c
    if n_c == 1:
        return SubjectWeights(w=np.ones(n))
    kernels = build_base_kernels(topologies, sigma=sigma)
    if n_c == 2:
        labels = np.where(ids == 0, 1.0, -1.0)
        sol = solve_gamma(kernels, labels, lam=lam)
        w = compute_weights(sol, kernels, labels)
    else:
        rounds = []
        for j in range(n_c):
            labels = np.where(ids == j, 1.0, -1.0)
            sol = solve_gamma(kernels, labels, lam=lam)
            rounds.append(compute_weights(sol, kernels, labels))
        w = np.mean(rounds, axis=0)
    total = w.sum()
    if total <= WEIGHT_FLOOR:
        w = np.ones(n)
    else:
        w = w * (n / total)
    return SubjectWeights(w=w)


def normalization_kernel(w_i, topology):
    """Scale the subject's topology diagonal by its learned weight."""
    if w_i <= WEIGHT_FLOOR:
        raise VanishingWeightError(f"weight {w_i:g} would blow up the kernel inverse")
    return NormalizationKernel(diag=w_i * np.asarray(topology.diag, dtype=np.float64))
