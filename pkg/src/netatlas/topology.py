"""Per-node centrality profiles and the fused average topological matrix.

Three centralities characterize each node: weighted degree (strength, local),
eigenvector centrality (global influence) and closeness centrality (inverse
mean shortest-path length).  Each vector is divided by its own maximum before
averaging, so the three incommensurate scales contribute equally.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ConvergenceError, DegenerateGraphError, DegenerateNodeError

POWER_TOL = 1e-10
POWER_MAX_ITER = 10000
DIAG_FLOOR = 1e-12


@dataclass(frozen=True)
class CentralityProfile:
    """Raw (un-normalized) centrality vectors of one connectome."""

    degree: np.ndarray
    eigenvector: np.ndarray
    closeness: np.ndarray


@dataclass(frozen=True)
class TopoTensor:
    """Max-normalized centrality vectors, one frontal view per measure."""

    degree: np.ndarray
    eigenvector: np.ndarray
    closeness: np.ndarray

    @property
    def views(self):
        """The three r x r diagonal matrices."""
        return (np.diag(self.degree), np.diag(self.eigenvector), np.diag(self.closeness))


@dataclass(frozen=True)
class AvgTopologyMatrix:
    """Diagonal of the fused average topological matrix; strictly positive."""

    diag: np.ndarray


def strength(c):
    """Weighted degree: out(n) = sum of edge weights incident to n."""
    return c.weights.sum(axis=1)


def eigenvector_centrality(c, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Unit-norm nonnegative dominant eigenvector of the weight matrix.

    Power iteration from the uniform vector, run on A + sigma*I with
    sigma = max strength: the shift leaves eigenvectors untouched but keeps
    the iteration from oscillating on bipartite-like spectra where
    -lambda_1 ties lambda_1.  Terminates when ||A x - lam x||_2 <= tol*lam.
    """
    a = c.weights
    r = c.r
    if not (a > 0).any():
        raise DegenerateGraphError("all-zero graph has no dominant eigenvector")
    sigma = a.sum(axis=1).max()
    x = np.full(r, 1.0 / np.sqrt(r))
    y = a @ x + sigma * x
    for _ in range(max_iter):
        x = y / np.linalg.norm(y)
        y = a @ x + sigma * x
        lam = x @ y - sigma
        resid = np.linalg.norm(y - (lam + sigma) * x)
        if resid <= tol * lam:
            return x
    raise ConvergenceError(
        f"power iteration did not reach tol={tol:g} in {max_iter} iterations"
    )


def closeness_centrality(c):
    """(r-1) / (sum of shortest-path lengths), edge length 1/weight.

    A node disconnected from any other node gets closeness 0.
    """
    lengths = _backend.shortest_path_lengths(np.ascontiguousarray(c.weights))
    r = c.r
    off = lengths.copy()
    np.fill_diagonal(off, 0.0)
    sums = off.sum(axis=1)  # inf when any node is unreachable -> closeness 0
    return np.where(np.isfinite(sums) & (sums > 0), (r - 1) / np.where(sums > 0, sums, 1.0), 0.0)


def centrality_profile(c, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    if not (c.weights > 0).any():
        raise DegenerateNodeError(0, "all-zero graph: every centrality vanishes")
    return CentralityProfile(
        degree=strength(c),
        eigenvector=eigenvector_centrality(c, tol=tol, max_iter=max_iter),
        closeness=closeness_centrality(c),
    )


def _max_normalize(v, name):
    m = v.max()
    if m <= 0:
        k = int(np.argmax(v <= 0))
        raise DegenerateNodeError(k, f"{name} centrality is identically zero")
    return v / m


def topo_tensor(c):
    """Stack the three max-normalized centrality vectors as frontal views."""
    prof = centrality_profile(c)
    return TopoTensor(
        degree=_max_normalize(prof.degree, "degree"),
        eigenvector=_max_normalize(prof.eigenvector, "eigenvector"),
        closeness=_max_normalize(prof.closeness, "closeness"),
    )


def avg_topology(c):
    """Fuse the tensor views into the average topological matrix.

    diag = mean of the three max-normalized centrality vectors; every entry
    must stay above 1e-12 so the downstream kernel inverse is well defined.
    """
    t = topo_tensor(c)
    diag = (t.degree + t.eigenvector + t.closeness) / 3.0
    bad = np.flatnonzero(diag <= DIAG_FLOOR)
    if bad.size:
        raise DegenerateNodeError(int(bad[0]))
    return AvgTopologyMatrix(diag=diag)
