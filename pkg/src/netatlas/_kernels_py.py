"""numpy/scipy implementations of the hot kernels.

Signature-compatible with the compiled module netatlas._kernels; selected by
netatlas._backend when the extension is unavailable (or forced via
NETATLAS_PURE_PYTHON=1).
"""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

COMPILED = False


def diffusion_round(p, q, s, out, lo, hi):
    """One synchronous cross-diffusion update for subjects lo..hi.

    p, q, out: (N, r, r) C-contiguous float64 stacks; s = p.sum(axis=0)
    precomputed by the caller.  out[i] = sym(q[i] @ ((s - p[i])/(N-1)) @ q[i].T).
    """
    n = p.shape[0]
    for i in range(lo, hi):
        m = (s - p[i]) / (n - 1)
        t = q[i] @ m @ q[i].T
        out[i] = (t + t.T) / 2.0


def shortest_path_lengths(w):
    """All-pairs shortest path lengths with edge length 1/weight.

    Zero weights are absent edges; unreachable pairs come back as inf.
    """
    w = np.asarray(w, dtype=np.float64)
    lengths = np.zeros_like(w)
    mask = w > 0
    lengths[mask] = 1.0 / w[mask]
    return dijkstra(csr_matrix(lengths), directed=False)
