# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: the cross-diffusion round and all-pairs Dijkstra.

Mirrors netatlas._kernels_py; BLAS does the r x r products, the rest is
plain C loops so results are deterministic for a fixed thread count.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

COMPILED = True


cdef void _matmul(double* a, double* b, double* c, int r) noexcept nogil:
    # row-major c = a @ b via Fortran dgemm on the transposed views
    cdef double one = 1.0, zero = 0.0
    cdef char tn = b'N'
    dgemm(&tn, &tn, &r, &r, &r, &one, b, &r, a, &r, &zero, c, &r)


cdef void _matmul_bt(double* a, double* b, double* c, int r) noexcept nogil:
    # row-major c = a @ b.T
    cdef double one = 1.0, zero = 0.0
    cdef char tt = b'T', tn = b'N'
    dgemm(&tt, &tn, &r, &r, &r, &one, b, &r, a, &r, &zero, c, &r)


def diffusion_round(double[:, :, ::1] p, double[:, :, ::1] q,
                    double[:, ::1] s, double[:, :, ::1] out,
                    Py_ssize_t lo, Py_ssize_t hi):
    """One synchronous cross-diffusion update for subjects lo..hi.

    out[i] = sym(q[i] @ ((s - p[i])/(N-1)) @ q[i].T) with s = sum of all p[j].
    """
    cdef Py_ssize_t n = p.shape[0]
    cdef int r = <int> p.shape[1]
    cdef double scale = 1.0 / (n - 1)
    cdef Py_ssize_t i, k, l
    cdef double[:, ::1] m = np.empty((r, r), dtype=np.float64)
    cdef double[:, ::1] t = np.empty((r, r), dtype=np.float64)
    cdef double[:, ::1] u = np.empty((r, r), dtype=np.float64)

    with nogil:
        for i in range(lo, hi):
            for k in range(r):
                for l in range(r):
                    m[k, l] = (s[k, l] - p[i, k, l]) * scale
            _matmul(&q[i, 0, 0], &m[0, 0], &t[0, 0], r)
            _matmul_bt(&t[0, 0], &q[i, 0, 0], &u[0, 0], r)
            for k in range(r):
                for l in range(r):
                    out[i, k, l] = 0.5 * (u[k, l] + u[l, k])


def shortest_path_lengths(const double[:, ::1] w):
    """All-pairs shortest path lengths with edge length 1/weight.

    Dense O(r^2) Dijkstra per source; zero weights are absent edges and
    unreachable pairs come back as inf.
    """
    cdef int r = <int> w.shape[0]
    out_arr = np.empty((r, r), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    visited_arr = np.zeros(r, dtype=np.uint8)
    cdef unsigned char[::1] visited = visited_arr
    cdef Py_ssize_t src, it, k, u
    cdef double best, cand

    with nogil:
        for src in range(r):
            for k in range(r):
                out[src, k] = INFINITY
                visited[k] = 0
            out[src, src] = 0.0
            for it in range(r):
                u = -1
                best = INFINITY
                for k in range(r):
                    if not visited[k] and out[src, k] < best:
                        best = out[src, k]
                        u = k
                if u < 0:
                    break
                visited[u] = 1
                for k in range(r):
                    if not visited[k] and w[u, k] > 0.0:
                        cand = best + 1.0 / w[u, k]
                        if cand < out[src, k]:
                            out[src, k] = cand
    return out_arr
