import subprocess
import sys

import numpy as np
import pytest

from netatlas import _backend, _kernels_py

from conftest import random_connectome, random_graph
from reference import shortest_paths_heap

try:
    from netatlas import _kernels
except ImportError:
    _kernels = None

needs_compiled = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def _stack(seed, n, r, q_nn):
    from netatlas.diffusion import local_kernel, status_matrix
    from netatlas.mkl import NormalizationKernel

    ps, qs = [], []
    for i in range(n):
        c = random_connectome(seed + i, r)
        s = c.weights.sum(axis=1)
        ps.append(status_matrix(c, NormalizationKernel(diag=s / s.max())).p)
        qs.append(local_kernel(c, q_nn).q)
    return np.ascontiguousarray(np.stack(ps)), np.ascontiguousarray(np.stack(qs))


def _run_round(impl, p, q):
    s = p.sum(axis=0)
    out = np.empty_like(p)
    impl.diffusion_round(p, q, s, out, 0, p.shape[0])
    return out


class TestBackendSelection:
    def test_flags_are_consistent(self):
        assert _backend.BACKEND in ("compiled", "python")
        assert _kernels_py.COMPILED is False
        if _kernels is not None:
            assert _kernels.COMPILED is True

    @needs_compiled
    def test_compiled_wins_by_default(self):
        code = (
            "import netatlas; import sys; "
            "sys.exit(0 if netatlas.BACKEND == 'compiled' else 1)"
        )
        assert subprocess.run([sys.executable, "-c", code]).returncode == 0

    def test_env_var_forces_python_backend(self):
        code = (
            "import netatlas; import sys; "
            "sys.exit(0 if netatlas.BACKEND == 'python' else 1)"
        )
        import os

        env = dict(os.environ, NETATLAS_PURE_PYTHON="1")
        assert subprocess.run([sys.executable, "-c", code], env=env).returncode == 0


class TestDiffusionRoundEquivalence:
    @needs_compiled
    def test_backends_agree(self):
        for seed in (0, 10):
            p, q = _stack(seed, 5, 9, 4)
            got = _run_round(_kernels, p, q)
            want = _run_round(_kernels_py, p, q)
            assert np.allclose(got, want, rtol=0, atol=1e-13)

    @needs_compiled
    def test_partial_ranges_compose(self):
        p, q = _stack(20, 6, 8, 3)
        s = p.sum(axis=0)
        full = np.empty_like(p)
        _kernels.diffusion_round(p, q, s, full, 0, 6)
        split = np.empty_like(p)
        _kernels.diffusion_round(p, q, s, split, 0, 3)
        _kernels.diffusion_round(p, q, s, split, 3, 6)
        assert np.array_equal(full, split)

    def test_python_round_matches_direct_formula(self):
        p, q = _stack(30, 4, 7, 3)
        out = _run_round(_kernels_py, p, q)
        total = p.sum(axis=0)
        for i in range(4):
            mean_others = (total - p[i]) / 3
            t = q[i] @ mean_others @ q[i].T
            assert np.allclose(out[i], (t + t.T) / 2, atol=1e-14)


class TestShortestPathEquivalence:
    def test_python_matches_heap_oracle(self):
        for seed in range(5):
            w = random_graph(seed, 9, density=0.5)
            got = _kernels_py.shortest_path_lengths(w)
            assert np.allclose(got, shortest_paths_heap(w), atol=1e-12, equal_nan=False)

    @needs_compiled
    def test_backends_agree(self):
        for seed in range(5):
            w = random_graph(seed + 50, 10, density=0.6)
            got = _kernels.shortest_path_lengths(w)
            want = _kernels_py.shortest_path_lengths(w)
            # both use inf for unreachable pairs
            assert np.allclose(got, want, atol=1e-12)

    @needs_compiled
    def test_accepts_read_only_input(self):
        c = random_connectome(60, 8)
        assert not c.weights.flags.writeable
        out = _kernels.shortest_path_lengths(np.ascontiguousarray(c.weights))
        assert np.isfinite(out[np.triu_indices(8, k=1)]).all()
