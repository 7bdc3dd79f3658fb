"""Shared helpers and fixtures for the test suite."""

import numpy as np
import pytest

from netatlas.core import Connectome, Population
from netatlas.synth import SynthSpec, generate, write_dataset


def random_graph(seed, r, density=1.0, low=0.1, high=1.0):
    """Seeded symmetric nonnegative zero-diagonal weight matrix.

    density < 1 zeroes a fraction of the edges (possibly disconnecting the
    graph), which exercises the unreachable-node paths.
    """
    rng = np.random.default_rng(seed)
    w = rng.uniform(low, high, size=(r, r))
    if density < 1.0:
        mask = rng.random((r, r)) < density
        w = w * mask
    w = np.triu(w, k=1)
    w = w + w.T
    return w


def random_connectome(seed, r, density=1.0):
    return Connectome(random_graph(seed, r, density=density))


def make_population(seed, r, n, label="A", density=1.0):
    subjects = tuple(random_connectome(seed * 1000 + i, r, density=density) for i in range(n))
    ids = tuple(f"{label}{i:03d}" for i in range(n))
    return Population(subjects, label, ids)


@pytest.fixture
def tiny_dataset(tmp_path):
    """Small on-disk two-class dataset; returns (manifest_path, ground_truth)."""
    spec = SynthSpec(r=12, n_per_class=10, n_c=2, n_disc=6, delta=0.3, noise=0.05, seed=7)
    pop_a, pop_b, gt = generate(spec)
    manifest_path = write_dataset(tmp_path / "data", pop_a, pop_b, gt, spec=spec)
    return manifest_path, gt
