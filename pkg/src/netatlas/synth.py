"""Seeded synthetic two-class connectome populations.

Populations carry planted cluster structure (shared between the classes) and
a planted set of discriminative edges boosted by `delta` in class B, so both
the centeredness and the classification claims can be checked at desk scale.
"""

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .core import DatasetManifest, Population, devectorize, save_connectome, save_manifest

LABEL_A = "A"
LABEL_B = "B"


@dataclass(frozen=True)
class SynthSpec:
    r: int = 30
    n_per_class: int = 40
    n_c: int = 3
    n_disc: int = 20
    delta: float = 0.3
    noise: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.r < 3:
            raise ValueError("r must be at least 3")
        if self.n_per_class < 1:
            raise ValueError("n_per_class must be at least 1")
        if self.n_c < 1:
            raise ValueError("n_c must be at least 1")
        n_edges = self.r * (self.r - 1) // 2
        if not 0 <= self.n_disc <= n_edges:
            raise ValueError(f"n_disc must be in [0, {n_edges}]")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.noise < 0:
            raise ValueError("noise must be nonnegative")


def generate(spec):
    """Build (population_A, population_B, ground_truth_edges) from the seed.

    One RNG stream, consumed in a fixed documented order so seeds are stable:
    1. n_c cluster base matrices, upper-triangular entries uniform [0.1, 1.0];
    2. one cluster assignment per subject, shared by both classes (subject i
       of A and subject i of B perturb the same base, so with zero noise the
       classes differ exactly on the planted edges);
    3. standard-normal noise for every subject (class A then class B), always
       drawn, scaled by spec.noise;
    4. the n_disc discriminative edges, uniform without replacement.
    Class B adds delta on the planted edges; everything is clamped to [0, 1].
    """
    rng = np.random.default_rng(spec.seed)
    n_edges = spec.r * (spec.r - 1) // 2
    iu, il = np.triu_indices(spec.r, k=1)

    bases = rng.uniform(0.1, 1.0, size=(spec.n_c, n_edges))
    assign = rng.integers(0, spec.n_c, size=spec.n_per_class)
    noise_a = rng.standard_normal((spec.n_per_class, n_edges))
    noise_b = rng.standard_normal((spec.n_per_class, n_edges))
    disc = rng.choice(n_edges, size=spec.n_disc, replace=False)

    def build(noise_rows, boost):
        subjects = []
        for i in range(spec.n_per_class):
            vec = bases[assign[i]] + spec.noise * noise_rows[i]
            if boost:
                vec[disc] += spec.delta
            subjects.append(devectorize(np.clip(vec, 0.0, 1.0), spec.r))
        return subjects

    ids_a = tuple(f"{LABEL_A}{i:03d}" for i in range(spec.n_per_class))
    ids_b = tuple(f"{LABEL_B}{i:03d}" for i in range(spec.n_per_class))
    pop_a = Population(tuple(build(noise_a, False)), LABEL_A, ids_a)
    pop_b = Population(tuple(build(noise_b, True)), LABEL_B, ids_b)
    ground_truth = sorted((int(iu[e]), int(il[e])) for e in disc)
    return pop_a, pop_b, ground_truth


def write_dataset(out_dir, pop_a, pop_b, ground_truth, spec=None):
    """Write matrices/, manifest.csv and ground_truth.json; returns manifest path."""
    out_dir = Path(out_dir)
    mat_dir = out_dir / "matrices"
    mat_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for pop in (pop_a, pop_b):
        for sid, subject in zip(pop.subject_ids, pop.subjects):
            rel = f"matrices/{sid}.csv"
            save_connectome(subject, out_dir / rel)
            entries.append((sid, rel, pop.class_label))
    manifest_path = out_dir / "manifest.csv"
    save_manifest(DatasetManifest(entries=tuple(entries)), manifest_path)
    payload = {
        "edges": [[k, l] for k, l in ground_truth],
        "spec": asdict(spec) if spec is not None else None,
    }
    (out_dir / "ground_truth.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n"
    )
    return manifest_path
