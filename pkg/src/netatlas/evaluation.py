"""Centeredness and representativeness metrics for estimated atlases.

A more centered atlas sits closer (in Frobenius distance) to the individual
networks of its population.  Note the comparison is between the diffused-space
atlas and the raw networks, with no rescaling; the absolute numbers therefore
mix scales and are only meaningful relative to other kernel modes run on the
same population.
"""

import csv
import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import CSV_FLOAT_FMT, load_populations
from .diffusion import MODE_MULTI, AtlasParams, estimate_atlas

COMPARABILITY_NOTE = (
    "centeredness compares diffused-space atlases to raw networks without "
    "rescaling; compare values across modes, not across datasets"
)


@dataclass(frozen=True)
class VariantRow:
    mode: str
    seed: int
    class_label: str
    centeredness: float


@dataclass(frozen=True)
class VariantReport:
    rows: tuple
    win_rates: dict  # ablation mode -> fraction of (class, seed) cells won by multi
    modes: tuple
    seeds: tuple


def frobenius_distance(a, b):
    """sqrt(sum of squared entrywise absolute differences)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt((np.abs(a - b) ** 2).sum()))


def centeredness(atlas, p):
    """Mean Frobenius distance from the atlas to each subject (smaller = more centered)."""
    if len(p) == 0:
        raise ValueError("population is empty")
    if atlas.a.shape[0] != p.r:
        raise ValueError("atlas and population have different node counts")
    return float(
        np.mean([frobenius_distance(atlas.a, s.weights) for s in p.subjects])
    )


def compare_variants(manifest, params=None, modes=None, seeds=(0,), threads=1):
    """Centeredness per (mode, seed, class) plus multi-vs-ablation win rates.

    Rows come out in (mode, seed, class) nesting order.  Win rate counts the
    (class, seed) cells where the multi-mode atlas is at least as centered as
    the ablation's.
    """
    if modes is None or len(modes) < 2:
        raise ValueError("compare_variants needs at least two modes")
    if params is None:
        params = AtlasParams()
    pops = load_populations(manifest)
    rows = []
    cell = {}
    for mode in modes:
        for seed in seeds:
            run_params = dataclasses.replace(params, seed=int(seed))
            for pop in pops:
                atlas = estimate_atlas(pop, mode, run_params, threads=threads)
                c = centeredness(atlas, pop)
                rows.append(
                    VariantRow(
                        mode=mode, seed=int(seed), class_label=pop.class_label, centeredness=c
                    )
                )
                cell[(mode, int(seed), pop.class_label)] = c
    win_rates = {}
    if MODE_MULTI in modes:
        for mode in dict.fromkeys(modes):  # distinct, first-appearance order
            if mode == MODE_MULTI:
                continue
            wins = [
                cell[(MODE_MULTI, s, cl)] <= cell[(mode, s, cl)]
                for s in (int(s) for s in seeds)
                for cl in (p.class_label for p in pops)
            ]
            win_rates[mode] = float(np.mean(wins))
    return VariantReport(
        rows=tuple(rows), win_rates=win_rates, modes=tuple(modes), seeds=tuple(int(s) for s in seeds)
    )


def report_to_dict(report, params=None, manifest_digest=None):
    return {
        "note": COMPARABILITY_NOTE,
        "modes": list(report.modes),
        "seeds": list(report.seeds),
        "params": params.as_dict() if params is not None else None,
        "manifest_digest": manifest_digest,
        "win_rates": dict(report.win_rates),
        "rows": [
            {
                "mode": row.mode,
                "seed": row.seed,
                "class_label": row.class_label,
                "centeredness": row.centeredness,
            }
            for row in report.rows
        ],
    }


def save_report(report, path, params=None, manifest_digest=None):
    payload = report_to_dict(report, params=params, manifest_digest=manifest_digest)
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def report_to_csv(report, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("mode", "seed", "class_label", "centeredness"))
        for row in report.rows:
            writer.writerow(
                (row.mode, row.seed, row.class_label, CSV_FLOAT_FMT % row.centeredness)
            )
