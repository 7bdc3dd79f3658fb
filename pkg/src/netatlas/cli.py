"""Command-line entry points: estimate, classify, compare, synth.

Every command is deterministic given identical flags and input files,
independent of --threads; exit code 0 on success, 1 on pipeline errors,
2 on bad arguments.
"""

import argparse
import json
import sys
from pathlib import Path

from .core import load_manifest, load_population, manifest_digest
from .diffusion import (
    DEFAULT_N_CLUSTERS,
    DEFAULT_N_STAR,
    DEFAULT_Q_NN,
    KERNEL_MODES,
    MODE_MULTI,
    AtlasParams,
    estimate_atlas,
    save_atlas,
)
from .discrimination import DEFAULT_C_REG, DEFAULT_N_F, edges_to_csv, run_cv
from .discrimination import save_report as save_cv_report
from .errors import DataFormatError, PipelineError
from .evaluation import compare_variants, report_to_csv
from .evaluation import save_report as save_variant_report
from .mkl import DEFAULT_LAMBDA
from .synth import SynthSpec, generate, write_dataset


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _nonnegative_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {value}")
    return value


def _nonnegative_float(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {value}")
    return value


def _sigma(text):
    if text.strip().lower() == "auto":
        return None
    return float(text)


def _folds(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 folds, got {value}")
    return value


def _seed_list(text):
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}")


def _mode_list(text):
    modes = [tok.strip() for tok in text.split(",") if tok.strip() != ""]
    for mode in modes:
        if mode not in KERNEL_MODES:
            raise argparse.ArgumentTypeError(
                f"unknown mode {mode!r}; choose from {', '.join(KERNEL_MODES)}"
            )
    return modes


def _add_pipeline_flags(sp):
    sp.add_argument("--n-star", type=_nonnegative_int, default=DEFAULT_N_STAR,
                    help="diffusion rounds (default %(default)s)")
    sp.add_argument("--knn", type=_positive_int, default=DEFAULT_Q_NN,
                    help="neighbors per node in the local kernel (default %(default)s)")
    sp.add_argument("--clusters", type=_positive_int, default=DEFAULT_N_CLUSTERS,
                    help="clusters for the supervised weighting (default %(default)s)")
    sp.add_argument("--lambda", dest="lam", type=_nonnegative_float, default=DEFAULT_LAMBDA,
                    help="margin-QP regularization (default %(default)s)")
    sp.add_argument("--sigma", type=_sigma, default=None, metavar="SIGMA|auto",
                    help="RBF bandwidth; 'auto' = median heuristic (default)")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed (default %(default)s)")
    sp.add_argument("--threads", type=_positive_int, default=1,
                    help="worker threads for data-parallel sections (default %(default)s)")


def _params(args):
    return AtlasParams(
        n_star=args.n_star,
        q_nn=args.knn,
        n_c=args.clusters,
        lam=args.lam,
        sigma=args.sigma,
        seed=args.seed,
    )


def cmd_estimate(args):
    manifest = load_manifest(args.manifest)
    digest = manifest_digest(args.manifest)
    pop = load_population(manifest, args.class_label)
    params = _params(args)
    atlas = estimate_atlas(pop, args.mode, params, threads=args.threads)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"atlas_{args.class_label}_{args.mode}.csv"
    save_atlas(atlas, params, csv_path, manifest_digest=digest)
    print(csv_path)
    return 0


def cmd_classify(args):
    manifest = load_manifest(args.manifest)
    digest = manifest_digest(args.manifest)
    params = _params(args)
    report = run_cv(
        manifest,
        params=params,
        n_folds=args.folds,
        n_f=args.nf,
        seed=args.seed,
        mode=args.mode,
        c_reg=args.c_reg,
        threads=args.threads,
    )
    save_cv_report(report, args.out, params=params, manifest_digest=digest, c_reg=args.c_reg)
    if args.edges_csv:
        edges_to_csv(report, args.edges_csv)
    print(args.out)
    return 0


def cmd_compare(args):
    if len(args.modes) < 2:
        raise DataFormatError("need at least two modes to compare")
    manifest = load_manifest(args.manifest)
    digest = manifest_digest(args.manifest)
    params = _params(args)
    report = compare_variants(
        manifest, params=params, modes=args.modes, seeds=args.seeds, threads=args.threads
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_variant_report(report, out_dir / "compare.json", params=params, manifest_digest=digest)
    report_to_csv(report, out_dir / "compare.csv")
    print(out_dir / "compare.json")
    return 0


_SPEC_KEYS = ("r", "n_per_class", "n_c", "n_disc", "delta", "noise", "seed")


def _spec_from_file(path):
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: not valid JSON ({exc})")
    if not isinstance(raw, dict):
        raise DataFormatError(f"{path}: expected a JSON object")
    unknown = set(raw) - set(_SPEC_KEYS)
    if unknown:
        raise DataFormatError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        return SynthSpec(**raw)
    except (TypeError, ValueError) as exc:
        raise DataFormatError(f"{path}: {exc}")


def cmd_synth(args):
    if args.spec:
        spec = _spec_from_file(args.spec)
    else:
        try:
            spec = SynthSpec(
                r=args.r,
                n_per_class=args.n_per_class,
                n_c=args.clusters,
                n_disc=args.n_disc,
                delta=args.delta,
                noise=args.noise,
                seed=args.seed,
            )
        except ValueError as exc:
            raise DataFormatError(str(exc))
    pop_a, pop_b, ground_truth = generate(spec)
    manifest_path = write_dataset(args.out, pop_a, pop_b, ground_truth, spec=spec)
    print(manifest_path)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="netatlas",
        description="Population atlas estimation for weighted brain networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", help="estimate one class's atlas")
    est.add_argument("--manifest", required=True, help="dataset manifest CSV")
    est.add_argument("--class", dest="class_label", required=True, help="class label to fuse")
    est.add_argument("--mode", choices=KERNEL_MODES, default=MODE_MULTI,
                     help="normalization kernel (default %(default)s)")
    est.add_argument("--out", required=True, help="output directory")
    _add_pipeline_flags(est)
    est.set_defaults(func=cmd_estimate)

    cls = sub.add_parser("classify", help="cross-validated two-class evaluation")
    cls.add_argument("--manifest", required=True, help="dataset manifest CSV")
    cls.add_argument("--nf", type=_positive_int, default=DEFAULT_N_F,
                     help="edges to select per fold (default %(default)s)")
    cls.add_argument("--folds", type=_folds, default=5, help="CV folds (default %(default)s)")
    cls.add_argument("--mode", choices=KERNEL_MODES, default=MODE_MULTI,
                     help="normalization kernel (default %(default)s)")
    cls.add_argument("--c-reg", type=_nonnegative_float, default=DEFAULT_C_REG,
                     help="SVM hinge penalty (default %(default)s)")
    cls.add_argument("--out", required=True, help="report JSON path")
    cls.add_argument("--edges-csv", default=None, help="also write selected edges as CSV")
    _add_pipeline_flags(cls)
    cls.set_defaults(func=cmd_classify)

    cmp_ = sub.add_parser("compare", help="centeredness across kernel modes")
    cmp_.add_argument("--manifest", required=True, help="dataset manifest CSV")
    cmp_.add_argument("--modes", type=_mode_list, default=["multi", "degree"],
                      help="comma-separated kernel modes (default %(default)s)")
    cmp_.add_argument("--seeds", type=_seed_list, default=[0],
                      help="comma-separated pipeline seeds (default 0)")
    cmp_.add_argument("--out", required=True, help="output directory")
    _add_pipeline_flags(cmp_)
    cmp_.set_defaults(func=cmd_compare)

    syn = sub.add_parser("synth", help="generate a synthetic two-class dataset")
    syn.add_argument("--out", required=True, help="output directory")
    syn.add_argument("--spec", default=None, help="JSON file with generator settings")
    syn.add_argument("--r", type=_positive_int, default=30, help="nodes (default %(default)s)")
    syn.add_argument("--n-per-class", type=_positive_int, default=40,
                     help="subjects per class (default %(default)s)")
    syn.add_argument("--clusters", type=_positive_int, default=3,
                     help="planted clusters (default %(default)s)")
    syn.add_argument("--n-disc", type=_nonnegative_int, default=20,
                     help="planted discriminative edges (default %(default)s)")
    syn.add_argument("--delta", type=_nonnegative_float, default=0.3,
                     help="effect size on planted edges (default %(default)s)")
    syn.add_argument("--noise", type=_nonnegative_float, default=0.05,
                     help="Gaussian noise std (default %(default)s)")
    syn.add_argument("--seed", type=int, default=0, help="RNG seed (default %(default)s)")
    syn.set_defaults(func=cmd_synth)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
