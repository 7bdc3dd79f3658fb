"""netatlas: representative, centered and discriminative population atlases
for weighted brain networks, via supervised multi-topology network fusion."""

from ._backend import BACKEND
from .clustering import ClusterAssignment, cluster
from .core import (
    Connectome,
    DatasetManifest,
    Population,
    load_connectome,
    load_manifest,
    load_population,
    load_populations,
    manifest_digest,
    save_connectome,
    save_manifest,
    vectorize,
    devectorize,
)
from .diffusion import (
    KERNEL_MODES,
    Atlas,
    AtlasParams,
    LocalKernel,
    StatusMatrix,
    cross_diffuse,
    estimate_atlas,
    fuse,
    load_atlas,
    local_kernel,
    save_atlas,
    status_matrix,
)
from .discrimination import (
    CvReport,
    EdgeSelection,
    LinearClassifier,
    ResidualMatrix,
    extract_features,
    residual,
    run_cv,
    select_top,
    train_svm,
)
from .errors import (
    ConvergenceError,
    DataFormatError,
    DegenerateGraphError,
    DegenerateLabelsError,
    DegenerateNodeError,
    InvalidBandwidthError,
    PipelineError,
    PopulationTooSmallError,
    SingularKernelError,
    TooFewSubjectsError,
    VanishingWeightError,
)
from .evaluation import centeredness, compare_variants, frobenius_distance
from .mkl import (
    BaseKernel,
    GammaSolution,
    NormalizationKernel,
    SubjectWeights,
    build_base_kernels,
    compute_weights,
    learn_subject_weights,
    normalization_kernel,
    solve_gamma,
)
from .synth import SynthSpec, generate, write_dataset
from .topology import (
    AvgTopologyMatrix,
    avg_topology,
    centrality_profile,
    closeness_centrality,
    eigenvector_centrality,
    strength,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    # core data model
    "Connectome",
    "Population",
    "DatasetManifest",
    "load_connectome",
    "save_connectome",
    "load_manifest",
    "save_manifest",
    "load_population",
    "load_populations",
    "manifest_digest",
    "vectorize",
    "devectorize",
    # topology
    "AvgTopologyMatrix",
    "strength",
    "eigenvector_centrality",
    "closeness_centrality",
    "centrality_profile",
    "avg_topology",
    # clustering
    "ClusterAssignment",
    "cluster",
    # supervised kernel weighting
    "BaseKernel",
    "GammaSolution",
    "SubjectWeights",
    "NormalizationKernel",
    "build_base_kernels",
    "solve_gamma",
    "compute_weights",
    "learn_subject_weights",
    "normalization_kernel",
    # diffusion
    "KERNEL_MODES",
    "StatusMatrix",
    "LocalKernel",
    "Atlas",
    "AtlasParams",
    "status_matrix",
    "local_kernel",
    "cross_diffuse",
    "fuse",
    "estimate_atlas",
    "save_atlas",
    "load_atlas",
    # discrimination
    "ResidualMatrix",
    "EdgeSelection",
    "LinearClassifier",
    "CvReport",
    "residual",
    "select_top",
    "extract_features",
    "train_svm",
    "run_cv",
    # synthetic data
    "SynthSpec",
    "generate",
    "write_dataset",
    # evaluation
    "frobenius_distance",
    "centeredness",
    "compare_variants",
    # errors
    "PipelineError",
    "DataFormatError",
    "DegenerateGraphError",
    "ConvergenceError",
    "DegenerateNodeError",
    "TooFewSubjectsError",
    "InvalidBandwidthError",
    "DegenerateLabelsError",
    "VanishingWeightError",
    "SingularKernelError",
    "PopulationTooSmallError",
]
