"""Graph kernels (gappy GraphHopper, Weisfeiler-Lehman) with an SVM harness."""

from .backend import active, get_backend, use
from .datasets import (
    NoiseConfig,
    data_dir,
    dataset_stats,
    ensure_node_labels,
    inject_noise,
    load_edge_list,
    load_tu_dataset,
)
from .errors import (
    ComputeError,
    ConfigError,
    ConvergenceWarning,
    CountOverflowError,
    DataError,
    DataFormatError,
    DegenerateFoldError,
    GraphKernError,
    GraphValidationError,
    KernelInputError,
    SizeGuardError,
    ZeroDiagonalError,
)
from .gram import (
    GhConfig,
    GramMatrix,
    WlConfig,
    check_psd,
    gram,
    load_gram,
    normalize,
    save_gram,
)
from .graphs import (
    Dataset,
    DatasetMeta,
    Graph,
    degree,
    degrees,
    from_edges,
    graphs_equal,
    make_dataset,
    validate,
    with_degree_labels,
)
from .hopper import (
    HopCountMatrices,
    NodeKernelSpec,
    all_paths,
    graphhopper_kernel,
    graphhopper_kernel_gapfree,
    hop_count_matrices,
    hop_count_matrices_gapfree,
    kernel_bruteforce,
    node_kernel,
    node_kernel_matrix,
    pair_kernel,
)
from .spdag import (
    CountVectors,
    SpDag,
    build_spdag,
    count_vectors,
    enumerate_paths,
    extend_gappy,
    to_debug_text,
)
from .svm import (
    CvProtocol,
    CvResult,
    SvmModel,
    aggregate_accuracies,
    nested_cv,
    stratified_folds,
    svm_predict,
    svm_train,
)
from .wl import WlFeatures, wl_kernel, wl_relabel

__version__ = "0.1.0"

__all__ = [
    "ComputeError",
    "ConfigError",
    "ConvergenceWarning",
    "CountOverflowError",
    "CountVectors",
    "CvProtocol",
    "CvResult",
    "DataError",
    "DataFormatError",
    "Dataset",
    "DatasetMeta",
    "DegenerateFoldError",
    "GhConfig",
    "GramMatrix",
    "Graph",
    "GraphKernError",
    "GraphValidationError",
    "HopCountMatrices",
    "KernelInputError",
    "NodeKernelSpec",
    "NoiseConfig",
    "SizeGuardError",
    "SpDag",
    "SvmModel",
    "WlConfig",
    "WlFeatures",
    "ZeroDiagonalError",
    "active",
    "aggregate_accuracies",
    "all_paths",
    "build_spdag",
    "check_psd",
    "count_vectors",
    "data_dir",
    "dataset_stats",
    "degree",
    "degrees",
    "ensure_node_labels",
    "enumerate_paths",
    "extend_gappy",
    "from_edges",
    "get_backend",
    "gram",
    "graphhopper_kernel",
    "graphhopper_kernel_gapfree",
    "graphs_equal",
    "hop_count_matrices",
    "hop_count_matrices_gapfree",
    "inject_noise",
    "kernel_bruteforce",
    "load_edge_list",
    "load_gram",
    "load_tu_dataset",
    "make_dataset",
    "nested_cv",
    "node_kernel",
    "node_kernel_matrix",
    "normalize",
    "pair_kernel",
    "save_gram",
    "stratified_folds",
    "svm_predict",
    "svm_train",
    "to_debug_text",
    "use",
    "validate",
    "wl_kernel",
    "wl_relabel",
    "with_degree_labels",
]
