"""Information-plane coordinates, transformation-efficiency metrics, and
data-processing-inequality diagnostics for small feed-forward networks.

The functional core lives in the submodules; :mod:`infoplane.analyzers`
wraps the common workflows in scikit-learn style estimators, and
:mod:`infoplane.cli` exposes the same pipelines on the command line.
"""

from .analyzers import ConductanceMap, InformationPlaneAnalyzer, ITEProfiler
from .conductance import (
    ConductanceRecord,
    IGConfig,
    batch_conductance,
    gradient_conductance,
    integrated_gradients_conductance,
)
from .dumps import DumpManifest, LayerEntry, export_csv, read_dump, write_dump
from .exceptions import (
    DimensionError,
    DumpCorruptionError,
    DumpFormatError,
    SingularityError,
    UnsupportedVersionError,
    ValidationError,
)
from .information import (
    BinningConfig,
    GaussianSpec,
    LabelSet,
    MIEstimate,
    binned_mi,
    conditional_label_entropy,
    discrete_entropy,
    gaussian_conductance_entropy,
    gaussian_sample_entropy,
    kde_entropy,
    kde_mi,
    ksg_mi,
    mi_with_labels,
    quantize,
)
from .ite import ITEConfig, ITERow, compression, global_efficiency, ite_profile, preservation, usefulness
from .network import (
    LayerTrace,
    Network,
    NetworkSpec,
    build_network,
    finite_diff_jacobian,
    forward_collect,
    jacobian,
    jvp,
    load_network,
    save_network,
)
from .plane import (
    DPIReport,
    DPIViolation,
    PlaneConfig,
    PlaneRow,
    activation_plane,
    conductance_plane,
    dpi_check,
    ib_objective,
)
from .synthetic import (
    BlobsSpec,
    MarkovChainCase,
    accuracy,
    circle_centers,
    gen_blobs,
    gen_gaussian,
    markov_chain_exact_mi,
    markov_dataset,
    mod2_floor2_case,
    train_sgd,
)

__version__ = "0.1.0"

__all__ = [
    "BinningConfig",
    "BlobsSpec",
    "ConductanceMap",
    "ConductanceRecord",
    "DimensionError",
    "DPIReport",
    "DPIViolation",
    "DumpCorruptionError",
    "DumpFormatError",
    "DumpManifest",
    "GaussianSpec",
    "IGConfig",
    "ITEConfig",
    "ITEProfiler",
    "ITERow",
    "InformationPlaneAnalyzer",
    "LabelSet",
    "LayerEntry",
    "LayerTrace",
    "MarkovChainCase",
    "MIEstimate",
    "Network",
    "NetworkSpec",
    "PlaneConfig",
    "PlaneRow",
    "SingularityError",
    "UnsupportedVersionError",
    "ValidationError",
    "accuracy",
    "activation_plane",
    "batch_conductance",
    "binned_mi",
    "build_network",
    "circle_centers",
    "compression",
    "conditional_label_entropy",
    "conductance_plane",
    "discrete_entropy",
    "dpi_check",
    "export_csv",
    "finite_diff_jacobian",
    "forward_collect",
    "gaussian_conductance_entropy",
    "gaussian_sample_entropy",
    "gen_blobs",
    "gen_gaussian",
    "global_efficiency",
    "gradient_conductance",
    "ib_objective",
    "integrated_gradients_conductance",
    "ite_profile",
    "jacobian",
    "jvp",
    "kde_entropy",
    "kde_mi",
    "ksg_mi",
    "load_network",
    "markov_chain_exact_mi",
    "markov_dataset",
    "mi_with_labels",
    "mod2_floor2_case",
    "preservation",
    "quantize",
    "read_dump",
    "save_network",
    "train_sgd",
    "usefulness",
    "write_dump",
]
