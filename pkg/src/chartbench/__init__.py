"""chartbench: a desk-scale manifold-learning benchmark with a known chart.

Generates a Swiss roll whose exact isometric coordinates are known, embeds
it with diffusion maps, Isomap and a simplified UMAP, scores every
representation with a supervised affine readout of the true chart, and adds
effective-rank spectral diagnostics and a mode-pair chart-selection
heuristic.
"""

__version__ = "0.1.0"

from .embedding import Embedding
from .linalg import AffineFit, SymSpectrum, lstsq_affine, pairwise_sq_dists, procrustes_rigid, sym_eig
from .synth import Dataset, SheetChart, SpiralParams, roll, sample_sheet, verify_isometry
from .dmap import (
    BetaRule,
    DiffusionBasis,
    KernelConfig,
    alpha_normalize,
    fit_diffusion,
    gaussian_kernel,
    laplacian_spectrum,
    nystrom_extend,
    resolve_beta,
    truncate,
)
from .isomap import DisconnectedGraphError, GeodesicMatrix, NeighborGraph, classical_mds, geodesics, knn_graph
from .umaplite import FuzzyGraph, build_fuzzy_graph, curve_params, optimize_layout
from .readout import (
    SCAN_DIMS,
    ReadoutFit,
    ScanParams,
    ScanRow,
    ScanTable,
    fit_oracle,
    predict,
    reconstruct_ambient,
    run_scan,
)
from .diagnostics import (
    PairChartReport,
    RankReport,
    ReadoutSpectrum,
    effective_ranks,
    novelty_score,
    pair_charts,
    rank_scan,
    readout_spectrum,
)

__all__ = [
    "__version__",
    "Embedding",
    "AffineFit", "SymSpectrum", "lstsq_affine", "pairwise_sq_dists", "procrustes_rigid", "sym_eig",
    "Dataset", "SheetChart", "SpiralParams", "roll", "sample_sheet", "verify_isometry",
    "BetaRule", "DiffusionBasis", "KernelConfig", "alpha_normalize", "fit_diffusion",
    "gaussian_kernel", "laplacian_spectrum", "nystrom_extend", "resolve_beta", "truncate",
    "DisconnectedGraphError", "GeodesicMatrix", "NeighborGraph", "classical_mds", "geodesics", "knn_graph",
    "FuzzyGraph", "build_fuzzy_graph", "curve_params", "optimize_layout",
    "SCAN_DIMS", "ReadoutFit", "ScanParams", "ScanRow", "ScanTable",
    "fit_oracle", "predict", "reconstruct_ambient", "run_scan",
    "PairChartReport", "RankReport", "ReadoutSpectrum", "effective_ranks",
    "novelty_score", "pair_charts", "rank_scan", "readout_spectrum",
]
