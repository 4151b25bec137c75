"""Spectrum-preserving graph coarsening.

Spectral distances between a graph and its coarsening, the multilevel
(MGC) and spectral (SGC) coarseners, and an SBM block-recovery harness.
"""
from .algorithms import (
    CoarsenResult,
    edge_matching_coarsen,
    merge_pair,
    mgc,
    node_dissimilarity,
    sgc,
    spectral_clustering_coarsen,
    two_hop_candidates,
)
from .coarsening import (
    Partition,
    coarsen,
    consistent_coarse_laplacian,
    lift,
    lift_eigenvector,
    normalized_coarsening_matrix,
    partition_indicator,
)
from .evaluation import RecoveryRow, nmi, recovery_experiment
from .graph import (
    Graph,
    graph_from_edges,
    normalized_laplacian,
    normalized_weight_row,
    random_walk_laplacian,
    signless_normalized_laplacian,
)
from .kmeans import KMeansConfig, kmeans
from .sbm import SBMConfig, build_block_matrix, sample_sbm
from .spectral import (
    Spectrum,
    SpectralDistanceReport,
    distance_report,
    eigendecompose,
    excluded_band,
    full_spectral_distance,
    lifted_eigenvalues,
    partial_spectral_distance,
)

__version__ = "0.1.0"
