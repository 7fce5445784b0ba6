"""Sparse pairwise-rotation hashing for binary nearest-neighbor search."""

__version__ = "0.1.0"

from .analytic import (
    Cov2D,
    EigenAngleParam,
    cell_probabilities,
    cov_from_eigen,
    empirical_qerr,
    entropy2d,
    gamma,
    mc_qerr,
    qerr_gauss2d,
    qerr_gauss_nd,
)
from .codec import BinaryCodeSet, encode, hamming, knn_hamming, knn_hamming_batch
from .dataio import (
    gen_toy,
    load_codes,
    load_model,
    read_ids,
    read_vectors,
    save_codes,
    save_model,
    write_ids,
    write_vectors,
)
from .estimator import PairwiseRotationHasher
from .evaluate import (
    BenchmarkConfig,
    GroundTruth,
    RecallReport,
    ground_truth,
    recall_curve,
    run_benchmark,
)
from .learn import (
    CovarianceState,
    LearnerConfig,
    build_iso_stage,
    build_pca_stage,
    build_random_stage,
    estimate,
    learn,
    pair_angle_iso,
    pair_angle_pca,
    pair_angle_tilted,
    update_covariance,
)
from .transform import (
    FactoredTransform,
    RotationStage,
    apply,
    apply_stage,
    fill_in_count,
    multiply_count,
    to_dense,
)

__all__ = [
    "BinaryCodeSet",
    "BenchmarkConfig",
    "Cov2D",
    "CovarianceState",
    "EigenAngleParam",
    "FactoredTransform",
    "GroundTruth",
    "LearnerConfig",
    "PairwiseRotationHasher",
    "RecallReport",
    "RotationStage",
    "apply",
    "apply_stage",
    "build_iso_stage",
    "build_pca_stage",
    "build_random_stage",
    "cell_probabilities",
    "cov_from_eigen",
    "empirical_qerr",
    "encode",
    "entropy2d",
    "estimate",
    "fill_in_count",
    "gamma",
    "gen_toy",
    "ground_truth",
    "hamming",
    "knn_hamming",
    "knn_hamming_batch",
    "learn",
    "load_codes",
    "load_model",
    "mc_qerr",
    "multiply_count",
    "pair_angle_iso",
    "pair_angle_pca",
    "pair_angle_tilted",
    "qerr_gauss2d",
    "qerr_gauss_nd",
    "read_ids",
    "read_vectors",
    "recall_curve",
    "run_benchmark",
    "save_codes",
    "save_model",
    "to_dense",
    "update_covariance",
    "write_ids",
    "write_vectors",
]
