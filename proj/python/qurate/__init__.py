"""Reliability-guided curation of weakly annotated text via per-frame QUBO
subset selection.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from qurate._core import (
    AnnealResult,
    AnnealSchedule,
    FrameCandidates,
    QuboParams,
    SelectionState,
    SimilarityMatrix,
    SparseVector,
    TrajectoryPoint,
    Vocabulary,
    __version__,
    anneal,
    bow_features,
    brute_force_select,
    cosine_matrix,
    default_config_json,
    delta_energy_swap,
    energy,
    fit_tfidf,
    macro_f1,
    mean_pairwise_similarity,
    pareto_frontier,
    run_command,
    tokenize,
    transform,
)

__all__ = [
    "AnnealResult",
    "AnnealSchedule",
    "FrameCandidates",
    "QuboParams",
    "SelectionState",
    "SimilarityMatrix",
    "SparseVector",
    "TrajectoryPoint",
    "Vocabulary",
    "__version__",
    "anneal",
    "bow_features",
    "brute_force_select",
    "cosine_matrix",
    "default_config_json",
    "delta_energy_swap",
    "energy",
    "fit_tfidf",
    "macro_f1",
    "mean_pairwise_similarity",
    "pareto_frontier",
    "run_command",
    "tokenize",
    "transform",
]
