"""Keyframe selection over precomputed embeddings.

Scores every frame by relevance-conditioned diversity (how far it sits
from any more query-relevant frame) and selects under a frame budget
with an iterative batched refinement loop. Ships ablation baselines, a
seeded synthetic benchmark harness, a file format for embeddings, a
FastAPI service, and a CLI.
"""

__version__ = "0.1.0"

from .core import (
    cosine_similarity,
    l2_normalize,
    max_pairwise_distance,
    minmax_normalize,
    pairwise_sq_distances,
)
from .errors import (
    BadMagicError,
    EmbeddingFormatError,
    GiftError,
    InvalidInputError,
    ShapeError,
    SweepError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
    ZeroNormError,
)
from .selector import (
    SelectionResult,
    SelectorConfig,
    compute_relevance,
    directed_diversity,
    irreplaceability,
    select,
    select_incremental,
)
from .baselines import (
    mmr_greedy_select,
    top_relevance_select,
    undirected_diversity_select,
    uniform_select,
)
from .synth import SyntheticVideoSpec, evaluate, generate, make_corpus, run_sweep
from .formats import read_embeddings, subsample_candidates, write_embeddings

__all__ = [
    "__version__",
    "cosine_similarity",
    "l2_normalize",
    "minmax_normalize",
    "pairwise_sq_distances",
    "max_pairwise_distance",
    "SelectorConfig",
    "SelectionResult",
    "compute_relevance",
    "directed_diversity",
    "irreplaceability",
    "select",
    "select_incremental",
    "uniform_select",
    "top_relevance_select",
    "undirected_diversity_select",
    "mmr_greedy_select",
    "SyntheticVideoSpec",
    "generate",
    "evaluate",
    "make_corpus",
    "run_sweep",
    "read_embeddings",
    "write_embeddings",
    "subsample_candidates",
    "GiftError",
    "InvalidInputError",
    "ZeroNormError",
    "EmbeddingFormatError",
    "BadMagicError",
    "UnsupportedDtypeError",
    "ShapeError",
    "TruncatedPayloadError",
    "SweepError",
]
