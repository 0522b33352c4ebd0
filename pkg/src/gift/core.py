"""Deterministic vector and matrix primitives used by every selector.

Conventions: embeddings are stored as 32-bit floats; dot products and
distance sums accumulate in 64-bit. Cosine values are clamped to [-1, 1]
and squared distances to >= 0 so downstream min/max logic never sees
rounding artifacts.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, ZeroNormError

__all__ = [
    "as_frame_matrix",
    "as_query_vector",
    "cosine_similarity",
    "l2_normalize",
    "minmax_normalize",
    "pairwise_sq_distances",
    "max_pairwise_distance",
]


def as_frame_matrix(data) -> np.ndarray:
    """Validate and return an N x D float32 frame-embedding matrix.

    Raises InvalidInputError on wrong rank, empty axes, or non-finite
    entries.
    """
    m = np.asarray(data, dtype=np.float32)
    if m.ndim != 2:
        raise InvalidInputError(f"frame matrix must be 2-D, got {m.ndim}-D")
    n, d = m.shape
    if n < 1 or d < 1:
        raise InvalidInputError(f"frame matrix must be at least 1x1, got {n}x{d}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("frame matrix contains NaN or Inf entries")
    return m


def as_query_vector(data, dim: int | None = None) -> np.ndarray:
    """Validate and return a D float32 query embedding.

    The vector must be finite and nonzero; when ``dim`` is given it must
    match the paired frame matrix.
    """
    q = np.asarray(data, dtype=np.float32)
    if q.ndim != 1:
        raise InvalidInputError(f"query must be 1-D, got {q.ndim}-D")
    if q.shape[0] < 1:
        raise InvalidInputError("query must have at least one component")
    if not np.all(np.isfinite(q)):
        raise InvalidInputError("query contains NaN or Inf entries")
    if dim is not None and q.shape[0] != dim:
        raise InvalidInputError(
            f"query dimension {q.shape[0]} does not match frame dimension {dim}"
        )
    if float(np.linalg.norm(q.astype(np.float64))) == 0.0:
        raise ZeroNormError("query vector has zero norm")
    return q


def cosine_similarity(a, b) -> float:
    """Cosine similarity dot(a, b) / (|a| * |b|), clamped to [-1, 1].

    Accumulates in float64. Zero-norm inputs are a precondition violation
    and raise ZeroNormError naming the offending vector.
    """
    av = np.asarray(a, dtype=np.float64).ravel()
    bv = np.asarray(b, dtype=np.float64).ravel()
    if av.shape[0] != bv.shape[0]:
        raise InvalidInputError(
            f"vector dimension mismatch: {av.shape[0]} vs {bv.shape[0]}"
        )
    if not (np.all(np.isfinite(av)) and np.all(np.isfinite(bv))):
        raise InvalidInputError("cosine_similarity inputs must be finite")
    na = float(np.linalg.norm(av))
    nb = float(np.linalg.norm(bv))
    if na == 0.0:
        raise ZeroNormError("first vector has zero norm")
    if nb == 0.0:
        raise ZeroNormError("second vector has zero norm")
    sim = float(np.dot(av, bv)) / (na * nb)
    return min(1.0, max(-1.0, sim))


def l2_normalize(m: np.ndarray) -> np.ndarray:
    """Return a copy of ``m`` with every row scaled to unit Euclidean norm.

    Row directions are preserved. A zero-norm row raises ZeroNormError
    carrying the row index.
    """
    m = as_frame_matrix(m)
    norms = np.linalg.norm(m.astype(np.float64), axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        row = int(zero[0])
        raise ZeroNormError(f"row {row} has zero norm", index=row)
    return (m.astype(np.float64) / norms[:, None]).astype(np.float32)


def minmax_normalize(v) -> np.ndarray:
    """Affinely map a vector onto [0, 1]: min -> 0, max -> 1.

    When every entry is equal the map is undefined; the documented
    convention is an all-ones output so a degenerate relevance vector
    does not zero out downstream multiplicative scores.
    """
    x = np.asarray(v, dtype=np.float64).ravel()
    if x.shape[0] < 1:
        raise InvalidInputError("minmax_normalize requires at least one entry")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("minmax_normalize input must be finite")
    lo = float(x.min())
    hi = float(x.max())
    if hi == lo:
        return np.ones_like(x)
    return (x - lo) / (hi - lo)


def pairwise_sq_distances(m: np.ndarray) -> np.ndarray:
    """Exact N x N matrix of squared Euclidean distances between rows.

    Computed from explicit row differences (not the expanded Gram form),
    accumulated in float64 and stored as float32; any negative rounding
    residue is clamped to zero. N is bounded by the candidate pool, so
    the O(N^2 D) cost is the contract.
    """
    m = as_frame_matrix(m)
    x = m.astype(np.float64)
    diff = x[:, None, :] - x[None, :, :]
    dm = np.einsum("ijk,ijk->ij", diff, diff)
    np.maximum(dm, 0.0, out=dm)
    dm = dm.astype(np.float32)
    np.fill_diagonal(dm, 0.0)
    return dm


def max_pairwise_distance(dm: np.ndarray, subset) -> float:
    """Maximum of dm[j, k] over all pairs drawn from ``subset``.

    Returns 0.0 for a single-element subset. An empty subset raises
    InvalidInputError.
    """
    idx = np.asarray(list(subset), dtype=np.int64)
    if idx.size == 0:
        raise InvalidInputError("max_pairwise_distance requires a nonempty subset")
    if idx.min() < 0 or idx.max() >= dm.shape[0]:
        raise InvalidInputError("subset index out of range")
    if idx.size == 1:
        return 0.0
    return float(dm[np.ix_(idx, idx)].max())
