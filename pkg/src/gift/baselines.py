"""Reference selectors: uniform, top-relevance, undirected diversity, MMR.

These are the comparison arms for the benchmark harness. The undirected
variant reuses the batched refinement loop but rates a frame by its mean
distance to the whole surviving pool, i.e. diversity without relevance
conditioning. The MMR selector greedily maximizes relevance minus a
weighted redundancy penalty, the conventional decoupled objective.
"""

from __future__ import annotations

import numpy as np

from .core import as_frame_matrix, l2_normalize, pairwise_sq_distances
from .errors import InvalidInputError
from .selector import (
    IterationRecord,
    ScoreTable,
    SelectionResult,
    SelectorConfig,
    _finalize,
    _pick_batch,
    compute_relevance,
    irreplaceability,
    query_cosines,
)

__all__ = [
    "POLICY_NAMES",
    "uniform_select",
    "top_relevance_select",
    "undirected_diversity_select",
    "mmr_greedy_select",
    "run_policy",
]

POLICY_NAMES = ("gift", "uniform", "toprel", "undirected", "mmr")


def uniform_select(n_frames: int, k: int) -> list[int]:
    """k frame indices at equal temporal strides, anchored mid-stride.

    Index i is floor((2*i + 1) * n / (2*k)); strictly increasing for
    k <= n, computed in exact integer arithmetic.
    """
    if n_frames < 1 or k < 1:
        raise InvalidInputError("n_frames and k must be >= 1")
    if k > n_frames:
        raise InvalidInputError(f"k={k} exceeds n_frames={n_frames}")
    return [min(n_frames - 1, (n_frames * (2 * i + 1)) // (2 * k)) for i in range(k)]


def top_relevance_select(r, k: int) -> list[int]:
    """Indices of the k largest relevance values, in temporal order.

    Equal values break toward the smaller index.
    """
    rv = np.asarray(r, dtype=np.float64).ravel()
    if k < 1 or k > rv.shape[0]:
        raise InvalidInputError(f"k={k} out of range for {rv.shape[0]} frames")
    order = np.lexsort((np.arange(rv.shape[0]), -rv))
    return sorted(int(i) for i in order[:k])


def _mean_pool_distance(dm, pool) -> np.ndarray:
    """Mean squared distance from each pool member to the rest of the pool.

    A single-member pool has no pairs; its mean is 0 by convention.
    """
    if pool.size == 1:
        return np.zeros(1, dtype=np.float64)
    d_sub = dm[np.ix_(pool, pool)].astype(np.float64)
    return d_sub.sum(axis=1) / float(pool.size - 1)


def undirected_diversity_select(frames, query, cfg: SelectorConfig, relevance_override=None) -> SelectionResult:
    """The selection loop with relevance-agnostic (mean-distance) diversity.

    Identical pipeline to the directed selector except d_i is the mean
    squared distance to every other surviving frame; there is no
    substitute set and no d_max fallback.
    """
    m = as_frame_matrix(frames)
    n = m.shape[0]
    if cfg.budget_k > n:
        raise InvalidInputError(
            f"budget_k={cfg.budget_k} exceeds the {n}-frame candidate pool"
        )
    if cfg.normalize_embeddings:
        m = l2_normalize(m)
    if relevance_override is not None:
        r = np.asarray(relevance_override, dtype=np.float64).ravel()
        if r.shape[0] != n:
            raise InvalidInputError(
                f"relevance override length {r.shape[0]} != frame count {n}"
            )
    else:
        r = compute_relevance(m, query)
    dm = pairwise_sq_distances(m)
    d_max = float(dm.max())

    pool = np.arange(n, dtype=np.int64)
    selected: list[int] = []
    trace: list[IterationRecord] = []
    iteration = 0
    while len(selected) < cfg.budget_k:
        iteration += 1
        d = _mean_pool_distance(dm, pool)
        s = irreplaceability(r[pool], d)
        b = min(cfg.batch_b, cfg.budget_k - len(selected))
        batch = _pick_batch(pool, s, b)
        trace.append(
            IterationRecord(
                iteration=iteration,
                pool_size=int(pool.size),
                batch=batch,
                table=ScoreTable(
                    indices=pool.copy(),
                    relevance=r[pool].copy(),
                    diversity=d,
                    score=s,
                    substitute=np.full(pool.size, -1, dtype=np.int64),
                ),
            )
        )
        selected.extend(batch)
        pool = np.setdiff1d(pool, np.asarray(batch, dtype=np.int64), assume_unique=True)
    return _finalize(selected, trace, d_max, cfg)


def mmr_greedy_select(frames, query, k: int, lam: float = 0.5) -> list[int]:
    """Greedy maximization of relevance minus lam-weighted redundancy.

    At each step adds the frame maximizing
    cos(f_i, q) - lam * sum over selected j of cos(f_i, f_j),
    breaking ties toward the smaller index. Output is in temporal order.
    Cosines are scale-invariant, so embedding normalization is a no-op
    here.
    """
    m = as_frame_matrix(frames)
    n = m.shape[0]
    if k < 1 or k > n:
        raise InvalidInputError(f"k={k} out of range for {n} frames")
    if not np.isfinite(lam) or lam < 0:
        raise InvalidInputError(f"lambda must be finite and >= 0, got {lam}")
    rel = query_cosines(m, query)
    mn = l2_normalize(m).astype(np.float64)
    sims = np.clip(mn @ mn.T, -1.0, 1.0)

    selected: list[int] = []
    remaining = np.arange(n, dtype=np.int64)
    penalty = np.zeros(n, dtype=np.float64)
    for _ in range(k):
        scores = rel[remaining] - lam * penalty[remaining]
        order = np.lexsort((remaining, -scores))
        pick = int(remaining[order[0]])
        selected.append(pick)
        penalty += sims[:, pick]
        remaining = remaining[remaining != pick]
    return sorted(selected)


def run_policy(name, frames, query, cfg: SelectorConfig, lam: float = 0.5,
               relevance_override=None):
    """Dispatch a policy by name; returns (selected_indices, result_or_none).

    ``result_or_none`` is the full SelectionResult for the loop-based
    policies and None for the index-list baselines.
    """
    from .selector import select

    if name == "gift":
        res = select(frames, query, cfg, relevance_override=relevance_override)
        return res.selected, res
    if name == "undirected":
        res = undirected_diversity_select(frames, query, cfg, relevance_override=relevance_override)
        return res.selected, res
    if name == "uniform":
        n = as_frame_matrix(frames).shape[0]
        return uniform_select(n, cfg.budget_k), None
    if name == "toprel":
        r = relevance_override if relevance_override is not None else query_cosines(frames, query)
        return top_relevance_select(r, cfg.budget_k), None
    if name == "mmr":
        return mmr_greedy_select(frames, query, cfg.budget_k, lam), None
    raise InvalidInputError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")
