"""Irreplaceability-based keyframe selection.

A frame scores high only when it is both query-relevant and visually
remote from every frame that is *more* relevant than it (its potential
substitutes). Selection runs as a batched refinement loop: pick the
top-scoring batch, drop it from the candidate pool, and re-derive the
diversity term over the survivors, which releases the suppression the
removed frames exerted on their neighbors.

Two entry points compute the same thing: :func:`select` re-derives the
diversity term from scratch every iteration, while
:func:`select_incremental` only touches rows whose recorded substitute
was removed. Their outputs are bit-identical by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    as_frame_matrix,
    as_query_vector,
    l2_normalize,
    minmax_normalize,
    pairwise_sq_distances,
)
from .errors import InvalidInputError, ZeroNormError

__all__ = [
    "SelectorConfig",
    "ScoreTable",
    "IterationRecord",
    "SelectionResult",
    "query_cosines",
    "compute_relevance",
    "directed_diversity",
    "irreplaceability",
    "select",
    "select_incremental",
]

TIE_BREAK_ALIASES = {"strict": "strict", "indexed": "index-ordered", "index-ordered": "index-ordered"}
ORDER_ALIASES = {"temporal": "temporal", "score": "score-descending", "score-descending": "score-descending"}


@dataclass(frozen=True)
class SelectorConfig:
    """Knobs for one selection run.

    budget_k: number of frames to select (K).
    batch_b: frames taken per refinement iteration (B, default 9).
    normalize_embeddings: unit-normalize rows before distances, making
        them a monotone function of cosine dissimilarity.
    substitute_tie_break: "strict" admits only strictly more relevant
        frames as substitutes; "index-ordered" additionally admits
        equal-relevance frames with a smaller index, so exact duplicates
        suppress each other.
    output_order: "temporal" (ascending frame index) or
        "score-descending" (batches in selection order, each sorted by
        descending selection-time score).
    """

    budget_k: int
    batch_b: int = 9
    normalize_embeddings: bool = True
    substitute_tie_break: str = "strict"
    output_order: str = "temporal"

    def __post_init__(self):
        if self.budget_k < 1:
            raise InvalidInputError(f"budget_k must be >= 1, got {self.budget_k}")
        if self.batch_b < 1:
            raise InvalidInputError(f"batch_b must be >= 1, got {self.batch_b}")
        tb = TIE_BREAK_ALIASES.get(self.substitute_tie_break)
        if tb is None:
            raise InvalidInputError(
                f"unknown substitute_tie_break {self.substitute_tie_break!r}"
            )
        object.__setattr__(self, "substitute_tie_break", tb)
        order = ORDER_ALIASES.get(self.output_order)
        if order is None:
            raise InvalidInputError(f"unknown output_order {self.output_order!r}")
        object.__setattr__(self, "output_order", order)


@dataclass
class ScoreTable:
    """Per-candidate scores for one iteration.

    ``indices`` are the frame indices the other arrays align to.
    ``substitute`` holds the index attaining each frame's diversity
    minimum, or -1 when the frame had no substitute and fell back to the
    pool-wide maximum distance.
    """

    indices: np.ndarray
    relevance: np.ndarray
    diversity: np.ndarray
    score: np.ndarray
    substitute: np.ndarray

    def to_dict(self):
        return {
            "indices": self.indices.tolist(),
            "relevance": self.relevance.tolist(),
            "diversity": self.diversity.tolist(),
            "score": self.score.tolist(),
            "substitute": self.substitute.tolist(),
        }


@dataclass
class IterationRecord:
    iteration: int
    pool_size: int
    batch: list[int]
    table: ScoreTable

    def to_dict(self):
        return {
            "iteration": self.iteration,
            "pool_size": self.pool_size,
            "batch": list(self.batch),
            "table": self.table.to_dict(),
        }


@dataclass
class SelectionResult:
    """Selected frame indices plus the full per-iteration trace."""

    selected: list[int]
    trace: list[IterationRecord]
    d_max: float
    config: SelectorConfig = field(repr=False, default=None)

    def to_dict(self, include_trace=True):
        out = {
            "selected": list(self.selected),
            "d_max": self.d_max,
        }
        if include_trace:
            out["trace"] = [rec.to_dict() for rec in self.trace]
        return out


def query_cosines(frames, query) -> np.ndarray:
    """Raw cosine similarity of every frame row against the query.

    Float64 accumulation, clamped to [-1, 1]. A zero-norm frame row
    raises ZeroNormError carrying the row index.
    """
    m = as_frame_matrix(frames)
    q = as_query_vector(query, dim=m.shape[1])
    x = m.astype(np.float64)
    qv = q.astype(np.float64)
    norms = np.linalg.norm(x, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        row = int(zero[0])
        raise ZeroNormError(f"frame row {row} has zero norm", index=row)
    raw = (x @ qv) / (norms * np.linalg.norm(qv))
    return np.clip(raw, -1.0, 1.0)


def compute_relevance(frames, query) -> np.ndarray:
    """Per-frame relevance: min-max normalized query cosines, in [0, 1].

    Computed once per selection run; the refinement loop never touches it.
    """
    return minmax_normalize(query_cosines(frames, query))


def _substitute_mask(r_pool: np.ndarray, pool: np.ndarray, tie_break: str) -> np.ndarray:
    """mask[a, b] is True when pool[b] is a potential substitute for pool[a]."""
    mask = r_pool[None, :] > r_pool[:, None]
    if tie_break == "index-ordered":
        mask |= (r_pool[None, :] == r_pool[:, None]) & (pool[None, :] < pool[:, None])
    return mask


def directed_diversity(dm, r, candidates, d_max, tie_break="strict"):
    """Diversity of each candidate against its potential substitutes.

    For candidate i, the substitute set is every other candidate with
    strictly higher relevance (plus, under "index-ordered", equal
    relevance and a smaller index). Diversity is the minimum squared
    distance to that set, or ``d_max`` when the set is empty. Returns
    ``(d, substitute)`` aligned to the sorted candidate list; substitute
    is the index attaining the minimum (smallest index on distance
    ties), or -1 for the fallback case.
    """
    pool = np.unique(np.asarray(list(candidates), dtype=np.int64))
    if pool.size == 0:
        raise InvalidInputError("directed_diversity requires a nonempty candidate set")
    if pool[0] < 0 or pool[-1] >= dm.shape[0]:
        raise InvalidInputError("candidate index out of range")
    if d_max < 0:
        raise InvalidInputError("d_max must be >= 0")
    r = np.asarray(r, dtype=np.float64)
    if r.shape[0] <= pool[-1]:
        raise InvalidInputError(
            f"relevance vector of length {r.shape[0]} does not cover candidate {pool[-1]}"
        )
    tie_break = TIE_BREAK_ALIASES[tie_break]

    d_sub = dm[np.ix_(pool, pool)].astype(np.float64)
    mask = _substitute_mask(r[pool], pool, tie_break)
    masked = np.where(mask, d_sub, np.inf)
    has_sub = mask.any(axis=1)
    d = masked.min(axis=1)
    sub = pool[masked.argmin(axis=1)]
    d[~has_sub] = float(d_max)
    sub[~has_sub] = -1
    return d, sub


def irreplaceability(r, d) -> np.ndarray:
    """Element-wise product of relevance and diversity."""
    rv = np.asarray(r, dtype=np.float64)
    dv = np.asarray(d, dtype=np.float64)
    if rv.shape != dv.shape:
        raise InvalidInputError(
            f"relevance and diversity lengths differ: {rv.shape} vs {dv.shape}"
        )
    return rv * dv


def _prepare(frames, query, cfg, relevance_override):
    """Shared pre-loop phase: validation, relevance, distances, d_max."""
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
        if not np.all(np.isfinite(r)):
            raise InvalidInputError("relevance override must be finite")
    else:
        r = compute_relevance(m, query)
    dm = pairwise_sq_distances(m)
    d_max = float(dm.max())
    return m, r, dm, d_max


def _pick_batch(pool, s, b):
    """Top-b candidates by score, equal scores broken by smaller index."""
    order = np.lexsort((pool, -s))
    return [int(i) for i in pool[order[:b]]]


def _finalize(selected, trace, d_max, cfg):
    if cfg.output_order == "temporal":
        ordered = sorted(selected)
    else:
        ordered = list(selected)
    return SelectionResult(selected=ordered, trace=trace, d_max=d_max, config=cfg)


def select(frames, query, cfg: SelectorConfig, relevance_override=None) -> SelectionResult:
    """Batched-refinement selection, re-scoring diversity from scratch.

    Relevance and the fallback distance ``d_max`` are fixed before the
    loop; each iteration re-derives diversity over the surviving pool,
    scores ``s = r * d``, takes the ``min(B, K - selected)`` best frames
    (ties to the smaller index), and removes them from the pool.

    ``relevance_override`` bypasses the cosine computation with a caller
    supplied per-frame relevance vector; selection semantics are
    otherwise unchanged.
    """
    m, r, dm, d_max = _prepare(frames, query, cfg, relevance_override)
    pool = np.arange(m.shape[0], dtype=np.int64)
    selected: list[int] = []
    trace: list[IterationRecord] = []
    iteration = 0
    while len(selected) < cfg.budget_k:
        iteration += 1
        d, sub = directed_diversity(dm, r, pool, d_max, cfg.substitute_tie_break)
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
                    substitute=sub,
                ),
            )
        )
        selected.extend(batch)
        pool = np.setdiff1d(pool, np.asarray(batch, dtype=np.int64), assume_unique=True)
    return _finalize(selected, trace, d_max, cfg)


def _recompute_rows(dm, r, pool, rows, d_max, tie_break, d_all, sub_all):
    """Re-derive diversity for ``rows`` against the current pool, in place."""
    r_pool = r[pool]
    for i in rows:
        if tie_break == "index-ordered":
            m = (r_pool > r[i]) | ((r_pool == r[i]) & (pool < i))
        else:
            m = r_pool > r[i]
        if m.any():
            row = np.where(m, dm[i, pool].astype(np.float64), np.inf)
            j = int(np.argmin(row))
            d_all[i] = row[j]
            sub_all[i] = int(pool[j])
        else:
            d_all[i] = float(d_max)
            sub_all[i] = -1


def select_incremental(frames, query, cfg: SelectorConfig, relevance_override=None) -> SelectionResult:
    """Same output as :func:`select`, recomputing only invalidated rows.

    After a batch is removed, a surviving frame's diversity can change
    only if its recorded substitute was in the batch: the substitute set
    only shrinks, so a minimum whose argmin survives is untouched, and a
    frame already on the ``d_max`` fallback stays there. Rows whose
    substitute was removed are re-derived against the current pool
    (possibly promoting them to the fallback).
    """
    m, r, dm, d_max = _prepare(frames, query, cfg, relevance_override)
    n = m.shape[0]
    pool = np.arange(n, dtype=np.int64)
    d_all = np.zeros(n, dtype=np.float64)
    sub_all = np.full(n, -1, dtype=np.int64)

    d, sub = directed_diversity(dm, r, pool, d_max, cfg.substitute_tie_break)
    d_all[pool] = d
    sub_all[pool] = sub

    selected: list[int] = []
    trace: list[IterationRecord] = []
    iteration = 0
    while True:
        iteration += 1
        s = irreplaceability(r[pool], d_all[pool])
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
                    diversity=d_all[pool].copy(),
                    score=s,
                    substitute=sub_all[pool].copy(),
                ),
            )
        )
        selected.extend(batch)
        pool = np.setdiff1d(pool, np.asarray(batch, dtype=np.int64), assume_unique=True)
        if len(selected) >= cfg.budget_k:
            break
        stale = pool[np.isin(sub_all[pool], np.asarray(batch, dtype=np.int64))]
        _recompute_rows(dm, r, pool, stale, d_max, cfg.substitute_tie_break, d_all, sub_all)
    return _finalize(selected, trace, d_max, cfg)
