"""FastAPI service wrapping the selection library.

The handlers (:func:`run_select`, :func:`run_bench`) are plain functions
over the pydantic request models, so the CLI can call them in-process
and a deployed server exposes the same behavior over HTTP. All frame
indices in responses are in original-frame space, independent of
candidate subsampling.
"""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from . import __version__
from .baselines import POLICY_NAMES, run_policy
from .core import as_frame_matrix, as_query_vector
from .errors import GiftError, InvalidInputError
from .formats import jsonify, subsample_candidates
from .selector import SelectorConfig
from .synth import make_corpus, run_sweep

__all__ = ["app", "SelectRequest", "BenchRequest", "run_select", "run_bench"]


class SelectRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    frames: list[list[float]]
    query: Optional[list[float]] = None
    relevance: Optional[list[float]] = None
    budget: int = Field(ge=1)
    batch_size: int = Field(default=9, ge=1)
    policy: Literal["gift", "uniform", "toprel", "undirected", "mmr"] = "gift"
    mmr_lambda: float = Field(default=0.5, alias="lambda", ge=0)
    candidates: int = Field(default=128, ge=1)
    normalize: bool = True
    tie_break: Literal["strict", "indexed", "index-ordered"] = "strict"
    order: Literal["temporal", "score", "score-descending"] = "temporal"
    include_trace: bool = Field(default=False, alias="trace")


class SelectResponse(BaseModel):
    selected_indices: list[int]
    scores: Optional[list[float]]
    config: dict
    trace: Optional[list[dict]] = None


class BenchRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    corpus_seed: int = 0
    videos: int = Field(default=50, ge=1)
    policies: list[str] = Field(default=["gift", "uniform"], min_length=1)
    budgets: list[int] = Field(default=[4, 8, 16, 32], min_length=1)
    batch_sizes: list[int] = Field(default=[9], min_length=1)
    n_frames: int = 128
    dim: int = 32
    n_events: int = 3
    event_span: int = 5
    duplicate_rate: float = 0.6
    noise_sigma: float = 0.05
    event_drift: float = 0.9
    mmr_lambda: float = Field(default=0.5, alias="lambda", ge=0)


class BenchResponse(BaseModel):
    rows: list[dict]


def _selection_time_scores(result, picks):
    """Score each frame carried at the iteration it was selected."""
    at_selection = {}
    for rec in result.trace:
        lookup = {int(i): float(s) for i, s in zip(rec.table.indices, rec.table.score)}
        for idx in rec.batch:
            at_selection[idx] = lookup[idx]
    return [at_selection[i] for i in picks]


def _remap_trace(result, index_map):
    """Translate a trace's candidate-space indices to original-frame space."""
    out = []
    for rec in result.trace:
        d = rec.to_dict()
        d["batch"] = [int(index_map[i]) for i in d["batch"]]
        table = d["table"]
        table["indices"] = [int(index_map[i]) for i in table["indices"]]
        table["substitute"] = [
            int(index_map[i]) if i >= 0 else -1 for i in table["substitute"]
        ]
        out.append(d)
    return out


def run_select(req: SelectRequest) -> dict:
    """Subsample candidates, run the requested policy, map back, echo config."""
    frames = as_frame_matrix(req.frames)
    n_total = frames.shape[0]
    query = None
    if req.query is not None:
        query = as_query_vector(req.query, dim=frames.shape[1])
    relevance = None
    if req.relevance is not None:
        relevance = np.asarray(req.relevance, dtype=np.float64)
        if relevance.shape != (n_total,):
            raise InvalidInputError(
                f"relevance length {relevance.shape[0]} != frame count {n_total}"
            )
    if query is None and relevance is None and req.policy != "uniform":
        raise InvalidInputError(f"policy {req.policy!r} requires a query or a relevance vector")

    pool_frames, index_map = subsample_candidates(frames, req.candidates)
    pool_relevance = relevance[index_map] if relevance is not None else None

    cfg = SelectorConfig(
        budget_k=req.budget,
        batch_b=req.batch_size,
        normalize_embeddings=req.normalize,
        substitute_tie_break=req.tie_break,
        output_order=req.order,
    )
    picks, result = run_policy(
        req.policy, pool_frames, query, cfg,
        lam=req.mmr_lambda, relevance_override=pool_relevance,
    )

    selected = [int(index_map[i]) for i in picks]
    if result is not None:
        scores = _selection_time_scores(result, picks)
    elif req.policy in ("toprel", "mmr"):
        from .selector import query_cosines

        r = pool_relevance if pool_relevance is not None else query_cosines(pool_frames, query)
        scores = [float(r[i]) for i in picks]
    else:
        scores = None

    payload = {
        "selected_indices": selected,
        "scores": scores,
        "config": {
            "policy": req.policy,
            "budget": req.budget,
            "batch_size": req.batch_size,
            "candidates": req.candidates,
            "normalize": req.normalize,
            "tie_break": cfg.substitute_tie_break,
            "order": cfg.output_order,
            "lambda": req.mmr_lambda,
            "n_frames_total": n_total,
            "pool_size": int(index_map.shape[0]),
            "subsampled": bool(index_map.shape[0] < n_total),
            "relevance_override": relevance is not None,
        },
    }
    if req.include_trace:
        payload["trace"] = _remap_trace(result, index_map) if result is not None else []
    else:
        payload["trace"] = None
    return jsonify(payload)


def run_bench(req: BenchRequest) -> dict:
    """Build a seeded corpus and sweep every (policy, K, B) cell over it."""
    for name in req.policies:
        if name not in POLICY_NAMES:
            raise InvalidInputError(f"unknown policy {name!r}; expected one of {POLICY_NAMES}")
    corpus = make_corpus(
        req.corpus_seed,
        videos=req.videos,
        n_frames=req.n_frames,
        dim=req.dim,
        n_events=req.n_events,
        event_span=req.event_span,
        duplicate_rate=req.duplicate_rate,
        noise_sigma=req.noise_sigma,
        event_drift=req.event_drift,
    )
    rows = run_sweep(corpus, req.policies, req.budgets, req.batch_sizes, lam=req.mmr_lambda)
    return jsonify({"rows": [row.to_dict() for row in rows]})


app = FastAPI(title="gift-keyframes", version=__version__)


@app.exception_handler(GiftError)
async def _gift_error_handler(request, exc: GiftError):
    return JSONResponse(
        status_code=422,
        content={"error": {"type": type(exc).__name__, "message": str(exc)}},
    )


@app.get("/healthz")
def healthz():
    return {"status": "ok", "version": __version__}


@app.post("/select", response_model=SelectResponse)
def select_endpoint(req: SelectRequest):
    return run_select(req)


@app.post("/bench", response_model=BenchResponse)
def bench_endpoint(req: BenchRequest):
    return run_bench(req)
