"""Command-line surface: a thin client over the service handlers.

``gift select`` and ``gift bench`` build the same request models the
HTTP endpoints accept and run them in-process by default; ``--server``
sends the identical request to a running instance instead. ``gift
serve`` starts that instance.

Exit codes: 0 success, 2 usage, 3 file/format error, 4 invalid
selection or benchmark input, 5 server unreachable or server-side
failure. Runtime failures print a JSON error object to stdout.
"""

from __future__ import annotations

import sys

import click
import httpx

from .errors import EmbeddingFormatError, GiftError
from .formats import (
    dumps_deterministic,
    read_embeddings,
    sweep_report_csv,
    sweep_report_json,
)

EXIT_FILE = 3
EXIT_INVALID = 4
EXIT_SERVER = 5

POLICY_CHOICES = ["gift", "uniform", "toprel", "undirected", "mmr"]


def _fail(code: int, err_type: str, message: str):
    click.echo(dumps_deterministic({"error": {"type": err_type, "message": message}}))
    sys.exit(code)


def _load_matrix(path):
    try:
        arr = read_embeddings(path)
    except EmbeddingFormatError as exc:
        _fail(EXIT_FILE, type(exc).__name__, str(exc))
    except OSError as exc:
        _fail(EXIT_FILE, "FileError", str(exc))
    if arr.ndim != 2:
        _fail(EXIT_FILE, "ShapeError", f"{path}: expected a 2-D frame matrix, got shape {arr.shape}")
    return arr


def _load_vector(path, what):
    try:
        arr = read_embeddings(path)
    except EmbeddingFormatError as exc:
        _fail(EXIT_FILE, type(exc).__name__, str(exc))
    except OSError as exc:
        _fail(EXIT_FILE, "FileError", str(exc))
    if arr.ndim != 1:
        _fail(EXIT_FILE, "ShapeError", f"{path}: expected a 1-D {what} vector, got shape {arr.shape}")
    return arr


def _post(server, endpoint, body):
    try:
        resp = httpx.post(f"{server.rstrip('/')}{endpoint}", json=body, timeout=300.0)
    except httpx.HTTPError as exc:
        _fail(EXIT_SERVER, "ServerError", f"request to {server} failed: {exc}")
    if resp.status_code == 200:
        return resp.json()
    try:
        err = resp.json()["error"]
        _fail(EXIT_INVALID, err.get("type", "ServerError"), err.get("message", resp.text))
    except (KeyError, ValueError):
        _fail(EXIT_SERVER, "ServerError", f"HTTP {resp.status_code}: {resp.text[:500]}")


@click.group()
def main():
    """Keyframe selection over precomputed embeddings."""


@main.command("select")
@click.option("--frames", "frames_path", required=True, help="Frame embedding file (N x D).")
@click.option("--query", "query_path", default=None, help="Query embedding file (D).")
@click.option("--relevance", "relevance_path", default=None,
              help="Precomputed per-frame relevance file (N), bypassing the query cosine.")
@click.option("--budget", required=True, type=click.IntRange(min=1), help="Frames to select (K).")
@click.option("--batch-size", default=9, show_default=True, type=click.IntRange(min=1),
              help="Frames removed per refinement iteration (B).")
@click.option("--policy", default="gift", show_default=True, type=click.Choice(POLICY_CHOICES))
@click.option("--lambda", "mmr_lambda", default=0.5, show_default=True, type=float,
              help="Redundancy weight for the mmr policy.")
@click.option("--candidates", default=128, show_default=True, type=click.IntRange(min=1),
              help="Uniformly subsample to at most this many candidate frames first.")
@click.option("--no-normalize", is_flag=True, help="Skip unit-normalizing embedding rows.")
@click.option("--tie-break", default="strict", show_default=True,
              type=click.Choice(["strict", "indexed"]))
@click.option("--order", default="temporal", show_default=True,
              type=click.Choice(["temporal", "score"]))
@click.option("--trace", is_flag=True, help="Include the per-iteration score tables.")
@click.option("--server", default=None, help="POST to a running service instead of in-process.")
def select_cmd(frames_path, query_path, relevance_path, budget, batch_size, policy,
               mmr_lambda, candidates, no_normalize, tie_break, order, trace, server):
    """Select keyframes and print the result as JSON."""
    if query_path is None and relevance_path is None and policy != "uniform":
        raise click.UsageError(f"policy '{policy}' needs --query or --relevance")
    frames = _load_matrix(frames_path)
    query = _load_vector(query_path, "query") if query_path else None
    relevance = _load_vector(relevance_path, "relevance") if relevance_path else None

    body = {
        "frames": frames.tolist(),
        "query": query.tolist() if query is not None else None,
        "relevance": relevance.tolist() if relevance is not None else None,
        "budget": budget,
        "batch_size": batch_size,
        "policy": policy,
        "lambda": mmr_lambda,
        "candidates": candidates,
        "normalize": not no_normalize,
        "tie_break": tie_break,
        "order": order,
        "trace": trace,
    }
    if server:
        payload = _post(server, "/select", body)
    else:
        from .service import SelectRequest, run_select

        try:
            payload = run_select(SelectRequest(**body))
        except GiftError as exc:
            _fail(EXIT_INVALID, type(exc).__name__, str(exc))
    click.echo(dumps_deterministic(payload))


def _csv_ints(value, flag):
    parts = [p.strip() for p in value.split(",") if p.strip()]
    if not parts:
        raise click.UsageError(f"{flag} must list at least one value")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise click.UsageError(f"{flag} must be comma-separated integers, got {value!r}")


@main.command("bench")
@click.option("--corpus-seed", default=0, show_default=True, type=int)
@click.option("--videos", default=50, show_default=True, type=click.IntRange(min=1))
@click.option("--policies", default="gift,uniform", show_default=True,
              help="Comma-separated policy names.")
@click.option("--budgets", default="4,8,16,32", show_default=True,
              help="Comma-separated frame budgets (K).")
@click.option("--batch-sizes", default="9", show_default=True,
              help="Comma-separated refinement batch sizes (B).")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--format", "fmt", default="csv", show_default=True,
              type=click.Choice(["csv", "json"]))
@click.option("--video-frames", default=128, show_default=True, type=click.IntRange(min=1))
@click.option("--dim", default=32, show_default=True, type=click.IntRange(min=3))
@click.option("--events", default=3, show_default=True, type=click.IntRange(min=1))
@click.option("--span", default=5, show_default=True, type=click.IntRange(min=1))
@click.option("--duplicate-rate", default=0.6, show_default=True, type=float)
@click.option("--noise-sigma", default=0.05, show_default=True, type=float)
@click.option("--event-drift", default=0.9, show_default=True, type=float)
@click.option("--lambda", "mmr_lambda", default=0.5, show_default=True, type=float)
@click.option("--server", default=None, help="POST to a running service instead of in-process.")
def bench_cmd(corpus_seed, videos, policies, budgets, batch_sizes, out_path, fmt,
              video_frames, dim, events, span, duplicate_rate, noise_sigma,
              event_drift, mmr_lambda, server):
    """Run a synthetic-corpus sweep and write the report file."""
    policy_list = [p.strip() for p in policies.split(",") if p.strip()]
    if not policy_list:
        raise click.UsageError("--policies must list at least one policy")
    for p in policy_list:
        if p not in POLICY_CHOICES:
            raise click.UsageError(f"unknown policy {p!r}; choose from {POLICY_CHOICES}")
    body = {
        "corpus_seed": corpus_seed,
        "videos": videos,
        "policies": policy_list,
        "budgets": _csv_ints(budgets, "--budgets"),
        "batch_sizes": _csv_ints(batch_sizes, "--batch-sizes"),
        "n_frames": video_frames,
        "dim": dim,
        "n_events": events,
        "event_span": span,
        "duplicate_rate": duplicate_rate,
        "noise_sigma": noise_sigma,
        "event_drift": event_drift,
        "lambda": mmr_lambda,
    }
    if server:
        payload = _post(server, "/bench", body)
    else:
        from .service import BenchRequest, run_bench

        try:
            payload = run_bench(BenchRequest(**body))
        except GiftError as exc:
            _fail(EXIT_INVALID, type(exc).__name__, str(exc))

    rows = payload["rows"]
    report = sweep_report_csv(rows) if fmt == "csv" else sweep_report_json(rows)
    with open(out_path, "w") as fh:
        fh.write(report)
    for row in rows:
        click.echo(
            "policy={policy} K={K} B={B} event_recall={event_recall:.4f} "
            "frame_recall={frame_recall:.4f} temporal_coverage={temporal_coverage:.4f} "
            "noise_rate={noise_rate:.4f} redundancy={redundancy:.4f}".format(**row)
        )
    click.echo(f"wrote {fmt} report with {len(rows)} cells to {out_path}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve_cmd(host, port):
    """Start the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
