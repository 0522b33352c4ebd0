"""Extraction job: decode, embed, write the selector's file formats."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .decode import decode_frames
from .encoders import load_encoder
from .errors import ExtractorError


@dataclass(frozen=True)
class ExtractionJob:
    video: Path
    query: str
    out_dir: Path
    max_frames: int = 128
    sample_fps: float = 1.0
    encoder: str = "siglip"
    model_name: str | None = None

    def __post_init__(self):
        if not str(self.query).strip():
            raise ExtractorError("query text must be nonempty")
        if self.max_frames < 1:
            raise ExtractorError("max_frames must be >= 1")
        if self.sample_fps <= 0:
            raise ExtractorError("fps must be > 0")


def _write_array(path, arr):
    a = np.ascontiguousarray(np.asarray(arr, dtype=np.float32))
    with open(path, "wb") as fh:
        np.lib.format.write_array(fh, a, version=(1, 0))


def run_extraction(job: ExtractionJob) -> dict:
    """Produce frames.npy, query.npy, and manifest.json in job.out_dir.

    Frame embeddings are written raw (not unit-normalized) in decode
    order; normalization is the selector's configurable concern.
    """
    frames, timestamps, native_fps = decode_frames(
        job.video, sample_fps=job.sample_fps, max_frames=job.max_frames
    )
    encoder = load_encoder(job.encoder, job.model_name)
    frame_embeddings = encoder.encode_images(frames)
    query_embedding = encoder.encode_text(job.query)

    out = Path(job.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_array(out / "frames.npy", frame_embeddings)
    _write_array(out / "query.npy", query_embedding)

    manifest = {
        "encoder": encoder.name,
        "dim": int(frame_embeddings.shape[1]),
        "n_frames": int(frame_embeddings.shape[0]),
        "video": str(job.video),
        "query": job.query,
        "native_fps": float(native_fps),
        "sample_fps": float(job.sample_fps),
        "max_frames": int(job.max_frames),
        "timestamps": [round(float(t), 6) for t in timestamps],
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
