"""Embedding file I/O, candidate subsampling, and report serialization.

The embedding carrier is the standard binary array format (magic
``\\x93NUMPY``, version 1.0, little-endian float32, C order), so files
interoperate with the wider ecosystem; a JSON array-of-arrays fallback
covers hand-authored fixtures. Malformed files fail with a distinct
error per defect class rather than producing garbage data.

JSON and CSV emitters round floats to 9 significant digits, which
round-trips 32-bit values exactly and keeps output byte-deterministic.
"""

from __future__ import annotations

import ast
import json
import struct
from pathlib import Path

import numpy as np

from .baselines import uniform_select
from .errors import (
    BadMagicError,
    EmbeddingFormatError,
    InvalidInputError,
    ShapeError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
)

__all__ = [
    "read_embeddings",
    "write_embeddings",
    "subsample_candidates",
    "REPORT_COLUMNS",
    "sweep_report_csv",
    "sweep_report_json",
    "jsonify",
    "dumps_deterministic",
]

MAGIC = b"\x93NUMPY"
SUPPORTED_DESCR = "<f4"

REPORT_COLUMNS = (
    "policy", "K", "B",
    "event_recall", "frame_recall", "temporal_coverage", "noise_rate", "redundancy",
)


def _round9(x: float) -> float:
    return float(format(float(x), ".9g"))


def jsonify(obj):
    """Recursively convert to JSON-ready types, rounding floats to 9 digits."""
    if isinstance(obj, dict):
        return {k: jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round9(obj)
    return obj


def dumps_deterministic(obj) -> str:
    """Serialize with fixed key order and fixed float precision."""
    return json.dumps(jsonify(obj), indent=2)


def _parse_json_embeddings(text: str, path) -> np.ndarray:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise EmbeddingFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, list) or not data:
        raise ShapeError(f"{path}: JSON payload must be a nonempty array")
    if isinstance(data[0], list):
        widths = {len(row) for row in data}
        if not all(isinstance(row, list) for row in data) or len(widths) != 1 or 0 in widths:
            raise ShapeError(f"{path}: JSON rows must be equal-length nonempty arrays")
        arr = np.asarray(data, dtype=np.float64)
    else:
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 1:
            raise ShapeError(f"{path}: JSON payload must be a vector or matrix")
    if not np.all(np.isfinite(arr)):
        raise EmbeddingFormatError(f"{path}: embeddings contain non-finite values")
    return arr.astype(np.float32)


def read_embeddings(path) -> np.ndarray:
    """Parse an embedding file into a float32 vector or matrix.

    Accepts the binary array format (version 1.0, ``<f4``, C order) and
    JSON arrays. Raises BadMagicError, UnsupportedDtypeError, ShapeError
    or TruncatedPayloadError naming the specific defect.
    """
    p = Path(path)
    raw = p.read_bytes()
    if p.suffix.lower() == ".json":
        return _parse_json_embeddings(raw.decode("utf-8"), p)
    if raw[: len(MAGIC)] != MAGIC:
        stripped = raw.lstrip()
        if stripped[:1] in (b"[", b"{"):
            return _parse_json_embeddings(raw.decode("utf-8"), p)
        raise BadMagicError(
            f"{p}: file does not start with the \\x93NUMPY magic bytes"
        )
    if len(raw) < 10:
        raise TruncatedPayloadError(f"{p}: file ends inside the format header")
    major, minor = raw[6], raw[7]
    if (major, minor) != (1, 0):
        raise EmbeddingFormatError(
            f"{p}: format version {major}.{minor} not supported; expected 1.0"
        )
    (hlen,) = struct.unpack("<H", raw[8:10])
    header_end = 10 + hlen
    if len(raw) < header_end:
        raise TruncatedPayloadError(f"{p}: file ends inside the header dictionary")
    try:
        header = ast.literal_eval(raw[10:header_end].decode("latin1").strip())
        descr = header["descr"]
        fortran = header["fortran_order"]
        shape = header["shape"]
    except Exception as exc:
        raise EmbeddingFormatError(f"{p}: malformed header dictionary") from exc
    if descr != SUPPORTED_DESCR:
        raise UnsupportedDtypeError(
            f"{p}: dtype {descr!r} not supported; expected little-endian float32 '<f4'"
        )
    if fortran:
        raise UnsupportedDtypeError(f"{p}: Fortran-order payload not supported")
    if not (
        isinstance(shape, tuple)
        and len(shape) in (1, 2)
        and all(isinstance(s, int) and s >= 1 for s in shape)
    ):
        raise ShapeError(f"{p}: shape {shape!r} is not a 1-D vector or 2-D matrix")
    expected = int(np.prod(shape)) * 4
    payload = raw[header_end:]
    if len(payload) < expected:
        raise TruncatedPayloadError(
            f"{p}: payload has {len(payload)} bytes, shape {shape} needs {expected}"
        )
    if len(payload) > expected:
        raise EmbeddingFormatError(
            f"{p}: {len(payload) - expected} trailing bytes after the declared payload"
        )
    arr = np.frombuffer(payload, dtype="<f4").reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise EmbeddingFormatError(f"{p}: embeddings contain non-finite values")
    return np.array(arr)


def write_embeddings(path, arr) -> None:
    """Write a float32 vector or matrix in the binary format (v1.0)."""
    a = np.ascontiguousarray(np.asarray(arr, dtype=np.float32))
    if a.ndim not in (1, 2) or a.size == 0:
        raise ShapeError(f"cannot write array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise EmbeddingFormatError("refusing to write non-finite embeddings")
    with open(path, "wb") as fh:
        np.lib.format.write_array(fh, a, version=(1, 0))


def subsample_candidates(frames: np.ndarray, pool: int):
    """Reduce a frame matrix to at most ``pool`` uniformly spread rows.

    Returns ``(subsampled, index_map)`` where ``index_map[i]`` is the
    original frame index of subsampled row i. Identity when the matrix
    already fits the pool.
    """
    if pool < 1:
        raise InvalidInputError(f"candidate pool must be >= 1, got {pool}")
    n = frames.shape[0]
    if n <= pool:
        return frames, np.arange(n, dtype=np.int64)
    keep = np.asarray(uniform_select(n, pool), dtype=np.int64)
    return frames[keep], keep


def _row_dict(row) -> dict:
    return row.to_dict() if hasattr(row, "to_dict") else dict(row)


def sweep_report_csv(rows) -> str:
    """Render sweep rows as CSV with the documented column order."""
    lines = [",".join(REPORT_COLUMNS)]
    for row in rows:
        d = _row_dict(row)
        cells = [str(d["policy"]), str(d["K"]), str(d["B"])]
        cells += [format(float(d[c]), ".9g") for c in REPORT_COLUMNS[3:]]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def sweep_report_json(rows) -> str:
    """Render sweep rows as a deterministic JSON document."""
    return dumps_deterministic({"rows": [_row_dict(row) for row in rows]}) + "\n"
