import json

import numpy as np
import pytest

from gift.errors import (
    BadMagicError,
    EmbeddingFormatError,
    InvalidInputError,
    ShapeError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
)
from gift.formats import (
    dumps_deterministic,
    read_embeddings,
    subsample_candidates,
    sweep_report_csv,
    sweep_report_json,
    write_embeddings,
)


@pytest.fixture
def matrix():
    rng = np.random.default_rng(13)
    return rng.normal(size=(3, 2)).astype(np.float32)


def write_valid(tmp_path, arr, name="emb.npy"):
    path = tmp_path / name
    write_embeddings(path, arr)
    return path


class TestBinaryRoundTrip:
    def test_matrix_round_trip(self, tmp_path, matrix):
        path = write_valid(tmp_path, matrix)
        out = read_embeddings(path)
        assert out.dtype == np.float32 and out.shape == (3, 2)
        assert np.array_equal(out, matrix)

    def test_vector_round_trip(self, tmp_path):
        vec = np.array([1.5, -2.25, 0.125], dtype=np.float32)
        out = read_embeddings(write_valid(tmp_path, vec))
        assert out.shape == (3,) and np.array_equal(out, vec)

    def test_round_trip_is_byte_identical(self, tmp_path, matrix):
        first = write_valid(tmp_path, matrix, "a.npy")
        again = tmp_path / "b.npy"
        write_embeddings(again, read_embeddings(first))
        assert first.read_bytes() == again.read_bytes()

    def test_payload_size_matches_header_arithmetic(self, tmp_path, matrix):
        raw = write_valid(tmp_path, matrix).read_bytes()
        assert raw.endswith(matrix.tobytes())
        assert len(matrix.tobytes()) == 3 * 2 * 4


class TestMalformedFiles:
    def test_bad_magic(self, tmp_path, matrix):
        raw = write_valid(tmp_path, matrix).read_bytes()
        bad = tmp_path / "bad_magic.npy"
        bad.write_bytes(b"XX" + raw[2:])
        with pytest.raises(BadMagicError):
            read_embeddings(bad)

    def test_unsupported_version(self, tmp_path, matrix):
        raw = write_valid(tmp_path, matrix).read_bytes()
        bad = tmp_path / "v2.npy"
        bad.write_bytes(raw[:6] + bytes([2, 0]) + raw[8:])
        with pytest.raises(EmbeddingFormatError, match="version"):
            read_embeddings(bad)

    def test_big_endian_dtype(self, tmp_path, matrix):
        raw = write_valid(tmp_path, matrix).read_bytes()
        bad = tmp_path / "big_endian.npy"
        bad.write_bytes(raw.replace(b"'<f4'", b"'>f4'", 1))
        with pytest.raises(UnsupportedDtypeError):
            read_embeddings(bad)

    def test_wrong_width_dtype(self, tmp_path):
        bad = tmp_path / "f8.npy"
        with open(bad, "wb") as fh:
            np.lib.format.write_array(fh, np.zeros((2, 2), dtype=np.float64), version=(1, 0))
        with pytest.raises(UnsupportedDtypeError):
            read_embeddings(bad)

    def test_fortran_order_rejected(self, tmp_path, matrix):
        raw = write_valid(tmp_path, matrix).read_bytes()
        bad = tmp_path / "fortran.npy"
        bad.write_bytes(raw.replace(b"False", b"True ", 1))
        with pytest.raises(UnsupportedDtypeError, match="Fortran"):
            read_embeddings(bad)

    def test_truncated_payload(self, tmp_path, matrix):
        raw = write_valid(tmp_path, matrix).read_bytes()
        bad = tmp_path / "truncated.npy"
        bad.write_bytes(raw[:-4])
        with pytest.raises(TruncatedPayloadError):
            read_embeddings(bad)

    def test_truncated_header(self, tmp_path, matrix):
        raw = write_valid(tmp_path, matrix).read_bytes()
        bad = tmp_path / "short.npy"
        bad.write_bytes(raw[:9])
        with pytest.raises(TruncatedPayloadError):
            read_embeddings(bad)

    def test_trailing_bytes(self, tmp_path, matrix):
        raw = write_valid(tmp_path, matrix).read_bytes()
        bad = tmp_path / "trailing.npy"
        bad.write_bytes(raw + b"\x00" * 8)
        with pytest.raises(EmbeddingFormatError, match="trailing"):
            read_embeddings(bad)

    def test_three_dimensional_shape(self, tmp_path):
        bad = tmp_path / "cube.npy"
        with open(bad, "wb") as fh:
            np.lib.format.write_array(
                fh, np.zeros((2, 2, 2), dtype=np.float32), version=(1, 0)
            )
        with pytest.raises(ShapeError):
            read_embeddings(bad)

    def test_non_finite_payload(self, tmp_path):
        bad = tmp_path / "nan.npy"
        arr = np.array([[1.0, np.nan]], dtype=np.float32)
        with open(bad, "wb") as fh:
            np.lib.format.write_array(fh, arr, version=(1, 0))
        with pytest.raises(EmbeddingFormatError, match="non-finite"):
            read_embeddings(bad)

    def test_error_classes_are_distinct(self):
        classes = [BadMagicError, UnsupportedDtypeError, ShapeError, TruncatedPayloadError]
        for a in classes:
            for b in classes:
                if a is not b:
                    assert not issubclass(a, b)
            assert issubclass(a, EmbeddingFormatError)


class TestJsonFallback:
    def test_matrix_by_extension(self, tmp_path):
        path = tmp_path / "emb.json"
        path.write_text(json.dumps([[1.0, 2.0], [3.0, 4.0]]))
        out = read_embeddings(path)
        assert out.dtype == np.float32
        assert np.array_equal(out, [[1.0, 2.0], [3.0, 4.0]])

    def test_vector_sniffed_without_extension(self, tmp_path):
        path = tmp_path / "query.data"
        path.write_text("  [1.0, 0.0, -2.5]")
        assert np.array_equal(read_embeddings(path), [1.0, 0.0, -2.5])

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "ragged.json"
        path.write_text(json.dumps([[1.0, 2.0], [3.0]]))
        with pytest.raises(ShapeError):
            read_embeddings(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("[1.0, ")
        with pytest.raises(EmbeddingFormatError):
            read_embeddings(path)

    def test_garbage_file_is_bad_magic(self, tmp_path):
        path = tmp_path / "garbage.bin"
        path.write_bytes(b"\x00\x01\x02\x03 not an array")
        with pytest.raises(BadMagicError):
            read_embeddings(path)


class TestSubsampleCandidates:
    def test_identity_when_pool_covers(self):
        frames = np.arange(20, dtype=np.float32).reshape(10, 2)
        sub, mapping = subsample_candidates(frames, 128)
        assert sub is frames
        assert np.array_equal(mapping, np.arange(10))

    def test_reduces_to_pool_with_increasing_map(self):
        frames = np.arange(512, dtype=np.float32).reshape(256, 2)
        sub, mapping = subsample_candidates(frames, 128)
        assert sub.shape == (128, 2)
        assert np.all(np.diff(mapping) > 0)
        assert mapping.max() < 256
        assert np.array_equal(sub, frames[mapping])

    def test_mapped_indices_always_valid(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(1, 300))
            pool = int(rng.integers(1, 200))
            frames = rng.normal(size=(n, 3)).astype(np.float32)
            _, mapping = subsample_candidates(frames, pool)
            assert mapping.shape[0] == min(n, pool)
            assert mapping.max() < n


class TestReports:
    def make_rows(self):
        from gift.synth import make_corpus, run_sweep

        corpus = make_corpus(9, videos=2, n_frames=24, dim=8, n_events=2, event_span=3)
        return run_sweep(corpus, ["uniform", "gift"], [2], [9])

    def test_csv_header_and_shape(self):
        rows = self.make_rows()
        text = sweep_report_csv(rows)
        lines = text.strip().split("\n")
        assert lines[0] == (
            "policy,K,B,event_recall,frame_recall,temporal_coverage,noise_rate,redundancy"
        )
        assert len(lines) == 3
        assert lines[1].startswith("uniform,2,9,")

    def test_json_report_parses_and_is_deterministic(self):
        rows = self.make_rows()
        doc = sweep_report_json(rows)
        assert doc == sweep_report_json(rows)
        parsed = json.loads(doc)
        assert len(parsed["rows"]) == 2
        assert parsed["rows"][1]["policy"] == "gift"

    def test_dumps_deterministic_rounds_floats(self):
        out = dumps_deterministic({"x": 0.123456789123456789, "y": np.float32(1.5)})
        parsed = json.loads(out)
        assert parsed["x"] == 0.123456789
        assert parsed["y"] == 1.5
