"""Dual image/text encoders.

"siglip" loads a pretrained dual encoder through transformers and needs
its weights available locally or downloadable. "hash" is a fully
deterministic offline stand-in: image features are standardized 16x16
RGB thumbnails and text features are hashed character trigrams, both
pushed through one fixed random projection so the two modalities land
in the same space. It exists so pipelines and tests can run without
model weights; it carries no semantics.
"""

from __future__ import annotations

import hashlib

import cv2
import numpy as np

from .errors import EncoderLoadError

HASH_FEATURE_BINS = 768
HASH_DIM = 256
_PROJECTION_SEED = 0x5EED


class HashEncoder:
    """Deterministic offline encoder with a shared projection space."""

    name = f"hash-v1-d{HASH_DIM}"
    dim = HASH_DIM

    def __init__(self):
        rng = np.random.default_rng(_PROJECTION_SEED)
        # one extra bias row keeps constant inputs away from the zero vector
        self._projection = rng.standard_normal((HASH_FEATURE_BINS + 1, HASH_DIM))
        self._projection /= np.sqrt(HASH_FEATURE_BINS + 1)

    def _project(self, features: np.ndarray) -> np.ndarray:
        scale = float(np.abs(features).max())
        if scale > 0:
            features = features / scale
        augmented = np.concatenate([features, [1.0]])
        return (augmented @ self._projection).astype(np.float32)

    def encode_images(self, frames_bgr) -> np.ndarray:
        rows = []
        for frame in frames_bgr:
            thumb = cv2.resize(frame, (16, 16), interpolation=cv2.INTER_AREA)
            rgb = cv2.cvtColor(thumb, cv2.COLOR_BGR2RGB)
            rows.append(self._project(rgb.astype(np.float64).ravel() / 255.0))
        return np.stack(rows)

    def encode_text(self, text: str) -> np.ndarray:
        bins = np.zeros(HASH_FEATURE_BINS, dtype=np.float64)
        padded = f"  {text.lower()}  "
        for i in range(len(padded) - 2):
            trigram = padded[i : i + 3].encode("utf-8")
            digest = hashlib.blake2b(trigram, digest_size=4).digest()
            bins[int.from_bytes(digest, "little") % HASH_FEATURE_BINS] += 1.0
        return self._project(bins)


class SiglipEncoder:
    """Pretrained dual encoder via transformers (weights required)."""

    def __init__(self, model_name="google/siglip-base-patch16-224"):
        self.name = model_name
        try:
            import torch
            from PIL import Image
            from transformers import AutoModel, AutoProcessor

            self._torch = torch
            self._image_cls = Image
            self._processor = AutoProcessor.from_pretrained(model_name)
            self._model = AutoModel.from_pretrained(model_name)
            self._model.eval()
        except Exception as exc:
            raise EncoderLoadError(f"cannot load encoder {model_name!r}: {exc}") from exc
        self.dim = int(self._model.config.text_config.hidden_size)

    def encode_images(self, frames_bgr) -> np.ndarray:
        images = [
            self._image_cls.fromarray(cv2.cvtColor(f, cv2.COLOR_BGR2RGB))
            for f in frames_bgr
        ]
        with self._torch.no_grad():
            inputs = self._processor(images=images, return_tensors="pt")
            feats = self._model.get_image_features(**inputs)
        return feats.cpu().numpy().astype(np.float32)

    def encode_text(self, text: str) -> np.ndarray:
        with self._torch.no_grad():
            inputs = self._processor(
                text=[text], return_tensors="pt", padding="max_length", truncation=True
            )
            feats = self._model.get_text_features(**inputs)
        return feats.cpu().numpy()[0].astype(np.float32)


def load_encoder(kind: str, model_name=None):
    if kind == "hash":
        return HashEncoder()
    if kind == "siglip":
        if model_name:
            return SiglipEncoder(model_name)
        return SiglipEncoder()
    raise EncoderLoadError(f"unknown encoder kind {kind!r}")
