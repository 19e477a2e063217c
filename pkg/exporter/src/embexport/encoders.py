"""Encoder resolution.

``hash:<dim>`` selects the built-in character-trigram hashing encoder,
which needs no model download and is deterministic across platforms.
Any other model id is loaded as a sentence-transformers model and run in
inference mode, batch by batch.
"""

from __future__ import annotations

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


class EncoderError(RuntimeError):
    """Raised when the requested encoder cannot be loaded."""


def _hash_encode(texts, dim: int) -> np.ndarray:
    out = np.zeros((len(texts), dim), dtype=np.float32)
    for row, text in enumerate(texts):
        padded = "\x02" + text + "\x03"
        for k in range(len(padded) - 2):
            h = _FNV_OFFSET
            for b in padded[k:k + 3].encode("utf-8"):
                h = ((h ^ b) * _FNV_PRIME) & _U64
            out[row, h % dim] += 1.0
        norm = float(np.linalg.norm(out[row]))
        if norm > 0:
            out[row] /= norm
    return out


def resolve_encoder(model_id: str, batch_size: int = 64):
    """Return (encode_fn, dim_or_None); encode_fn maps list[str] -> float32 array."""
    if model_id.startswith("hash:"):
        try:
            dim = int(model_id.split(":", 1)[1])
        except ValueError:
            raise EncoderError(f"bad hash encoder spec {model_id!r}, want hash:<dim>") from None
        if dim < 8:
            raise EncoderError("hash encoder dimension must be >= 8")
        return lambda texts: _hash_encode(texts, dim), dim

    try:
        from sentence_transformers import SentenceTransformer
    except ImportError as exc:
        raise EncoderError(
            f"model {model_id!r} needs the sentence-transformers extra"
        ) from exc
    try:
        model = SentenceTransformer(model_id)
    except Exception as exc:
        raise EncoderError(f"could not load encoder {model_id!r}: {exc}") from exc

    def encode(texts):
        return np.asarray(
            model.encode(texts, batch_size=batch_size, convert_to_numpy=True,
                         show_progress_bar=False),
            dtype=np.float32,
        )

    return encode, None
