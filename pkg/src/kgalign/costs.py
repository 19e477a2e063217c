"""Semantic cost matrices and a deterministic hashing embedder.

Cosine-dissimilarity costs are built directly from embedding matrices.
For fully offline runs (tests, synthetic data, relation names) a character
trigram hashing embedder stands in for a pretrained text encoder; it is
deterministic across runs and platforms.
"""

from __future__ import annotations

import numpy as np

from .embeddings import EmbeddingMatrix

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h = ((h ^ b) * _FNV_PRIME) & _U64
    return h


def fallback_embed(strings, dim: int = 256, index=None) -> EmbeddingMatrix:
    """Character-trigram hashing embedder.

    Each string is wrapped in boundary markers and split into character
    trigrams; every trigram is hashed (FNV-1a, 64-bit) into one of ``dim``
    buckets and counted, and each row is L2-normalized.  Empty strings give
    a zero row.
    """
    if dim < 8:
        raise ValueError("embedding dim must be >= 8")
    out = np.zeros((len(strings), dim), dtype=np.float64)
    for row, text in enumerate(strings):
        padded = "\x02" + text + "\x03"
        for k in range(len(padded) - 2):
            bucket = _fnv1a64(padded[k:k + 3].encode("utf-8")) % dim
            out[row, bucket] += 1.0
        norm = np.linalg.norm(out[row])
        if norm > 0:
            out[row] /= norm
    return EmbeddingMatrix(out, list(index) if index is not None else [""] * len(strings))


def cosine_cost(emb: EmbeddingMatrix, emb2: EmbeddingMatrix) -> np.ndarray:
    """Pairwise cost 1 - cos(row_i, row'_j), an (m, n) matrix in [0, 2].

    Zero-norm rows are treated as cosine 0 against everything (cost 1), so
    empty strings are neutral rather than attractive.
    """
    if emb.dim != emb2.dim:
        raise ValueError(f"embedding dims differ: {emb.dim} vs {emb2.dim}")
    a, b = emb.data, emb2.data
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    sim = (a @ b.T) / np.outer(np.where(na > 0, na, 1.0), np.where(nb > 0, nb, 1.0))
    sim[na == 0, :] = 0.0
    sim[:, nb == 0] = 0.0
    return 1.0 - np.clip(sim, -1.0, 1.0)


def semantic_costs(emb_name: EmbeddingMatrix, emb_name2: EmbeddingMatrix,
                   emb_attr: EmbeddingMatrix | None = None,
                   emb_attr2: EmbeddingMatrix | None = None):
    """Name cost plus, when both sides carry one, an attribute cost.

    Returns (cost_name, cost_attr_or_None).  A one-sided attribute channel
    is an error; an absent channel is omitted entirely so downstream sums
    simply skip it.
    """
    cost_name = cosine_cost(emb_name, emb_name2)
    if (emb_attr is None) != (emb_attr2 is None):
        raise ValueError("attribute embeddings must be supplied for both graphs or neither")
    cost_attr = None if emb_attr is None else cosine_cost(emb_attr, emb_attr2)
    return cost_name, cost_attr
