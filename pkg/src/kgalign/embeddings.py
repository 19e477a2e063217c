"""Entity embedding matrices and their on-disk formats.

Two formats are supported: a compact binary layout and a plain TSV.

Binary layout (little-endian):
    bytes 0-3   magic ``EMB1`` (ASCII)
    bytes 4-7   row count, unsigned 32-bit
    bytes 8-11  dimension, unsigned 32-bit
    rest        rows x dim IEEE-754 float32 values, row-major
A companion index file lists one entity identifier per line in row order.

TSV layout: ``entity<TAB>v1<TAB>v2...`` with one row per line.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kg import GraphFormatError, KnowledgeGraph

EMB1_MAGIC = b"EMB1"


class EmbeddingFormatError(ValueError):
    """Raised for malformed or inconsistent embedding files."""


@dataclass
class EmbeddingMatrix:
    """Row-per-entity float matrix aligned with a graph's entity order."""

    data: np.ndarray  # (rows, dim) float64
    index: list[str]

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[1] < 1:
            raise EmbeddingFormatError("embedding matrix must be 2-D with dim >= 1")
        if len(self.index) != self.data.shape[0]:
            raise EmbeddingFormatError("index length does not match row count")
        if np.isnan(self.data).all(axis=1).any():
            raise EmbeddingFormatError("embedding matrix contains an all-NaN row")
        self.data.flags.writeable = False

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]


def _default_index_path(emb_path) -> Path:
    return Path(emb_path).with_suffix(".idx")


def read_emb1(emb_path, index_path=None) -> EmbeddingMatrix:
    """Read a binary embedding file plus its row-order index file."""
    raw = Path(emb_path).read_bytes()
    if len(raw) < 12 or raw[:4] != EMB1_MAGIC:
        raise EmbeddingFormatError(f"{emb_path}: bad magic, not an EMB1 file")
    rows, dim = struct.unpack("<II", raw[4:12])
    expected = 12 + rows * dim * 4
    if dim < 1 or len(raw) != expected:
        raise EmbeddingFormatError(
            f"{emb_path}: header says {rows}x{dim} but file has {len(raw)} bytes (expected {expected})"
        )
    data = np.frombuffer(raw, dtype="<f4", offset=12).reshape(rows, dim)

    index_path = _default_index_path(emb_path) if index_path is None else index_path
    index = Path(index_path).read_text(encoding="utf-8").splitlines()
    if len(index) != rows:
        raise EmbeddingFormatError(
            f"{index_path}: {len(index)} identifiers for {rows} embedding rows"
        )
    return EmbeddingMatrix(data.astype(np.float64), index)


def write_emb1(emb_path, matrix: EmbeddingMatrix, index_path=None) -> None:
    """Write the binary layout; float values are stored as float32."""
    index_path = _default_index_path(emb_path) if index_path is None else index_path
    data32 = np.ascontiguousarray(matrix.data, dtype="<f4")
    with open(emb_path, "wb") as fh:
        fh.write(EMB1_MAGIC)
        fh.write(struct.pack("<II", matrix.rows, matrix.dim))
        fh.write(data32.tobytes(order="C"))
    with open(index_path, "w", encoding="utf-8") as fh:
        for name in matrix.index:
            fh.write(name + "\n")


def read_embedding_tsv(path) -> EmbeddingMatrix:
    """Read ``entity<TAB>v1<TAB>v2...`` rows."""
    names: list[str] = []
    vectors: list[np.ndarray] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise EmbeddingFormatError(f"{path}:{lineno}: no embedding values")
            names.append(parts[0])
            try:
                vectors.append(np.array([float(v) for v in parts[1:]], dtype=np.float64))
            except ValueError:
                raise EmbeddingFormatError(f"{path}:{lineno}: non-numeric embedding value") from None
    if not names:
        raise EmbeddingFormatError(f"{path}: empty embedding file")
    dims = {v.shape[0] for v in vectors}
    if len(dims) != 1:
        raise EmbeddingFormatError(f"{path}: inconsistent embedding dimensions {sorted(dims)}")
    return EmbeddingMatrix(np.vstack(vectors), names)


def load_embeddings(emb_path, graph: KnowledgeGraph, index_path=None) -> EmbeddingMatrix:
    """Load embeddings for every entity of ``graph``, reordered to its order.

    The format is sniffed from the file's leading bytes.  Every graph entity
    must be present in the file's index; extra rows are ignored.
    """
    with open(emb_path, "rb") as fh:
        head = fh.read(4)
    if head == EMB1_MAGIC:
        raw = read_emb1(emb_path, index_path)
    else:
        raw = read_embedding_tsv(emb_path)

    row_of = {}
    for pos, name in enumerate(raw.index):
        row_of.setdefault(name, pos)
    order = np.empty(graph.num_entities, dtype=np.int64)
    for i, name in enumerate(graph.entities):
        if name not in row_of:
            raise GraphFormatError(f"{emb_path}: no embedding for entity {name!r}")
        order[i] = row_of[name]
    data = raw.data[order]
    if np.isnan(data).any():
        raise EmbeddingFormatError(f"{emb_path}: NaN embedding values")
    return EmbeddingMatrix(data, list(graph.entities))
