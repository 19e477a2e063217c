"""Export job: text lines in, EMB1 matrix plus index out."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .emb1 import read_header, write_emb1
from .encoders import resolve_encoder


@dataclass(frozen=True)
class ExportJob:
    input_path: str
    model_id: str
    output_path: str
    index_path: str
    batch_size: int = 64
    ids_path: str | None = None  # identifiers per line; defaults to the input lines


def _read_lines(path) -> list[str]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    return lines


def export_embeddings(job: ExportJob) -> tuple[int, int]:
    """Encode every input line and write the matrix; returns (rows, dim).

    Rows keep input order.  After writing, the header is re-read and checked
    against the input line count so a truncated write cannot go unnoticed.
    """
    texts = _read_lines(job.input_path)
    if not texts:
        raise ValueError(f"{job.input_path}: no input lines")
    identifiers = _read_lines(job.ids_path) if job.ids_path else texts
    if len(identifiers) != len(texts):
        raise ValueError(
            f"{job.ids_path}: {len(identifiers)} identifiers for {len(texts)} input lines"
        )

    encode, _ = resolve_encoder(job.model_id, job.batch_size)
    chunks = [encode(texts[k:k + job.batch_size])
              for k in range(0, len(texts), job.batch_size)]
    matrix = np.vstack(chunks)
    if matrix.shape[0] != len(texts):
        raise ValueError(f"encoder returned {matrix.shape[0]} rows for {len(texts)} lines")

    write_emb1(job.output_path, job.index_path, identifiers, matrix)
    rows, dim = read_header(job.output_path)
    if rows != len(texts):
        raise ValueError(f"{job.output_path}: wrote {rows} rows, expected {len(texts)}")
    return rows, dim
