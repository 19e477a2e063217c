"""EMB1 binary writer.

Layout: 4 magic bytes ``EMB1``, then row count and dimension as unsigned
32-bit little-endian integers, then the matrix as row-major little-endian
float32.  The companion index file lists one identifier per line in row
order.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"EMB1"


def write_emb1(emb_path, index_path, identifiers, matrix) -> None:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise ValueError("embedding matrix must be 2-D")
    rows, dim = matrix.shape
    if len(identifiers) != rows:
        raise ValueError(f"{len(identifiers)} identifiers for {rows} rows")
    with open(emb_path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", rows, dim))
        fh.write(matrix.tobytes(order="C"))
    with open(index_path, "w", encoding="utf-8") as fh:
        for name in identifiers:
            fh.write(str(name).replace("\n", " ") + "\n")


def read_header(emb_path) -> tuple[int, int]:
    """Row count and dimension from an EMB1 header, for verification."""
    with open(emb_path, "rb") as fh:
        head = fh.read(12)
    if len(head) != 12 or head[:4] != MAGIC:
        raise ValueError(f"{emb_path}: not an EMB1 file")
    rows, dim = struct.unpack("<II", head[4:12])
    return rows, dim
