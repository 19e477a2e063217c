"""Producing embedding files with the sidecar exporter.

The alignment engine never runs a text encoder itself; it reads embedding
matrices from disk.  This script shows the full handoff: dump each
entity's name and attribute string, encode them with the exporter (the
deterministic hashing encoder here; any sentence-transformers model id
works the same way), and load the result back, aligned to the graph.

Requires the embexport package (pip install -e exporter/).
"""

import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from kgalign import load_embeddings, write_entity_strings
from kgalign.kg import KnowledgeGraph

work = Path(tempfile.mkdtemp(prefix="kgalign_export_"))

graph = KnowledgeGraph(
    entities=["tokyo", "kyoto", "osaka"],
    relations=["adjacent_to"],
    relation_triples=np.array([[0, 0, 1], [1, 0, 2]]),
    attribute_triples=[(0, "population", "14M"), (0, "country", "JP"),
                       (1, "country", "JP")],
)

names_txt = work / "names.txt"
attrs_txt = work / "attrs.txt"
write_entity_strings(graph, names_txt, attrs_txt)
print("name lines :", names_txt.read_text().splitlines())
print("attr lines :", attrs_txt.read_text().splitlines())

emb_bin = work / "name_emb.bin"
proc = subprocess.run(
    [sys.executable, "-m", "embexport", "export",
     "--input", str(names_txt), "--model", "hash:64",
     "--out", str(emb_bin), "--index", str(work / "name_emb.idx")],
    capture_output=True, text=True)
print("\nexporter said:", proc.stdout.strip())

emb = load_embeddings(emb_bin, graph, work / "name_emb.idx")
print("loaded matrix:", emb.rows, "x", emb.dim, "| row order:", emb.index)
sim = emb.data @ emb.data.T
print("name similarity of tokyo vs kyoto:", round(float(sim[0, 1]), 3))
print("name similarity of tokyo vs osaka:", round(float(sim[0, 2]), 3))
