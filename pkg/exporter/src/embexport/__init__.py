"""Offline text embedding exporter.

Reads one string per line, encodes each line with a pretrained sentence
encoder (or the built-in deterministic hashing encoder), and writes the
binary EMB1 matrix plus its row-order index file.  The consumer contract
is the file format alone; nothing here imports the alignment engine.
"""

from .emb1 import write_emb1
from .encoders import resolve_encoder
from .export import ExportJob, export_embeddings

__version__ = "0.1.0"
