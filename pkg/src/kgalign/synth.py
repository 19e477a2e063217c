"""Synthetic graph-pair generator with known ground truth.

Produces a random multigraph, a permuted copy with controllable edge
rewiring, hashing embeddings of the entity names with controllable noise,
and the true permutation as reference alignment.  Everything is a pure
function of the spec thanks to a counter-based PRNG, so fixtures are
reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .costs import fallback_embed
from .embeddings import EmbeddingMatrix, write_emb1
from .kg import GoldAlignment, KnowledgeGraph

@dataclass(frozen=True)
class SynthSpec:
    n_entities: int
    n_relations: int = 10
    edge_density: float = 0.05
    rewire_frac: float = 0.0
    emb_noise: float = 0.0
    emb_dim: int = 512
    seed: int = 0

    def __post_init__(self):
        if self.n_entities < 2 or self.n_relations < 1:
            raise ValueError("need at least 2 entities and 1 relation")
        if not 0.0 < self.edge_density < 1.0:
            raise ValueError("edge_density must lie in (0, 1)")
        if not 0.0 <= self.rewire_frac <= 1.0:
            raise ValueError("rewire_frac must lie in [0, 1]")
        if self.emb_noise < 0.0:
            raise ValueError("emb_noise must be >= 0")


def _letters(rng, k: int) -> str:
    return "".join(chr(ord("a") + c) for c in rng.integers(0, 26, size=k))


def _entity_names(rng, n: int) -> list[str]:
    """Random-token names where about a quarter of the entities share their
    token with a twin (only a numeric tail differs).  Twins keep pure
    embedding matching imperfect under noise while the rest of the names
    stay distinctive enough to seed confident matches."""
    n_twins = n // 4
    n_cores = n - n_twins
    cores: list[str] = []
    seen = set()
    while len(cores) < n_cores:
        token = _letters(rng, 80)
        if token not in seen:
            seen.add(token)
            cores.append(token)
    names = []
    for i in range(n):
        if i < n_cores:
            names.append(f"{cores[i]} p")
        else:
            names.append(f"{cores[i - n_cores]} q")
    return names


def _noisy_embedding(rng, names: list[str], dim: int, noise: float) -> EmbeddingMatrix:
    emb = fallback_embed(names, dim=dim, index=names)
    if noise == 0.0:
        return emb
    direction = rng.standard_normal(emb.data.shape)
    direction /= np.maximum(np.linalg.norm(direction, axis=1, keepdims=True), 1e-12)
    data = emb.data + noise * direction
    data /= np.maximum(np.linalg.norm(data, axis=1, keepdims=True), 1e-12)
    return EmbeddingMatrix(data, list(names))


def generate(spec: SynthSpec):
    """Build (graph, graph2, emb, emb2, gold) for a synthetic pair.

    graph2 is graph with entities permuted, relation names suffixed
    differently, ``rewire_frac`` of its edges re-sampled, and every entity
    kept incident to at least one triple so file round-trips lose nothing.
    """
    rng = np.random.Generator(np.random.Philox(spec.seed))
    n = spec.n_entities

    names = _entity_names(rng, n)
    rel_bases = [_letters(rng, 12) for _ in range(spec.n_relations)]
    rels1 = [f"{b}_a" for b in rel_bases]
    rels2 = [f"{b}_b" for b in rel_bases]

    n_edges = max(1, round(spec.edge_density * n * (n - 1) / 2))
    heads = rng.integers(0, n, size=n_edges)
    offs = rng.integers(1, n, size=n_edges)
    tails = (heads + offs) % n  # guarantees head != tail
    rel_ids = rng.integers(0, spec.n_relations, size=n_edges)
    triples1 = np.stack([heads, rel_ids, tails], axis=1).astype(np.int64)

    # every entity must appear in some triple or TSV round-trips drop it
    present = np.zeros(n, dtype=bool)
    present[triples1[:, 0]] = True
    present[triples1[:, 2]] = True
    extra = []
    for i in np.nonzero(~present)[0]:
        j = int((i + 1 + rng.integers(0, n - 1)) % n)
        extra.append((int(i), int(rng.integers(0, spec.n_relations)), j))
    if extra:
        triples1 = np.vstack([triples1, np.array(extra, dtype=np.int64)])

    perm = rng.permutation(n)
    triples2 = triples1.copy()
    triples2[:, 0] = perm[triples1[:, 0]]
    triples2[:, 2] = perm[triples1[:, 2]]

    n_rewire = round(spec.rewire_frac * len(triples2))
    if n_rewire > 0:
        idx = rng.choice(len(triples2), size=n_rewire, replace=False)
        new_heads = rng.integers(0, n, size=n_rewire)
        new_tails = (new_heads + rng.integers(1, n, size=n_rewire)) % n
        triples2[idx, 0] = new_heads
        triples2[idx, 2] = new_tails
        present2 = np.zeros(n, dtype=bool)
        present2[triples2[:, 0]] = True
        present2[triples2[:, 2]] = True
        extra2 = []
        for i in np.nonzero(~present2)[0]:
            j = int((i + 1 + rng.integers(0, n - 1)) % n)
            extra2.append((int(i), int(rng.integers(0, spec.n_relations)), j))
        if extra2:
            triples2 = np.vstack([triples2, np.array(extra2, dtype=np.int64)])

    names2 = [""] * n
    for i in range(n):
        names2[perm[i]] = names[i]

    graph = KnowledgeGraph(names, rels1, triples1)
    graph2 = KnowledgeGraph(names2, rels2, triples2)
    emb = _noisy_embedding(rng, names, spec.emb_dim, spec.emb_noise)
    emb2 = _noisy_embedding(rng, names2, spec.emb_dim, spec.emb_noise)
    gold = GoldAlignment(frozenset((i, int(perm[i])) for i in range(n)))
    return graph, graph2, emb, emb2, gold


def dump(spec: SynthSpec, out_dir) -> None:
    """Write the generated pair in the standard file layout.

    Produces rel_triples_1/2, emb_1.bin/.idx, emb_2.bin/.idx and ent_links
    under ``out_dir``; loading them back reproduces the in-memory pair up
    to entity reordering.
    """
    graph, graph2, emb, emb2, gold = generate(spec)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for g, fname in ((graph, "rel_triples_1"), (graph2, "rel_triples_2")):
        with open(out / fname, "w", encoding="utf-8") as fh:
            for h, r, t in g.relation_triples:
                fh.write(f"{g.entities[h]}\t{g.relations[r]}\t{g.entities[t]}\n")
    write_emb1(out / "emb_1.bin", emb, out / "emb_1.idx")
    write_emb1(out / "emb_2.bin", emb2, out / "emb_2.idx")
    with open(out / "ent_links", "w", encoding="utf-8") as fh:
        for i, j in sorted(gold.pairs):
            fh.write(f"{graph.entities[i]}\t{graph2.entities[j]}\n")
