"""Knowledge-graph data model and TSV loaders.

A graph is a list of entities, a list of relation names, relation triples
(head, relation, tail) over dense integer ids, optional attribute triples
(entity, attribute, literal), and a symmetric binary adjacency matrix in
CSR form.  Entity and relation ids are assigned in first-appearance order
while reading the triples file, so loading is deterministic.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

log = logging.getLogger("kgalign")

DEFAULT_ATTR_STRING_MAX_LEN = 512


class GraphFormatError(ValueError):
    """Raised for malformed or inconsistent graph input files."""


def _build_adjacency(n_entities: int, triples: np.ndarray) -> sp.csr_matrix:
    """Symmetrized binary adjacency with an empty diagonal."""
    if len(triples) == 0:
        return sp.csr_matrix((n_entities, n_entities), dtype=np.int8)
    heads = triples[:, 0]
    tails = triples[:, 2]
    keep = heads != tails  # self-loops never enter the adjacency
    rows = np.concatenate([heads[keep], tails[keep]])
    cols = np.concatenate([tails[keep], heads[keep]])
    data = np.ones(len(rows), dtype=np.int8)
    adj = sp.coo_matrix((data, (rows, cols)), shape=(n_entities, n_entities)).tocsr()
    adj.data[:] = 1  # duplicates collapse to a binary edge
    return adj


@dataclass
class KnowledgeGraph:
    """One knowledge graph with dense integer entity/relation ids."""

    entities: list[str]
    relations: list[str]
    relation_triples: np.ndarray  # (T, 3) int64 rows of (head, relation, tail)
    attribute_triples: list[tuple[int, str, str]] = field(default_factory=list)
    adjacency: sp.csr_matrix = None

    def __post_init__(self):
        if len(set(self.entities)) != len(self.entities):
            raise GraphFormatError("duplicate entity identifiers")
        self.relation_triples = np.asarray(self.relation_triples, dtype=np.int64).reshape(-1, 3)
        m, r = len(self.entities), len(self.relations)
        t = self.relation_triples
        if len(t) and (
            t[:, 0].min() < 0 or t[:, 0].max() >= m
            or t[:, 2].min() < 0 or t[:, 2].max() >= m
            or t[:, 1].min() < 0 or t[:, 1].max() >= r
        ):
            raise GraphFormatError("triple index out of bounds")
        for eid, _, _ in self.attribute_triples:
            if not 0 <= eid < m:
                raise GraphFormatError(f"attribute triple entity id {eid} out of bounds")
        if self.adjacency is None:
            self.adjacency = _build_adjacency(m, self.relation_triples)
        self.relation_triples.flags.writeable = False
        self._entity_index = {e: i for i, e in enumerate(self.entities)}
        self._attr_freq = Counter(a for _, a, _ in self.attribute_triples)
        self._attrs_by_entity: dict[int, list[tuple[str, str]]] = {}
        for e, a, l in self.attribute_triples:
            self._attrs_by_entity.setdefault(e, []).append((a, l))
        self._neighbors = None

    @property
    def num_entities(self) -> int:
        return len(self.entities)

    @property
    def num_relations(self) -> int:
        return len(self.relations)

    def entity_id(self, name: str) -> int:
        return self._entity_index[name]

    def density(self) -> float:
        """Undirected simple-graph density 2|E| / (m(m-1))."""
        m = self.num_entities
        if m < 2:
            return 0.0
        n_edges = self.adjacency.nnz // 2
        return 2.0 * n_edges / (m * (m - 1))

    def neighborhoods(self) -> tuple[list, list]:
        """Per-entity (relation_id, neighbor_id) pairs, split by direction.

        Returns (out, inc) where out[i] lists (r, t) for triples (i, r, t)
        and inc[i] lists (r, h) for triples (h, r, i).  Built once, cached.
        """
        if self._neighbors is None:
            out = [[] for _ in range(self.num_entities)]
            inc = [[] for _ in range(self.num_entities)]
            for h, r, t in self.relation_triples:
                out[h].append((int(r), int(t)))
                inc[t].append((int(r), int(h)))
            self._neighbors = (out, inc)
        return self._neighbors

    def attribute_string(self, entity_id: int, max_len: int = DEFAULT_ATTR_STRING_MAX_LEN) -> str:
        """Concatenate an entity's attribute pairs into one string.

        Pairs are ordered by descending global attribute frequency in this
        graph, ties by attribute name, then by literal.  The result is
        truncated to ``max_len`` characters.  Entities without attributes
        yield the empty string.
        """
        if not 0 <= entity_id < self.num_entities:
            raise KeyError(f"entity id {entity_id} out of range")
        mine = sorted(self._attrs_by_entity.get(entity_id, ()),
                      key=lambda al: (-self._attr_freq[al[0]], al[0], al[1]))
        text = " ".join(f"{a} {l}" for a, l in mine)
        return text[:max_len]


@dataclass(frozen=True)
class GoldAlignment:
    """One-to-one reference entity links between two graphs."""

    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        left = [i for i, _ in self.pairs]
        right = [j for _, j in self.pairs]
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise GraphFormatError("gold alignment is not one-to-one")

    def __len__(self) -> int:
        return len(self.pairs)


def _read_tsv_triples(path, expect_cols: int = 3) -> list[tuple[str, ...]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != expect_cols:
                raise GraphFormatError(
                    f"{path}:{lineno}: expected {expect_cols} tab-separated fields, got {len(parts)}"
                )
            rows.append(tuple(parts))
    return rows


def load_graph(triples_path, attrs_path=None) -> KnowledgeGraph:
    """Load a graph from a relation-triples TSV and optional attribute TSV.

    Entity and relation ids follow first appearance in the triples file
    (head before tail within a line).  Attribute triples naming entities
    that never occur in a relation triple are dropped with a log message.
    """
    raw = _read_tsv_triples(triples_path)
    if not raw:
        raise GraphFormatError(f"{triples_path}: empty triples file")

    entities: list[str] = []
    relations: list[str] = []
    ent_ids: dict[str, int] = {}
    rel_ids: dict[str, int] = {}
    triples = np.empty((len(raw), 3), dtype=np.int64)
    for k, (h, r, t) in enumerate(raw):
        for name in (h, t):
            if name not in ent_ids:
                ent_ids[name] = len(entities)
                entities.append(name)
        if r not in rel_ids:
            rel_ids[r] = len(relations)
            relations.append(r)
        triples[k] = (ent_ids[h], rel_ids[r], ent_ids[t])

    attrs: list[tuple[int, str, str]] = []
    if attrs_path is not None:
        dropped = 0
        for e, a, l in _read_tsv_triples(attrs_path):
            if e in ent_ids:
                attrs.append((ent_ids[e], a, l))
            else:
                dropped += 1
        if dropped:
            log.info("dropped %d attribute triples for entities absent from %s", dropped, triples_path)

    return KnowledgeGraph(entities, relations, triples, attrs)


def load_alignment(path, graph: KnowledgeGraph, graph2: KnowledgeGraph) -> GoldAlignment:
    """Load name-pair links (ent_links TSV) and map them to entity ids."""
    pairs = set()
    for e1, e2 in _read_tsv_triples(path, expect_cols=2):
        try:
            i = graph.entity_id(e1)
        except KeyError:
            raise GraphFormatError(f"{path}: entity {e1!r} not in first graph") from None
        try:
            j = graph2.entity_id(e2)
        except KeyError:
            raise GraphFormatError(f"{path}: entity {e2!r} not in second graph") from None
        pairs.add((i, j))
    return GoldAlignment(frozenset(pairs))


def write_pairs(path, pairs, graph: KnowledgeGraph, graph2: KnowledgeGraph) -> None:
    """Write id pairs as an ent_links-style TSV of entity names.

    Rows are sorted by the first graph's entity id so output is stable.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for i, j in sorted(pairs):
            fh.write(f"{graph.entities[i]}\t{graph2.entities[j]}\n")


def write_entity_strings(graph: KnowledgeGraph, names_path, attrs_path=None,
                         max_len: int = DEFAULT_ATTR_STRING_MAX_LEN) -> None:
    """Dump per-entity name and attribute strings, one per line, in id order.

    The files feed an external embedding exporter; row order matches the
    graph's entity order so the produced matrices align without reindexing.
    """
    with open(names_path, "w", encoding="utf-8") as fh:
        for name in graph.entities:
            fh.write(name.replace("\n", " ") + "\n")
    if attrs_path is not None:
        with open(attrs_path, "w", encoding="utf-8") as fh:
            for eid in range(graph.num_entities):
                fh.write(graph.attribute_string(eid, max_len=max_len).replace("\n", " ") + "\n")
