"""High-confidence anchors and the anchor-driven multi-view matching loop.

A coupling entry close to the per-column mass ceiling c = 1/max(m, n) marks
a near-certain entity pair.  Those anchors approximate the structural
comparison cheaply: instead of a quartic objective, neighbor pairs of
anchored entities accumulate counts into structure and relation similarity
matrices, which are rescaled into costs and summed with the semantic views
for another transport solve.  Re-extracting anchors and repeating for a few
epochs progressively completes the anchor set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .costs import cosine_cost, fallback_embed
from .kg import KnowledgeGraph
from .ot import sinkhorn, uniform_marginals

log = logging.getLogger("kgalign")


@dataclass(frozen=True)
class AnchorSet:
    """One-to-one entity pairs whose coupling mass cleared c - epsilon."""

    pairs: frozenset[tuple[int, int]]
    c: float
    epsilon: float

    def __post_init__(self):
        left = [i for i, _ in self.pairs]
        right = [j for _, j in self.pairs]
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise AssertionError("anchor set is not one-to-one")

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class RelationEquivalence:
    """One-to-one relation-id pairs across the two graphs."""

    pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        left = [i for i, _ in self.pairs]
        right = [j for _, j in self.pairs]
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise AssertionError("relation equivalence is not one-to-one")

    def mapping(self) -> dict[int, int]:
        return dict(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


def extract_anchors(pi: np.ndarray, epsilon: float) -> AnchorSet:
    """Collect all coupling entries above c - epsilon as anchors.

    Requires 0 < epsilon < c/2, which rules out two above-threshold entries
    in one column; should float noise ever produce a duplicate anyway, the
    lower-mass pair is dropped.
    """
    pi = np.asarray(pi)
    m, n = pi.shape
    c = 1.0 / max(m, n)
    if not 0.0 < epsilon < c / 2.0:
        raise ValueError(f"epsilon must lie in (0, {c / 2.0!r}) for a {m}x{n} coupling")
    threshold = c - epsilon
    cand_i, cand_j = np.nonzero(pi > threshold)
    order = np.argsort(-pi[cand_i, cand_j], kind="stable")
    pairs = []
    used_i, used_j = set(), set()
    for k in order:
        i, j = int(cand_i[k]), int(cand_j[k])
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        pairs.append((i, j))
    return AnchorSet(frozenset(pairs), c, epsilon)


def align_relations(rel_names, rel_names2, encoder=None, eta: float = 0.1,
                    iters: int = 10, epsilon: float = 1e-5) -> RelationEquivalence:
    """Match relation ids across graphs by name similarity.

    Relation names are embedded (hashing embedder unless another encoder is
    supplied), a cosine cost is solved with the same transport settings as
    the entity stage over uniform relation marginals, and confident entries
    become equivalences under the same c - epsilon rule.
    """
    if not rel_names or not rel_names2:
        raise ValueError("both graphs must declare at least one relation")
    enc = encoder if encoder is not None else fallback_embed
    cost = cosine_cost(enc(list(rel_names)), enc(list(rel_names2)))
    marg = uniform_marginals(len(rel_names), len(rel_names2))
    pi = sinkhorn(cost, marg, eta=eta, iters=iters)
    c = 1.0 / max(len(rel_names), len(rel_names2))
    eps = min(epsilon, c / 4.0)  # keep epsilon < c/2 valid for very large relation sets
    anchors = extract_anchors(pi, eps)
    return RelationEquivalence(anchors.pairs)


def _grouped_neighbors(graph: KnowledgeGraph):
    """Per entity and direction: unique neighbor array and relation->neighbors map."""
    out, inc = graph.neighborhoods()
    table = []
    for pairs_by_dir in (out, inc):
        uniq = []
        by_rel = []
        for pairs in pairs_by_dir:
            uniq.append(np.unique([t for _, t in pairs]).astype(np.int64)
                        if pairs else np.empty(0, dtype=np.int64))
            groups: dict[int, set[int]] = {}
            for r, t in pairs:
                groups.setdefault(r, set()).add(t)
            by_rel.append(groups)
        table.append((uniq, by_rel))
    return table


def compute_similarities(graph: KnowledgeGraph, graph2: KnowledgeGraph,
                         anchors: AnchorSet, releq: RelationEquivalence):
    """Anchor-supported neighbor co-occurrence counts.

    For every anchor (i, k) and direction, each neighbor pair (j, l) of i
    and k adds one to the structure count, and additionally one to the
    relation count when some incident relation pair is equivalent.  Within
    one anchor and direction a (j, l) pair is counted at most once per
    matrix, so parallel edges do not inflate the counts.

    Returns (structure, relation) CSR count matrices of shape (m, n).
    """
    m, n = graph.num_entities, graph2.num_entities
    nbrs1 = _grouped_neighbors(graph)
    nbrs2 = _grouped_neighbors(graph2)
    rel_map = releq.mapping()

    stru_r, stru_c = [], []
    rel_r, rel_c = [], []
    for i, k in anchors.pairs:
        for d in (0, 1):
            uniq1, by_rel1 = nbrs1[d][0][i], nbrs1[d][1][i]
            uniq2, by_rel2 = nbrs2[d][0][k], nbrs2[d][1][k]
            if len(uniq1) == 0 or len(uniq2) == 0:
                continue
            stru_r.append(np.repeat(uniq1, len(uniq2)))
            stru_c.append(np.tile(uniq2, len(uniq1)))
            matched: set[tuple[int, int]] = set()
            for r, js in by_rel1.items():
                r2 = rel_map.get(r)
                if r2 is None or r2 not in by_rel2:
                    continue
                for j in js:
                    for l in by_rel2[r2]:
                        matched.add((j, l))
            if matched:
                arr = np.array(sorted(matched), dtype=np.int64)
                rel_r.append(arr[:, 0])
                rel_c.append(arr[:, 1])

    def assemble(rows, cols):
        if not rows:
            return sp.csr_matrix((m, n), dtype=np.int64)
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        return sp.coo_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(m, n)).tocsr()

    return assemble(stru_r, stru_c), assemble(rel_r, rel_c)


def similarity_to_cost(sim, c: float) -> np.ndarray:
    """Turn anchor counts into a cost in [0, 1].

    Computes 1 - c * counts, then min-max rescales the matrix globally; a
    constant matrix (no signal) maps to all zeros instead of dividing by
    zero.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    dense = sim.toarray().astype(np.float64) if sp.issparse(sim) else np.asarray(sim, dtype=np.float64)
    scaled = 1.0 - c * dense
    lo, hi = scaled.min(), scaled.max()
    if hi == lo:
        return np.zeros_like(scaled)
    return (scaled - lo) / (hi - lo)


@dataclass
class MultiviewResult:
    """Outcome of the iterative multi-view matching stage."""

    coupling: np.ndarray
    anchors: AnchorSet
    cost_sum: np.ndarray  # the summed cost that produced the final coupling


def multiview_iterate(graph: KnowledgeGraph, graph2: KnowledgeGraph,
                      cost_name: np.ndarray, cost_attr: np.ndarray | None,
                      anchors0: AnchorSet, releq: RelationEquivalence,
                      epochs: int = 6, eta: float = 0.1, iters: int = 10,
                      epsilon: float = 1e-5, use_stru: bool = True,
                      use_rel: bool = True) -> MultiviewResult:
    """Alternate between anchor-driven cost building and transport solving.

    Per epoch: build structure/relation similarity costs from the current
    anchors, sum them with the semantic views (plain unweighted sum), solve
    the entropic transport problem, and re-extract anchors.  With no
    enabled structural views and one epoch this reduces exactly to the
    semantic-only stage.
    """
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    m, n = cost_name.shape
    marg = uniform_marginals(m, n)
    c = 1.0 / max(m, n)
    anchors = anchors0
    pi = None
    cost_sum = None
    for epoch in range(1, epochs + 1):
        views = []
        if use_stru or use_rel:
            sim_stru, sim_rel = compute_similarities(graph, graph2, anchors, releq)
            if use_stru:
                views.append(similarity_to_cost(sim_stru, c))
            if use_rel:
                views.append(similarity_to_cost(sim_rel, c))
        views.append(cost_name)
        if cost_attr is not None:
            views.append(cost_attr)
        cost_sum = views[0].copy()
        for extra in views[1:]:
            cost_sum += extra
        pi = sinkhorn(cost_sum, marg, eta=eta, iters=iters)
        anchors = extract_anchors(pi, epsilon)
        if log.isEnabledFor(logging.DEBUG):
            with np.errstate(divide="ignore", invalid="ignore"):
                ent = float(-np.sum(np.where(pi > 0, pi * np.log(pi), 0.0))) / m
            log.debug("multiview epoch %d: %d anchors, mean coupling entropy %.4f",
                      epoch, len(anchors), ent)
    return MultiviewResult(pi, anchors, cost_sum)
