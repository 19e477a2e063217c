"""Three-stage alignment pipeline.

Stage 1 solves entropic transport on the semantic (name, attribute) costs
and extracts high-confidence anchors.  Stage 2 aligns relations by name,
then iterates the anchor-driven multi-view matching for a fixed number of
epochs.  Stage 3 refines the resulting coupling against the global graph
structure with Bregman proximal gradient steps, weighting the semantic term
by the average graph density so both terms stay commensurate.  Every stage
is deterministic; ablation flags skip stages or cost views exactly.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .anchors import (AnchorSet, RelationEquivalence, align_relations,
                      extract_anchors, multiview_iterate)
from .costs import fallback_embed, semantic_costs
from .embeddings import EmbeddingMatrix
from .gw import BpgRecord, GwContext, bpg_refine, fgw_objective
from .kg import KnowledgeGraph
from .ot import sinkhorn, uniform_marginals

log = logging.getLogger("kgalign")

_CONFIG_FIELDS = {
    "eta": float, "sinkhorn_iters": int, "epochs": int, "epsilon": float,
    "beta": float, "max_iter": int, "eval_every": int, "rel_tol": float,
    "enable_gw": bool, "enable_rel": bool, "enable_stru": bool,
    "rel_embed_dim": int, "float32_storage": bool,
}


@dataclass
class PipelineConfig:
    """Run controls; the defaults are used unchanged on every dataset."""

    eta: float = 0.1
    sinkhorn_iters: int = 10
    epochs: int = 6
    epsilon: float = 1e-5
    beta: float = 100.0
    max_iter: int = 2000
    alpha: float | None = None  # None = average graph density of the two sides
    eval_every: int = 10
    rel_tol: float = 1e-6
    enable_gw: bool = True
    enable_rel: bool = True
    enable_stru: bool = True
    rel_embed_dim: int = 256
    float32_storage: bool = False

    def __post_init__(self):
        if self.eta <= 0 or self.sinkhorn_iters < 1 or self.epochs < 1:
            raise ValueError("eta, sinkhorn_iters, and epochs must be positive")
        if self.epsilon <= 0 or self.beta <= 0 or self.max_iter < 0:
            raise ValueError("epsilon and beta must be positive, max_iter non-negative")
        if self.eval_every < 1 or self.rel_tol < 0 or self.rel_embed_dim < 8:
            raise ValueError("bad eval_every, rel_tol, or rel_embed_dim")
        if self.alpha is not None and not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


def parse_config_file(path) -> dict:
    """Parse ``key = value`` lines (# comments allowed) into config kwargs."""
    out: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "alpha":
                out[key] = None if value.lower() in ("auto", "auto_density") else float(value)
            elif key in _CONFIG_FIELDS:
                typ = _CONFIG_FIELDS[key]
                if typ is bool:
                    if value.lower() not in ("true", "false"):
                        raise ValueError(f"{path}:{lineno}: {key} must be true or false")
                    out[key] = value.lower() == "true"
                else:
                    out[key] = typ(value)
            else:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    return out


@dataclass(frozen=True)
class TraceRecord:
    """One objective evaluation, labeled with the stage that produced it."""

    stage: str  # "semantic", "multiview", or "refine"
    step: int
    f_wd: float
    f_gwd: float
    f_fgw: float


@dataclass
class AlignmentResult:
    coupling: np.ndarray
    predicted_pairs: frozenset[tuple[int, int]]
    trace: list[TraceRecord]
    timings: dict[str, float] = field(default_factory=dict)
    anchors: AnchorSet | None = None
    relation_pairs: RelationEquivalence | None = None


def extract_predictions(pi: np.ndarray) -> frozenset[tuple[int, int]]:
    """Mutual-argmax decoding: keep (i, j) iff each is the other's best.

    Ties pick the lowest index on both axes, so decoding is deterministic
    and the output is one-to-one by construction.
    """
    pi = np.asarray(pi)
    best_col = pi.argmax(axis=1)
    best_row = pi.argmax(axis=0)
    rows = np.arange(pi.shape[0])
    mutual = best_row[best_col[rows]] == rows
    return frozenset((int(i), int(best_col[i])) for i in rows[mutual])


def alpha_from_density(graph: KnowledgeGraph, graph2: KnowledgeGraph) -> float:
    """Average undirected simple-graph density of the two sides."""
    if graph.num_entities < 2 or graph2.num_entities < 2:
        raise ValueError("graphs must have at least 2 entities")
    return 0.5 * (graph.density() + graph2.density())


def run_alignment(graph: KnowledgeGraph, graph2: KnowledgeGraph,
                  emb_name: EmbeddingMatrix, emb_name2: EmbeddingMatrix,
                  emb_attr: EmbeddingMatrix | None = None,
                  emb_attr2: EmbeddingMatrix | None = None,
                  cfg: PipelineConfig | None = None,
                  refine_eval_hook=None) -> AlignmentResult:
    """Run the full three-stage alignment and decode predictions.

    ``refine_eval_hook(iteration, coupling, record)`` is forwarded to the
    refinement loop for diagnostics such as tracking accuracy against the
    fused objective.
    """
    cfg = cfg or PipelineConfig()
    m, n = graph.num_entities, graph2.num_entities
    if emb_name.rows != m or emb_name2.rows != n:
        raise ValueError("name embeddings do not match graph sizes")
    if cfg.epsilon >= 1.0 / (2 * max(m, n)):
        raise ValueError(
            f"epsilon {cfg.epsilon} too large for {m}x{n}: must be < {1.0 / (2 * max(m, n))}"
        )
    marg = uniform_marginals(m, n)
    trace: list[TraceRecord] = []
    timings: dict[str, float] = {}

    def maybe_f32(pi: np.ndarray) -> np.ndarray:
        return pi.astype(np.float32) if cfg.float32_storage else pi

    # stage 1: semantic transport and initial anchors
    t0 = time.perf_counter()
    cost_name, cost_attr = semantic_costs(emb_name, emb_name2, emb_attr, emb_attr2)
    cost_sem = cost_name if cost_attr is None else cost_name + cost_attr
    pi0 = sinkhorn(cost_sem, marg, eta=cfg.eta, iters=cfg.sinkhorn_iters)
    anchors = extract_anchors(pi0, cfg.epsilon)
    trace.append(TraceRecord("semantic", 0, float(np.einsum("ij,ij->", cost_sem, pi0)),
                             np.nan, np.nan))
    timings["semantic"] = time.perf_counter() - t0
    log.info("semantic stage: %d anchors", len(anchors))

    # stage 2: relation alignment plus multi-view epochs
    t0 = time.perf_counter()
    releq = RelationEquivalence(frozenset())
    if cfg.enable_rel:
        releq = align_relations(
            graph.relations, graph2.relations,
            encoder=lambda texts: fallback_embed(texts, dim=cfg.rel_embed_dim),
            eta=cfg.eta, iters=cfg.sinkhorn_iters, epsilon=cfg.epsilon,
        )
        log.info("relation alignment: %d equivalences", len(releq))
    mv = multiview_iterate(
        graph, graph2, cost_name, cost_attr, anchors, releq,
        epochs=cfg.epochs, eta=cfg.eta, iters=cfg.sinkhorn_iters,
        epsilon=cfg.epsilon, use_stru=cfg.enable_stru, use_rel=cfg.enable_rel,
    )
    pi_ot = maybe_f32(mv.coupling)
    anchors = mv.anchors
    trace.append(TraceRecord("multiview", cfg.epochs,
                             float(np.einsum("ij,ij->", mv.cost_sum, mv.coupling)),
                             np.nan, np.nan))
    timings["multiview"] = time.perf_counter() - t0
    log.info("multiview stage: %d anchors", len(anchors))

    # stage 3: structural refinement warm-started at the stage-2 coupling
    final_pi = pi_ot
    if cfg.enable_gw:
        t0 = time.perf_counter()
        alpha = cfg.alpha if cfg.alpha is not None else alpha_from_density(graph, graph2)
        ctx = GwContext(graph.adjacency, graph2.adjacency, marg)
        refined, records = bpg_refine(
            ctx, mv.cost_sum, alpha, np.asarray(pi_ot, dtype=np.float64),
            beta=cfg.beta, max_iter=cfg.max_iter, eval_every=cfg.eval_every,
            rel_tol=cfg.rel_tol, prox_iters=cfg.sinkhorn_iters,
            on_eval=refine_eval_hook,
        )
        final_pi = maybe_f32(refined)
        trace.extend(TraceRecord("refine", r.iteration, r.f_wd, r.f_gwd, r.f_fgw)
                     for r in records)
        timings["refine"] = time.perf_counter() - t0
        log.info("refinement: %d evaluations, alpha=%.3g", len(records), alpha)

    predictions = extract_predictions(final_pi)
    return AlignmentResult(final_pi, predictions, trace, timings,
                           anchors=anchors, relation_pairs=releq)


def refine_records(result: AlignmentResult) -> list[BpgRecord]:
    """Refinement-stage rows of a result's trace, ready for CSV export."""
    return [BpgRecord(r.step, r.f_wd, r.f_gwd, r.f_fgw)
            for r in result.trace if r.stage == "refine"]
