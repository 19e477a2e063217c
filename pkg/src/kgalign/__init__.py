"""Unsupervised entity alignment across knowledge graphs.

Matches entities of two graphs by solving a sequence of optimal transport
problems: semantic embedding costs first, then anchor-driven structure and
relation similarity views, and finally a global structural refinement of
the coupling.  No supervision, no training, no tuned hyperparameters.
"""

from .anchors import (AnchorSet, MultiviewResult, RelationEquivalence,
                      align_relations, compute_similarities, extract_anchors,
                      multiview_iterate, similarity_to_cost)
from .costs import cosine_cost, fallback_embed, semantic_costs
from .embeddings import (EmbeddingFormatError, EmbeddingMatrix,
                         load_embeddings, read_emb1, read_embedding_tsv,
                         write_emb1)
from .gw import (BpgRecord, GwContext, bpg_refine, fgw_objective,
                 gwd_gradient, gwd_objective, write_trace_csv)
from .kg import (GoldAlignment, GraphFormatError, KnowledgeGraph,
                 load_alignment, load_graph, write_entity_strings, write_pairs)
from .metrics import (ClassificationReport, RankingReport,
                      classification_metrics, ranking_metrics)
from .ot import (Marginals, sinkhorn, sinkhorn_prox, uniform_marginals,
                 wd_objective)
from .pipeline import (AlignmentResult, PipelineConfig, TraceRecord,
                       alpha_from_density, extract_predictions,
                       parse_config_file, run_alignment)
from .synth import SynthSpec, dump, generate

__version__ = "0.1.0"
