"""Command-line interface.

Subcommands: ``align`` runs the pipeline on graph/embedding files, ``eval``
scores prediction files, ``synth`` writes a synthetic dataset, and
``trace-plot-data`` turns a refinement trace CSV into plot-ready JSON.
Exit codes: 0 success, 1 usage error, 2 runtime error.  All numeric JSON
output uses fixed 6-decimal formatting so reruns diff cleanly.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingFormatError, load_embeddings
from .gw import write_trace_csv
from .kg import (GoldAlignment, GraphFormatError, load_alignment, load_graph,
                 write_pairs)
from .metrics import classification_metrics, ranking_metrics
from .pipeline import (PipelineConfig, parse_config_file, refine_records,
                       run_alignment)
from .synth import SynthSpec, dump

_METRIC_KEY_ORDER = ("hit1", "hit10", "mrr", "precision", "recall", "f1")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this tool reserves 2 for runtime."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _metrics_json(values: dict) -> str:
    parts = [f'"{k}": {values[k]:.6f}' for k in _METRIC_KEY_ORDER if k in values]
    return "{" + ", ".join(parts) + "}"


def _build_parser() -> _Parser:
    parser = _Parser(prog="kgalign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", help="align two graphs and write predictions")
    p.add_argument("--kg1-triples", required=True)
    p.add_argument("--kg2-triples", required=True)
    p.add_argument("--emb1", required=True, help="name embeddings for the first graph")
    p.add_argument("--emb2", required=True)
    p.add_argument("--attr1", help="attribute triples TSV for the first graph")
    p.add_argument("--attr2")
    p.add_argument("--attr-emb1", help="attribute-string embeddings for the first graph")
    p.add_argument("--attr-emb2")
    p.add_argument("--gold", help="reference links; metrics JSON goes to stdout")
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--out", help="predictions TSV path")
    p.add_argument("--out-trace", help="refinement trace CSV path")
    p.add_argument("--out-coupling", help="coupling .npz path (pi, rows, cols)")
    p.add_argument("--no-gw", action="store_true", help="skip structural refinement")
    p.add_argument("--no-rel", action="store_true", help="drop the relation similarity view")
    p.add_argument("--no-stru", action="store_true", help="drop the structure similarity view")
    for flag, typ in (("--eta", float), ("--sinkhorn-iters", int), ("--epochs", int),
                      ("--epsilon", float), ("--beta", float), ("--max-iter", int),
                      ("--alpha", float), ("--eval-every", int), ("--rel-tol", float)):
        p.add_argument(flag, type=typ, default=None)

    p = sub.add_parser("eval", help="score a predictions file against reference links")
    p.add_argument("--pred", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--coupling", help="coupling .npz to add ranking metrics")

    p = sub.add_parser("synth", help="generate a synthetic aligned graph pair")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--relations", type=int, default=10)
    p.add_argument("--density", type=float, default=0.05)
    p.add_argument("--rewire", type=float, default=0.0)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("trace-plot-data", help="summarize a trace CSV as JSON")
    p.add_argument("--trace", required=True)
    return parser


def _read_pair_tsv(path) -> list[tuple[str, str]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected two tab-separated fields")
            pairs.append((parts[0], parts[1]))
    return pairs


def _cmd_align(args) -> int:
    if (args.attr_emb1 is None) != (args.attr_emb2 is None):
        raise GraphFormatError("--attr-emb1 and --attr-emb2 must be given together")
    cfg_kwargs = parse_config_file(args.config) if args.config else {}
    for name in ("eta", "sinkhorn_iters", "epochs", "epsilon", "beta",
                 "max_iter", "alpha", "eval_every", "rel_tol"):
        value = getattr(args, name)
        if value is not None:
            cfg_kwargs[name] = value
    cfg_kwargs["enable_gw"] = not args.no_gw
    cfg_kwargs["enable_rel"] = not args.no_rel
    cfg_kwargs["enable_stru"] = not args.no_stru
    cfg = PipelineConfig(**cfg_kwargs)

    graph = load_graph(args.kg1_triples, args.attr1)
    graph2 = load_graph(args.kg2_triples, args.attr2)
    emb = load_embeddings(args.emb1, graph)
    emb2 = load_embeddings(args.emb2, graph2)
    emb_attr = load_embeddings(args.attr_emb1, graph) if args.attr_emb1 else None
    emb_attr2 = load_embeddings(args.attr_emb2, graph2) if args.attr_emb2 else None

    result = run_alignment(graph, graph2, emb, emb2, emb_attr, emb_attr2, cfg)

    if args.out:
        write_pairs(args.out, result.predicted_pairs, graph, graph2)
    if args.out_trace:
        write_trace_csv(refine_records(result), args.out_trace)
    if args.out_coupling:
        np.savez(args.out_coupling, pi=result.coupling,
                 rows=np.array(graph.entities), cols=np.array(graph2.entities))
    if args.gold:
        gold = load_alignment(args.gold, graph, graph2)
        ranking = ranking_metrics(result.coupling, gold)
        classif = classification_metrics(result.predicted_pairs, gold)
        print(_metrics_json({**ranking.to_json_dict(), **classif.to_json_dict()}))
    return 0


def _cmd_eval(args) -> int:
    pred = set(_read_pair_tsv(args.pred))
    gold = GoldAlignment(frozenset(_read_pair_tsv(args.gold)))
    values = classification_metrics(pred, gold).to_json_dict()
    if args.coupling:
        with np.load(args.coupling, allow_pickle=False) as bundle:
            pi = bundle["pi"]
            row_of = {name: i for i, name in enumerate(bundle["rows"].tolist())}
            col_of = {name: j for j, name in enumerate(bundle["cols"].tolist())}
        try:
            id_pairs = frozenset((row_of[a], col_of[b]) for a, b in gold.pairs)
        except KeyError as exc:
            raise GraphFormatError(f"{args.coupling}: entity {exc.args[0]!r} not in coupling") from None
        ranking = ranking_metrics(pi, GoldAlignment(id_pairs))
        values = {**ranking.to_json_dict(), **values}
    print(_metrics_json(values))
    return 0


def _cmd_synth(args, parser: _Parser) -> int:
    if args.n < 2:
        parser.error("--n must be at least 2")
    dump(SynthSpec(n_entities=args.n, n_relations=args.relations,
                   edge_density=args.density, rewire_frac=args.rewire,
                   emb_noise=args.noise, seed=args.seed), args.out_dir)
    return 0


def _cmd_trace_plot_data(args) -> int:
    lines = Path(args.trace).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "iter,f_wd,f_gwd,f_fgw":
        raise GraphFormatError(f"{args.trace}: not a refinement trace CSV")
    iters, series = [], {"f_wd": [], "f_gwd": [], "f_fgw": []}
    for line in lines[1:]:
        it, f_wd, f_gwd, f_fgw = line.split(",")
        iters.append(int(it))
        series["f_wd"].append(float(f_wd))
        series["f_gwd"].append(float(f_gwd))
        series["f_fgw"].append(float(f_fgw))
    best = min(range(len(iters)), key=lambda k: series["f_fgw"][k]) if iters else 0
    cols = ", ".join(
        f'"{key}": [{", ".join(f"{v:.6f}" for v in vals)}]' for key, vals in series.items()
    )
    print('{"iter": [' + ", ".join(str(i) for i in iters) + "], " + cols
          + f', "min_fgw_iter": {iters[best] if iters else 0}}}')
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "align":
            return _cmd_align(args)
        if args.command == "eval":
            return _cmd_eval(args)
        if args.command == "synth":
            return _cmd_synth(args, parser)
        return _cmd_trace_plot_data(args)
    except SystemExit as exc:  # parser.error inside a command
        return int(exc.code or 0)
    except (OSError, GraphFormatError, EmbeddingFormatError, ValueError) as exc:
        print(f"kgalign: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
