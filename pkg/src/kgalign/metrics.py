"""Ranking and classification metrics for alignment quality."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kg import GoldAlignment


@dataclass(frozen=True)
class RankingReport:
    hit1: float
    hit10: float
    mrr: float
    per_k: dict[int, float]

    def to_json_dict(self) -> dict:
        return {"hit1": self.hit1, "hit10": self.hit10, "mrr": self.mrr}


@dataclass(frozen=True)
class ClassificationReport:
    precision: float
    recall: float
    f1: float

    def to_json_dict(self) -> dict:
        return {"precision": self.precision, "recall": self.recall, "f1": self.f1}


def _rank_in_row(row: np.ndarray, col: int) -> int:
    """1-based descending rank of ``row[col]``; ties rank lower columns first."""
    v = row[col]
    better = int(np.count_nonzero(row > v))
    tied_before = int(np.count_nonzero(row[:col] == v))
    return better + tied_before + 1


def ranking_metrics(pi: np.ndarray, gold: GoldAlignment, ks=(1, 10),
                    bidirectional: bool = False) -> RankingReport:
    """Hit@K and mean reciprocal rank of the reference pairs under a coupling.

    For each reference pair (i, j), j is ranked among row i of the coupling
    sorted descending.  By default ranking is one-directional; with
    ``bidirectional`` the column-wise ranks are averaged in as well.
    """
    pi = np.asarray(pi)
    if len(gold) == 0:
        raise ValueError("reference alignment is empty")
    ks = sorted(set(ks) | {1, 10})
    ranks = [_rank_in_row(pi[i], j) for i, j in gold.pairs]
    if bidirectional:
        ranks += [_rank_in_row(pi[:, j], i) for i, j in gold.pairs]
    ranks = np.array(ranks, dtype=np.float64)
    per_k = {k: float(np.mean(ranks <= k)) for k in ks}
    return RankingReport(per_k[1], per_k[10], float(np.mean(1.0 / ranks)), per_k)


def classification_metrics(pred, gold: GoldAlignment) -> ClassificationReport:
    """Precision/recall/F1 of predicted pairs against the reference set."""
    if len(gold) == 0:
        raise ValueError("reference alignment is empty")
    pred = set(pred)
    correct = len(pred & set(gold.pairs))
    precision = correct / len(pred) if pred else 0.0
    recall = correct / len(gold)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return ClassificationReport(precision, recall, f1)
