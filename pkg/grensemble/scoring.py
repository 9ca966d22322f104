"""Smatch scoring.

Per-sentence scores come from the best vertex match between prediction and
gold. Corpus scores are micro averages: matched, predicted and gold triple
counts are summed over sentences before precision, recall and F1 are formed.
"""

import functools
import logging
import pandas as pd  # type: ignore
from collections.abc import Sequence
from dataclasses import dataclass
from scipy import stats  # type: ignore
from typing import Any, Optional
from .alignment import MatcherParams, best_match, brute_force_match, support_of
from .const import UNLABELED_EDGE
from .exceptions import DegenerateVariance
from .graph import LabeledGraph, relabel_edges, triple_count
from .penman_io import Corpus, CorpusEntry, align_corpora
from .workers import ordered_map

_LOGGER = logging.getLogger(__name__)


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


@dataclass(frozen=True)
class SmatchScore:
    matched: int
    pred_triples: int
    gold_triples: int

    @property
    def precision(self) -> float:
        return _ratio(self.matched, self.pred_triples)

    @property
    def recall(self) -> float:
        return _ratio(self.matched, self.gold_triples)

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: "SmatchScore") -> "SmatchScore":
        return SmatchScore(
            self.matched + other.matched,
            self.pred_triples + other.pred_triples,
            self.gold_triples + other.gold_triples,
        )

    @classmethod
    def zero(cls) -> "SmatchScore":
        return cls(0, 0, 0)

    def to_dict(self) -> dict[str, float]:
        return {"P": self.precision, "R": self.recall, "F1": self.f1}


def smatch(pred: LabeledGraph, gold: LabeledGraph, params: MatcherParams = MatcherParams(),
           exact: bool = False) -> SmatchScore:
    """Smatch of pred against gold.

    exact=True uses the brute force matcher (small graphs only).
    """
    matcher = brute_force_match if exact else best_match
    match = matcher(pred, gold, params)
    return SmatchScore(
        match.score,
        triple_count(pred, with_top=params.match_root),
        triple_count(gold, with_top=params.match_root),
    )


def smatch_unlabeled(pred: LabeledGraph, gold: LabeledGraph, params: MatcherParams = MatcherParams(),
                     exact: bool = False) -> SmatchScore:
    """Smatch after replacing every edge label with one sentinel."""
    return smatch(relabel_edges(pred, UNLABELED_EDGE), relabel_edges(gold, UNLABELED_EDGE), params, exact)


def _score_pair(pair: tuple[CorpusEntry, CorpusEntry], params: MatcherParams, unlabeled: bool) -> SmatchScore:
    pred, gold = pair
    if unlabeled:
        return smatch_unlabeled(pred.graph, gold.graph, params)
    return smatch(pred.graph, gold.graph, params)


def entry_scores(preds: Corpus, golds: Corpus, params: MatcherParams = MatcherParams(),
                 jobs: int = 1, unlabeled: bool = False) -> list[tuple[CorpusEntry, SmatchScore]]:
    """Per-sentence scores of aligned prediction and gold entries.

    :raises LengthMismatch: ordinal alignment with different lengths
    :raises IdMismatch: ::id alignment failed
    """
    pairs = [(p, g) for p, g in align_corpora([preds, golds])]
    scores = ordered_map(functools.partial(_score_pair, params=params, unlabeled=unlabeled), pairs, jobs)
    return [(pred, score) for (pred, _), score in zip(pairs, scores)]


def corpus_smatch(preds: Corpus, golds: Corpus, params: MatcherParams = MatcherParams(),
                  jobs: int = 1, unlabeled: bool = False) -> SmatchScore:
    """Micro-averaged Smatch of a prediction corpus."""
    return sum((s for _, s in entry_scores(preds, golds, params, jobs, unlabeled)), SmatchScore.zero())


def score_entries(preds: Corpus, golds: Corpus, params: MatcherParams = MatcherParams(),
                  jobs: int = 1, unlabeled: bool = False) -> pd.DataFrame:
    rows = []
    for entry, score in entry_scores(preds, golds, params, jobs, unlabeled):
        rows.append({
            "id": entry.id if entry.id is not None else str(entry.ordinal),
            "matched": score.matched,
            "pred_triples": score.pred_triples,
            "gold_triples": score.gold_triples,
            "precision": score.precision,
            "recall": score.recall,
            "f1": score.f1,
        })
    return pd.DataFrame(rows, columns=["id", "matched", "pred_triples", "gold_triples",
                                       "precision", "recall", "f1"])


def normalized_support(pred: LabeledGraph, inputs: Sequence[LabeledGraph],
                       params: MatcherParams = MatcherParams()) -> float:
    """Total support of pred against inputs divided by its triple count."""
    triples = triple_count(pred, with_top=params.match_root)
    if not triples:
        return 0.0
    return support_of(pred, inputs, params).total / triples


def _support_row(item: tuple[LabeledGraph, LabeledGraph, tuple[LabeledGraph, ...]],
                 params: MatcherParams) -> tuple[float, float]:
    pred, gold, inputs = item
    return normalized_support(pred, inputs, params), smatch(pred, gold, params).f1


def support_smatch_frame(preds: Corpus, golds: Corpus, inputs: Sequence[Corpus],
                         params: MatcherParams = MatcherParams(), jobs: int = 1) -> pd.DataFrame:
    """Per-sentence normalized support of preds against inputs, with Smatch f1 against golds."""
    rows = align_corpora([preds, golds, *inputs])
    items = [(row[0].graph, row[1].graph, tuple(e.graph for e in row[2:])) for row in rows]
    values = ordered_map(functools.partial(_support_row, params=params), items, jobs)
    return pd.DataFrame({
        "id": [row[0].id if row[0].id is not None else str(row[0].ordinal) for row in rows],
        "support": [v[0] for v in values],
        "f1": [v[1] for v in values],
    })


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Pearson r and two-sided p-value.

    :raises DegenerateVariance: either series is constant
    """
    if len(set(x)) < 2 or len(set(y)) < 2:
        raise DegenerateVariance("correlation is undefined for a constant series")
    result = stats.pearsonr(x, y)
    return float(result[0]), float(result[1])


def support_smatch_correlation(preds: Corpus, golds: Corpus, inputs: Sequence[Corpus],
                               params: MatcherParams = MatcherParams(), jobs: int = 1) -> tuple[float, float]:
    frame = support_smatch_frame(preds, golds, inputs, params, jobs)
    return pearson(list(frame["support"]), list(frame["f1"]))


def score_report(preds: Corpus, golds: Corpus, inputs: Optional[Sequence[Corpus]] = None,
                 params: MatcherParams = MatcherParams(), jobs: int = 1) -> dict[str, Any]:
    """JSON-ready score report.

    correlation is only computed when the ensemble inputs are given; it is
    None when undefined.
    """
    frame = score_entries(preds, golds, params, jobs)
    overall = SmatchScore(
        int(frame["matched"].sum()), int(frame["pred_triples"].sum()), int(frame["gold_triples"].sum())
    )
    report: dict[str, Any] = {
        "overall": overall.to_dict(),
        "macro_f1": float(frame["f1"].mean()) if len(frame) else 0.0,
        "per_sentence": frame.to_dict(orient="records"),
        "correlation": None,
    }
    if inputs:
        try:
            r, p_value = support_smatch_correlation(preds, golds, inputs, params, jobs)
            report["correlation"] = {"pearson_r": r, "p_value": p_value}
        except DegenerateVariance as e:
            _LOGGER.warning("%s", e)
    return report
