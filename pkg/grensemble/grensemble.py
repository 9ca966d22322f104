"""Main grensemble module.

This module defines the Grensemble class which implements the file-level
operations (ensemble, score, match, stats, synth) in a UI-independent way.
"""

import json
import logging
import pathlib
import pandas as pd  # type: ignore
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Optional, Union
from .alignment import VertexMatch, best_match, brute_force_match
from .config import Config
from .exceptions import DegenerateVariance, EmptyCollection
from .graph import LabeledGraph
from .voting import ensemble_corpus
from .penman_io import Corpus, read_corpus, write_corpus
from .scoring import SmatchScore, pearson, score_entries, score_report, support_smatch_frame
from .synth import NoiseSpec, synth_corpora

_LOGGER = logging.getLogger(__name__)

PathLike = Union[str, pathlib.Path]


def _write_json(path: PathLike, data: Any) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
    _LOGGER.info("wrote report to %s", path)


def format_mapping(g1: LabeledGraph, match: VertexMatch) -> str:
    """Mapping of the non-constant nodes of g1, e.g. "1→3 2→2 3→1"."""
    return " ".join(
        f"{v}→{match.mapping[v]}" for v in g1.nodes
        if v in match.mapping and not g1.is_constant(v)
    )


@dataclass
class Stats:
    per_sentence: pd.DataFrame
    summary: pd.DataFrame
    pivot_frequencies: pd.DataFrame
    correlation: Optional[tuple[float, float]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "summary": self.summary.to_dict(orient="records"),
            "pivot_frequencies": self.pivot_frequencies.to_dict(orient="records"),
            "correlation": None if self.correlation is None else {
                "pearson_r": self.correlation[0],
                "p_value": self.correlation[1],
            },
            "per_sentence": self.per_sentence.to_dict(orient="records"),
        }


class Grensemble:
    def __init__(self, config: Config):
        self.config = config

    def read(self, path: PathLike) -> Corpus:
        return read_corpus(path, strict=self.config.strict, amr_mode=self.config.amr_mode)

    def read_all(self, paths: Sequence[PathLike]) -> list[Corpus]:
        return [self.read(p) for p in paths]

    def ensemble(self, corpora: Sequence[Corpus], pivot: Optional[int] = None) -> tuple[Corpus, pd.DataFrame]:
        corpus, report = ensemble_corpus(corpora, self.config.ensemble_config(pivot), self.config.jobs,
                                         self.config.amr_mode)
        return corpus, pd.DataFrame(report)

    def ensemble_files(self, pred_paths: Sequence[PathLike], out_path: Optional[PathLike] = None,
                       report_path: Optional[PathLike] = None,
                       pivot: Optional[int] = None) -> tuple[Corpus, pd.DataFrame]:
        """Ensemble prediction files into out_path (if given)."""
        if not pred_paths:
            raise EmptyCollection("at least one prediction file is required")
        corpus, report = self.ensemble(self.read_all(pred_paths), pivot)
        if out_path is not None:
            write_corpus(out_path, corpus, self.config.amr_mode)
        if report_path is not None:
            _write_json(report_path, report.to_dict(orient="records"))
        truncated = int(report["truncated"].sum()) if len(report) else 0
        if truncated:
            _LOGGER.warning("%d entries were truncated to what their root reaches", truncated)
        return corpus, report

    def score_files(self, pred_path: PathLike, gold_path: PathLike,
                    report_path: Optional[PathLike] = None,
                    input_paths: Sequence[PathLike] = (),
                    unlabeled: bool = False) -> tuple[SmatchScore, pd.DataFrame]:
        preds, golds = self.read(pred_path), self.read(gold_path)
        params = self.config.matcher_params()
        frame = score_entries(preds, golds, params, self.config.jobs, unlabeled)
        score = SmatchScore(
            int(frame["matched"].sum()), int(frame["pred_triples"].sum()), int(frame["gold_triples"].sum())
        )
        if report_path is not None:
            inputs = self.read_all(input_paths) if input_paths else None
            _write_json(report_path, score_report(preds, golds, inputs, params, self.config.jobs))
        return score, frame

    def match_files(self, path1: PathLike, path2: PathLike,
                    exact: bool = False) -> tuple[LabeledGraph, LabeledGraph, VertexMatch]:
        """Match the first graph of each file."""
        corpus1, corpus2 = self.read(path1), self.read(path2)
        if not len(corpus1) or not len(corpus2):
            raise EmptyCollection("both files must contain a graph")
        g1, g2 = corpus1[0].graph, corpus2[0].graph
        matcher = brute_force_match if exact else best_match
        return g1, g2, matcher(g1, g2, self.config.matcher_params())

    def stats(self, pred_paths: Sequence[PathLike], gold_path: PathLike,
              report_path: Optional[PathLike] = None) -> Stats:
        """Support and Smatch of every input model and of their ensemble.

        The correlation pools the per-sentence values of all systems.
        """
        if not pred_paths:
            raise EmptyCollection("at least one prediction file is required")
        preds = self.read_all(pred_paths)
        golds = self.read(gold_path)
        params = self.config.matcher_params()
        ensembled, report = self.ensemble(preds)

        systems = [(str(p), c) for p, c in zip(pred_paths, preds)] + [("ensemble", ensembled)]
        frames = []
        for name, corpus in systems:
            frame = support_smatch_frame(corpus, golds, preds, params, self.config.jobs)
            frame.insert(0, "system", name)
            frames.append(frame)
        per_sentence = pd.concat(frames, ignore_index=True)

        summary = (per_sentence.groupby("system", sort=False)[["support", "f1"]]
                   .mean().reset_index())
        counts = report["pivot_index"].value_counts().reindex(range(len(preds)), fill_value=0)
        pivot_frequencies = pd.DataFrame({
            "pivot_index": list(range(len(preds))),
            "system": [str(p) for p in pred_paths],
            "selected": [int(c) for c in counts],
        })

        correlation: Optional[tuple[float, float]]
        try:
            correlation = pearson(list(per_sentence["support"]), list(per_sentence["f1"]))
        except DegenerateVariance as e:
            _LOGGER.warning("%s", e)
            correlation = None

        result = Stats(per_sentence, summary, pivot_frequencies, correlation)
        if report_path is not None:
            _write_json(report_path, result.to_dict())
        return result

    def synth(self, out_dir: PathLike, n_sentences: int = 100, m: int = 5, n_nodes: int = 20,
              density: float = 1.2, noise: NoiseSpec = NoiseSpec(),
              correlated: bool = False) -> list[pathlib.Path]:
        """Write gold.txt and pred_0.txt ... pred_{m-1}.txt into out_dir."""
        out_dir = pathlib.Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        gold, preds = synth_corpora(n_sentences, m, n_nodes, density, noise, self.config.seed, correlated)
        paths = [out_dir / "gold.txt"]
        write_corpus(paths[0], gold, self.config.amr_mode)
        for k, corpus in enumerate(preds):
            paths.append(out_dir / f"pred_{k}.txt")
            write_corpus(paths[-1], corpus, self.config.amr_mode)
        return paths
