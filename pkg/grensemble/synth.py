"""Synthetic gold graphs and simulated noisy predictions.

Stands in for trained parsers: every simulated model is the gold graph put
through independent random corruption. Everything is driven by numpy seeds,
per-sentence and per-model seeds are spawned from one SeedSequence.
"""

import logging
import networkx as nx  # type: ignore
import numpy as np
from dataclasses import dataclass, field
from typing import Union
from .exceptions import GrensembleValueError
from .graph import Edge, LabeledGraph, NodeId, root_component, subgraph
from .penman_io import Corpus

_LOGGER = logging.getLogger(__name__)

Seed = Union[int, np.random.SeedSequence, None]


@dataclass(frozen=True)
class Vocabulary:
    concepts: int = 50
    roles: int = 10

    def concept(self, k: int, disjoint: bool = False) -> str:
        return f"x{k}" if disjoint else f"c{k}"

    def role(self, k: int, disjoint: bool = False) -> str:
        return f":x{k}" if disjoint else f":r{k}"


@dataclass(frozen=True)
class NoiseSpec:
    """Per-element corruption probabilities.

    disjoint_vocab makes relabels draw from labels the gold never uses.
    """
    p_node_relabel: float = 0.1
    p_edge_relabel: float = 0.1
    p_edge_delete: float = 0.05
    p_edge_add: float = 0.05
    p_node_delete: float = 0.0
    vocab: Vocabulary = field(default_factory=Vocabulary)
    disjoint_vocab: bool = False
    seed: int = 0

    def __post_init__(self):
        for name in ("p_node_relabel", "p_edge_relabel", "p_edge_delete", "p_edge_add", "p_node_delete"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise GrensembleValueError(f"{name} must be in [0, 1], got {p}")


def random_gold(n_nodes: int, density: float = 1.2, vocab: Vocabulary = Vocabulary(),
                seed: Seed = None) -> LabeledGraph:
    """Random rooted, connected, acyclic graph with about density * n_nodes edges.

    Node z{i} hangs off a random earlier node, extra edges always point
    forward, so z0 is the root and there are no cycles.
    """
    if n_nodes < 1:
        raise GrensembleValueError(f"n_nodes must be >= 1, got {n_nodes}")
    rng = np.random.default_rng(seed)
    ids = [f"z{i}" for i in range(n_nodes)]
    nodes = {v: vocab.concept(int(rng.integers(vocab.concepts))) for v in ids}
    edges: dict[Edge, str] = {}
    for i in range(1, n_nodes):
        parent = int(rng.integers(i))
        edges[(ids[parent], ids[i])] = vocab.role(int(rng.integers(vocab.roles)))

    target = min(max(n_nodes - 1, round(density * n_nodes)), n_nodes * (n_nodes - 1) // 2)
    attempts = 0
    while len(edges) < target and attempts < 100 * n_nodes:
        attempts += 1
        s, t = sorted(int(x) for x in rng.choice(n_nodes, size=2, replace=False))
        if (ids[s], ids[t]) not in edges:
            edges[(ids[s], ids[t])] = vocab.role(int(rng.integers(vocab.roles)))
    return LabeledGraph(nodes, edges, ids[0])


def _new_label(rng: np.random.Generator, old: str, size: int, make, disjoint: bool) -> str:
    if disjoint:
        return make(int(rng.integers(size)), True)
    if size < 2:
        return old
    while True:
        label = make(int(rng.integers(size)))
        if label != old:
            return label


def _components(edges: dict[Edge, str], nodes) -> int:
    g = nx.Graph()
    g.add_nodes_from(nodes)
    g.add_edges_from(edges)
    return int(nx.number_connected_components(g))


def perturb(gold: LabeledGraph, spec: NoiseSpec = NoiseSpec(), seed: Seed = None) -> LabeledGraph:
    """Corrupt a graph: node deletion, edge deletion, edge relabel, edge addition, node relabel.

    The root is never deleted, nodes cut off from the root go with their
    edges, and only edges whose removal keeps the graph in one piece are
    deleted. seed defaults to spec.seed.
    """
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    vocab = spec.vocab
    g = gold

    if spec.p_node_delete > 0:
        keep = [v for v in g.nodes
                if v == g.root or g.is_constant(v) or rng.random() >= spec.p_node_delete]
        g = subgraph(g, keep)
        if g.root is not None:
            g = root_component(g)

    nodes = dict(g.nodes)
    edges = dict(g.edges)

    if spec.p_edge_delete > 0:
        pieces = _components(edges, nodes)
        for e in list(edges):
            if rng.random() < spec.p_edge_delete:
                label = edges.pop(e)
                if _components(edges, nodes) > pieces:
                    edges[e] = label

    for e in edges:
        if rng.random() < spec.p_edge_relabel:
            edges[e] = _new_label(rng, edges[e], vocab.roles, vocab.role, spec.disjoint_vocab)

    sources: list[NodeId] = [v for v in nodes if not g.is_constant(v)]
    if spec.p_edge_add > 0 and len(sources) > 1:
        count = int(rng.binomial(len(edges), spec.p_edge_add))
        added = 0
        attempts = 0
        while added < count and attempts < 10 * (count + 1):
            attempts += 1
            s, t = (sources[int(i)] for i in rng.choice(len(sources), size=2, replace=False))
            if (s, t) in edges:
                continue
            edges[(s, t)] = vocab.role(int(rng.integers(vocab.roles)))
            added += 1

    for v in nodes:
        if not g.is_constant(v) and rng.random() < spec.p_node_relabel:
            nodes[v] = _new_label(rng, nodes[v], vocab.concepts, vocab.concept, spec.disjoint_vocab)

    return LabeledGraph(nodes, edges, g.root, g.constants)


def _seed_sequence(seed: Seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def simulate_predictions(gold: LabeledGraph, spec: NoiseSpec = NoiseSpec(), m: int = 5,
                         seed: Seed = None, correlated: bool = False) -> list[LabeledGraph]:
    """m simulated model outputs for one gold graph.

    With correlated=True every model makes the same errors.
    """
    root_seed = _seed_sequence(spec.seed if seed is None else seed)
    if correlated:
        shared = perturb(gold, spec, root_seed)
        return [shared] * m
    return [perturb(gold, spec, s) for s in root_seed.spawn(m)]


def synth_corpora(n_sentences: int, m: int = 5, n_nodes: int = 20, density: float = 1.2,
                  spec: NoiseSpec = NoiseSpec(), seed: int = 0,
                  correlated: bool = False) -> tuple[Corpus, list[Corpus]]:
    """Gold corpus and m aligned prediction corpora with ids synth.0, synth.1, ..."""
    golds = []
    predictions: list[list[LabeledGraph]] = [[] for _ in range(m)]
    for sentence in np.random.SeedSequence(seed).spawn(n_sentences):
        gold_seed, prediction_seed = sentence.spawn(2)
        gold = random_gold(n_nodes, density, spec.vocab, gold_seed)
        golds.append(gold)
        for k, g in enumerate(simulate_predictions(gold, spec, m, prediction_seed, correlated)):
            predictions[k].append(g)
    ids = [f"synth.{i}" for i in range(n_sentences)]
    _LOGGER.info("generated %d sentences with %d simulated models", n_sentences, m)
    return Corpus.from_graphs(golds, ids), [Corpus.from_graphs(p, ids) for p in predictions]
