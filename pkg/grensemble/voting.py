"""Graph ensembling by pivot voting.

Every input graph takes a turn as the pivot. The other graphs are matched to
the pivot and vote for the labels of its nodes and edges (including edges the
pivot lacks between its own nodes). Labels with at least theta votes survive.
The corrected pivot with the largest total support against all inputs is the
ensemble.
"""

import functools
import logging
import math
import random
import time
import networkx as nx  # type: ignore
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any, Optional, Union
from .alignment import MatcherParams, SupportMap, VertexMatch, best_match, support_of
from .const import (
    DEFAULT_THETA,
    MODE_STRICT,
    MODE_VALID_AMR,
    TIE_FIRST_PIVOT,
    TIE_STABLE_RNG,
)
from .exceptions import EmptyCollection, GrensembleValueError
from .graph import Edge, Label, LabeledGraph, NodeId
from .penman_io import Corpus, CorpusEntry, align_corpora, serializable
from .workers import ordered_map

_LOGGER = logging.getLogger(__name__)

MODES = (MODE_VALID_AMR, MODE_STRICT)
TIE_POLICIES = (TIE_FIRST_PIVOT, TIE_STABLE_RNG)

Theta = Union[int, float]


@dataclass
class VoteTable:
    node_votes: dict[NodeId, Counter[Label]] = field(default_factory=dict)
    edge_votes: dict[Edge, Counter[Label]] = field(default_factory=dict)
    contributors: int = 0


@dataclass(frozen=True)
class EnsembleConfig:
    """Ensemble parameters.

    theta is a vote count (int) or a fraction of the number of inputs (float
    in (0, 1]), see resolve_theta. pivot fixes a single pivot index instead of
    trying every input.
    """
    theta: Theta = DEFAULT_THETA
    mode: str = MODE_VALID_AMR
    tie_policy: str = TIE_FIRST_PIVOT
    matcher: MatcherParams = field(default_factory=MatcherParams)
    pivot: Optional[int] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise GrensembleValueError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.tie_policy not in TIE_POLICIES:
            raise GrensembleValueError(f"unknown tie policy {self.tie_policy!r}, expected one of {TIE_POLICIES}")


@dataclass(frozen=True)
class EnsembleResult:
    graph: LabeledGraph
    pivot_index: int
    support: SupportMap
    # totals for every pivot tried, in pivot order
    per_pivot_supports: list[int]
    theta: int


def default_theta(m: int) -> int:
    """Smallest theta with theta / m >= 0.5."""
    if m < 1:
        raise GrensembleValueError(f"need at least one graph, got {m}")
    return math.ceil(m / 2)


def resolve_theta(theta: Theta, m: int) -> int:
    """Turn a vote count or a fraction of m into a vote count in [1, m].

    :raises GrensembleValueError: theta does not resolve into [1, m]
    """
    if isinstance(theta, bool):
        raise GrensembleValueError(f"invalid theta {theta!r}")
    if isinstance(theta, float):
        if not 0 < theta <= 1:
            raise GrensembleValueError(f"fractional theta must be in (0, 1], got {theta}")
        # 1e-9 absorbs float error, e.g. 0.6 * 5
        resolved = max(1, math.ceil(theta * m - 1e-9))
    else:
        resolved = int(theta)
    if not 1 <= resolved <= m:
        raise GrensembleValueError(f"theta {theta} resolves to {resolved}, outside [1, {m}]")
    return resolved


def init_votes(pivot: LabeledGraph) -> VoteTable:
    return VoteTable(
        node_votes={v: Counter({label: 1}) for v, label in pivot.nodes.items()},
        edge_votes={e: Counter({label: 1}) for e, label in pivot.edges.items()},
        contributors=1,
    )


def poll_votes(table: VoteTable, pivot: LabeledGraph, other: LabeledGraph, match: VertexMatch) -> VoteTable:
    """Add the votes of `other`, matched to the pivot by `match`.

    Edges of `other` with an unmapped endpoint cast no vote.
    """
    inverse = {target: source for source, target in match.mapping.items()}
    for v, mapped in match.mapping.items():
        table.node_votes[v][other.nodes[mapped]] += 1
    for (a, b), label in other.edges.items():
        if a in inverse and b in inverse:
            key = (inverse[a], inverse[b])
            table.edge_votes.setdefault(key, Counter())[label] += 1
    table.contributors += 1
    return table


def _winner(votes: Counter[Label], own: Optional[Label]) -> tuple[Label, int]:
    """Label with the most votes; the pivot's own label wins ties, then the smallest label."""
    best = max(votes.values())
    tied = [label for label, count in votes.items() if count == best]
    if own in tied:
        return own, best  # type: ignore[return-value]
    return min(tied), best


def _assemble(pivot: LabeledGraph, labels: dict[NodeId, Label], edges: dict[Edge, Label]) -> LabeledGraph:
    """Graph over the surviving pivot nodes; constants without an incoming edge are dropped."""
    edges = {(s, t): label for (s, t), label in edges.items() if s in labels and t in labels}
    targets = {t for _, t in edges}
    keep = [v for v in pivot.nodes if v in labels and (not pivot.is_constant(v) or v in targets)]
    nodes = {v: labels[v] for v in keep}
    root = pivot.root if pivot.root in nodes else None
    return LabeledGraph(nodes, edges, root, pivot.constants & set(nodes))


def _filter_strict(table: VoteTable, pivot: LabeledGraph, theta: int) -> LabeledGraph:
    labels = {}
    for v in pivot.nodes:
        label, count = _winner(table.node_votes[v], pivot.nodes[v])
        if count >= theta:
            labels[v] = label
    edges = {}
    for e, votes in table.edge_votes.items():
        if e[0] not in labels or e[1] not in labels:
            continue
        label, count = _winner(votes, pivot.edges.get(e))
        if count >= theta:
            edges[e] = label
    return _assemble(pivot, labels, edges)


def _components(nodes: set[NodeId], edges: dict[Edge, Label]) -> int:
    undirected = nx.Graph()
    undirected.add_nodes_from(nodes)
    undirected.add_edges_from((s, t) for s, t in edges if s in nodes and t in nodes)
    return int(nx.number_connected_components(undirected))


def _filter_valid(table: VoteTable, pivot: LabeledGraph, theta: int) -> LabeledGraph:
    labels = {}
    weak = []
    for v in pivot.nodes:
        label, count = _winner(table.node_votes[v], pivot.nodes[v])
        labels[v] = label
        if count < theta and v != pivot.root:
            weak.append(v)

    # pivot edges always survive with their endpoints, new edges need theta votes
    edges = {}
    for e, votes in table.edge_votes.items():
        label, count = _winner(votes, pivot.edges.get(e))
        if e in pivot.edges or count >= theta:
            edges[e] = label

    survivors = set(pivot.nodes)
    for v in weak:
        if v not in survivors:
            continue
        remaining = survivors - {v}
        # constants hanging only from v go with it
        orphans = {
            c for c in remaining
            if pivot.is_constant(c) and not any(s in remaining for (s, t) in edges if t == c)
        }
        remaining -= orphans
        if _components(remaining, edges) <= _components(survivors, edges):
            survivors = remaining
        else:
            _LOGGER.debug("keeping %s (%s) to preserve connectivity", v, labels[v])
    return _assemble(pivot, {v: labels[v] for v in pivot.nodes if v in survivors}, edges)


def filter_votes(table: VoteTable, pivot: LabeledGraph, config: EnsembleConfig) -> LabeledGraph:
    """Keep the winning label of every element that reaches theta votes.

    theta is resolved against table.contributors. In valid_amr mode the pivot
    root and pivot edges between surviving nodes are always kept, and a node
    below theta is only dropped when that does not split the graph.
    """
    if not pivot.nodes:
        return pivot
    theta = resolve_theta(config.theta, table.contributors)
    if config.mode == MODE_STRICT:
        return _filter_strict(table, pivot, theta)
    return _filter_valid(table, pivot, theta)


def _corrected_pivot(graphs: Sequence[LabeledGraph], i: int, config: EnsembleConfig) -> LabeledGraph:
    pivot = graphs[i]
    table = init_votes(pivot)
    for j, other in enumerate(graphs):
        if j != i:
            poll_votes(table, pivot, other, best_match(pivot, other, config.matcher))
    return filter_votes(table, pivot, config)


def _enforce_support(graph: LabeledGraph, graphs: Sequence[LabeledGraph], theta: int,
                     params: MatcherParams) -> tuple[LabeledGraph, SupportMap]:
    """Drop elements whose support against `graphs` is below theta until none is left.

    Support is recomputed with fresh matches after every pass, so the returned
    support is exactly what is_theta_supported sees.
    """
    while True:
        support = support_of(graph, graphs, params)
        weak_nodes = {v for v, s in support.node_support.items() if s < theta}
        weak_edges = {e for e, s in support.edge_support.items() if s < theta}
        if not weak_nodes and not weak_edges:
            return graph, support
        _LOGGER.debug("dropping %d nodes and %d edges below theta %d",
                      len(weak_nodes), len(weak_edges), theta)
        labels = {v: label for v, label in graph.nodes.items() if v not in weak_nodes}
        edges = {e: label for e, label in graph.edges.items() if e not in weak_edges}
        graph = _assemble(graph, labels, edges)


def ensemble(graphs: Sequence[LabeledGraph], config: EnsembleConfig = EnsembleConfig()) -> EnsembleResult:
    """Ensemble a collection of graphs of the same sentence.

    In strict mode every element of the result has support >= theta against
    `graphs`, as measured by support_of with fresh matches.

    :raises EmptyCollection: no graphs
    :raises GrensembleValueError: theta or the fixed pivot is out of range
    """
    if not graphs:
        raise EmptyCollection("cannot ensemble an empty collection of graphs")
    m = len(graphs)
    theta = resolve_theta(config.theta, m)
    if config.pivot is not None:
        if not 0 <= config.pivot < m:
            raise GrensembleValueError(f"pivot {config.pivot} out of range for {m} graphs")
        pivots = [config.pivot]
    else:
        pivots = list(range(m))

    candidates = []
    for i in pivots:
        corrected = _corrected_pivot(graphs, i, config)
        if config.mode == MODE_STRICT:
            corrected, support = _enforce_support(corrected, graphs, theta, config.matcher)
        else:
            support = support_of(corrected, graphs, config.matcher,
                                 pivot_index=i if corrected == graphs[i] else None)
        _LOGGER.debug("pivot %d: total support %d", i, support.total)
        candidates.append((i, corrected, support))

    totals = [support.total for _, _, support in candidates]
    best = max(totals)
    tied = [k for k, total in enumerate(totals) if total == best]
    if config.tie_policy == TIE_STABLE_RNG:
        chosen = random.Random(config.matcher.seed).choice(tied)
    else:
        chosen = tied[0]
    pivot_index, graph, support = candidates[chosen]
    return EnsembleResult(graph, pivot_index, support, totals, theta)


def _ensemble_entry(graphs: tuple[LabeledGraph, ...], config: EnsembleConfig) -> tuple[EnsembleResult, float]:
    start = time.perf_counter()
    result = ensemble(graphs, config)
    return result, (time.perf_counter() - start) * 1000


def ensemble_corpus(corpora: Sequence[Corpus], config: EnsembleConfig = EnsembleConfig(),
                    jobs: int = 1, amr_mode: bool = True) -> tuple[Corpus, list[dict[str, Any]]]:
    """Ensemble aligned prediction corpora entry by entry.

    The output entries carry the metadata of the first corpus. Returns the
    ensemble corpus and one report row per entry.

    :raises EmptyCollection: no corpora
    :raises LengthMismatch: ordinal alignment with different lengths
    :raises IdMismatch: ::id alignment failed
    """
    if not corpora:
        raise EmptyCollection("no prediction corpora")
    rows = align_corpora(corpora)
    items = [tuple(e.graph for e in row) for row in rows]
    _LOGGER.info("ensembling %d entries from %d corpora", len(items), len(corpora))
    results = ordered_map(functools.partial(_ensemble_entry, config=config), items, jobs)

    entries = []
    report = []
    for ordinal, (row, (result, elapsed_ms)) in enumerate(zip(rows, results)):
        first = row[0]
        entries.append(CorpusEntry(ordinal, result.graph, dict(first.metadata), first.comments))
        _, truncated = serializable(result.graph, amr_mode)
        report.append({
            "id": first.id if first.id is not None else str(first.ordinal),
            "pivot_index": result.pivot_index,
            "per_pivot_supports": result.per_pivot_supports,
            "theta": result.theta,
            "mode": config.mode,
            "elapsed_ms": round(elapsed_ms, 3),
            "pivot_count": len(result.per_pivot_supports),
            "truncated": truncated,
        })
    return Corpus(entries), report
