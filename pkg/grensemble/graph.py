"""Labeled graph data model.

A LabeledGraph is a rooted, node-labeled, edge-labeled directed graph. It is
the unit of prediction, matching and ensembling in grensemble. Constants
(polarity "-", numbers, quoted strings) are leaf nodes flagged as constant so
that voting and matching can treat every labeled element the same way.

Graphs are immutable after construction and can be shared between worker
processes.
"""

import enum
import logging
import networkx as nx  # type: ignore
from collections.abc import Iterable, Mapping
from types import MappingProxyType
from typing import NamedTuple, Optional, Union
from .exceptions import DanglingEndpoint, DuplicateEdge, EmptyLabel, GraphError

_LOGGER = logging.getLogger(__name__)

NodeId = str
Label = str
Edge = tuple[NodeId, NodeId]
EdgeSpec = Union[Mapping[Edge, Label], Iterable[tuple[NodeId, NodeId, Label]]]


class TripleKind(str, enum.Enum):
    INSTANCE = "instance"
    RELATION = "relation"
    ATTRIBUTE = "attribute"
    TOP = "top"

    def __str__(self):
        return self.value


class Triple(NamedTuple):
    """Smatch-style triple.

    instance:  (INSTANCE, "instance", node, concept)
    relation:  (RELATION, role, source node, target node)
    attribute: (ATTRIBUTE, role, source node, constant value)
    top:       (TOP, "TOP", root node, root concept)
    """
    kind: TripleKind
    relation: str
    source: NodeId
    target: str


def constant_id(source: NodeId, role: Label, value: Label, taken: Optional[set[NodeId]] = None) -> NodeId:
    """Synthesize the node id of a constant attached to `source` by `role`.

    The same literal attached twice by the same role gets a numbered suffix.
    """
    base = f"{source}{role}={value}"
    if taken is None or base not in taken:
        return base
    n = 2
    while f"{base}#{n}" in taken:
        n += 1
    return f"{base}#{n}"


def _iter_edges(edges: EdgeSpec) -> Iterable[tuple[NodeId, NodeId, Label]]:
    if isinstance(edges, Mapping):
        for (source, target), label in edges.items():
            yield source, target, label
    else:
        yield from edges


class LabeledGraph:
    """Rooted labeled directed graph.

    Iteration order of nodes and edges is insertion order.
    """

    def __init__(
        self,
        nodes: Mapping[NodeId, Label],
        edges: EdgeSpec = (),
        root: Optional[NodeId] = None,
        constants: Iterable[NodeId] = (),
    ):
        self._nodes: dict[NodeId, Label] = {}
        for node, label in nodes.items():
            if not node:
                raise GraphError("empty node id")
            if not isinstance(label, str) or not label:
                raise EmptyLabel(node)
            self._nodes[node] = label

        self._edges: dict[Edge, Label] = {}
        for source, target, label in _iter_edges(edges):
            if not isinstance(label, str) or not label:
                raise EmptyLabel((source, target))
            for endpoint in (source, target):
                if endpoint not in self._nodes:
                    raise DanglingEndpoint(source, target, endpoint)
            if (source, target) in self._edges:
                raise DuplicateEdge(source, target)
            self._edges[(source, target)] = label

        self._constants = frozenset(constants)
        for c in self._constants:
            if c not in self._nodes:
                raise GraphError(f"constant {c} is not a node")

        self._out: dict[NodeId, list[NodeId]] = {n: [] for n in self._nodes}
        self._in: dict[NodeId, list[NodeId]] = {n: [] for n in self._nodes}
        for source, target in self._edges:
            self._out[source].append(target)
            self._in[target].append(source)

        for c in self._constants:
            if self._out[c]:
                raise GraphError(f"constant {c} has outgoing edges")
            if not self._in[c]:
                raise GraphError(f"constant {c} has no incoming edge")

        if root is not None:
            if root not in self._nodes:
                raise GraphError(f"root {root} is not a node")
            if root in self._constants:
                raise GraphError(f"root {root} is a constant")
        self._root = root

    @property
    def nodes(self) -> Mapping[NodeId, Label]:
        return MappingProxyType(self._nodes)

    @property
    def edges(self) -> Mapping[Edge, Label]:
        return MappingProxyType(self._edges)

    @property
    def root(self) -> Optional[NodeId]:
        return self._root

    @property
    def constants(self) -> frozenset[NodeId]:
        return self._constants

    def is_constant(self, node: NodeId) -> bool:
        return node in self._constants

    def successors(self, node: NodeId) -> list[NodeId]:
        return list(self._out[node])

    def predecessors(self, node: NodeId) -> list[NodeId]:
        return list(self._in[node])

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return (
            self._nodes == other._nodes
            and self._edges == other._edges
            and self._root == other._root
            and self._constants == other._constants
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (f"LabeledGraph(nodes={self._nodes!r}, edges={self._edges!r}, "
                f"root={self._root!r}, constants={sorted(self._constants)!r})")


def build_graph(
    nodes: Mapping[NodeId, Label],
    edges: EdgeSpec = (),
    root: Optional[NodeId] = None,
    constants: Iterable[NodeId] = (),
) -> LabeledGraph:
    """Build and validate a LabeledGraph.

    :raises DuplicateEdge: two labels for one ordered node pair
    :raises DanglingEndpoint: an edge endpoint is not a node
    :raises EmptyLabel: a node or edge has an empty label
    """
    g = LabeledGraph(nodes, edges, root, constants)
    _LOGGER.debug("built graph with %d nodes, %d edges", len(g.nodes), len(g.edges))
    return g


def empty_graph() -> LabeledGraph:
    return LabeledGraph({})


def to_triples(g: LabeledGraph) -> list[Triple]:
    """Return the Smatch triples of `g`: top, instances, then edges."""
    triples: list[Triple] = []
    if g.root is not None:
        triples.append(Triple(TripleKind.TOP, "TOP", g.root, g.nodes[g.root]))
    for node, label in g.nodes.items():
        if not g.is_constant(node):
            triples.append(Triple(TripleKind.INSTANCE, "instance", node, label))
    for (source, target), label in g.edges.items():
        if g.is_constant(target):
            triples.append(Triple(TripleKind.ATTRIBUTE, label, source, g.nodes[target]))
        else:
            triples.append(Triple(TripleKind.RELATION, label, source, target))
    return triples


def from_triples(triples: Iterable[Triple]) -> LabeledGraph:
    """Rebuild a graph from its triples (inverse of to_triples)."""
    nodes: dict[NodeId, Label] = {}
    edges: list[tuple[NodeId, NodeId, Label]] = []
    constants: list[NodeId] = []
    root = None
    pending = []
    for t in triples:
        kind = TripleKind(t.kind)
        if kind is TripleKind.TOP:
            root = t.source
        elif kind is TripleKind.INSTANCE:
            nodes[t.source] = t.target
        else:
            pending.append((kind, t))
    for kind, t in pending:
        if kind is TripleKind.RELATION:
            edges.append((t.source, t.target, t.relation))
        else:
            c = constant_id(t.source, t.relation, t.target, set(nodes))
            nodes[c] = t.target
            constants.append(c)
            edges.append((t.source, c, t.relation))
    return LabeledGraph(nodes, edges, root, constants)


def triple_count(g: LabeledGraph, with_top: bool = True) -> int:
    count = len(g.nodes) - len(g.constants) + len(g.edges)
    if with_top and g.root is not None:
        count += 1
    return count


def size(g: LabeledGraph) -> tuple[int, int]:
    return len(g.nodes), len(g.edges)


def to_networkx(g: LabeledGraph) -> nx.DiGraph:
    nxg = nx.DiGraph()
    for node, label in g.nodes.items():
        nxg.add_node(node, label=label, constant=g.is_constant(node))
    for (source, target), label in g.edges.items():
        nxg.add_edge(source, target, label=label)
    return nxg


def is_connected(g: LabeledGraph) -> bool:
    """Connectivity of the undirected view. The empty graph is connected."""
    if not g.nodes:
        return True
    return bool(nx.is_weakly_connected(to_networkx(g)))


def relabel_edges(g: LabeledGraph, label: Label) -> LabeledGraph:
    """Return a copy of `g` with every edge label replaced by `label`."""
    return LabeledGraph(g.nodes, {e: label for e in g.edges}, g.root, g.constants)


def subgraph(g: LabeledGraph, keep: Iterable[NodeId]) -> LabeledGraph:
    """Induced subgraph on `keep`.

    Constants that lose every incoming edge are dropped too. The root is kept
    only if it survives.
    """
    kept = set(keep)
    edges = {(s, t): label for (s, t), label in g.edges.items() if s in kept and t in kept}
    targets = {t for _, t in edges}
    kept = {n for n in kept if not g.is_constant(n) or n in targets}
    edges = {(s, t): label for (s, t), label in edges.items() if t in kept}
    nodes = {n: label for n, label in g.nodes.items() if n in kept}
    root = g.root if g.root in kept else None
    return LabeledGraph(nodes, edges, root, g.constants & kept)


def root_component(g: LabeledGraph) -> LabeledGraph:
    """Weakly connected component of the root, rooted.

    Without a root, the first non-constant node becomes the root.
    """
    root = g.root
    if root is None:
        root = next((n for n in g.nodes if not g.is_constant(n)), None)
    if root is None:
        return empty_graph()
    component = nx.node_connected_component(to_networkx(g).to_undirected(as_view=True), root)
    sub = subgraph(g, component)
    return LabeledGraph(sub.nodes, sub.edges, root, sub.constants)
