"""PENMAN notation and multi-graph corpus files.

Decoding and encoding of single graphs is delegated to the `penman` package;
this module converts between penman graphs and LabeledGraph and handles the
blank-line separated corpus files with their "# ::key value" metadata.
"""

import json
import logging
import pathlib
import re
import penman  # type: ignore
from penman.models import amr as _amr_model  # type: ignore
from penman.models import noop as _noop_model  # type: ignore
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any, Optional, Union
from .const import EMPTY_GRAPH_PENMAN
from .exceptions import (
    CorpusEntryError,
    Disconnected,
    DuplicateVariableConcept,
    GrensembleValueError,
    IdMismatch,
    LengthMismatch,
    NotRooted,
    NotSerializable,
    PenmanSyntaxError,
)
from .graph import (
    LabeledGraph,
    NodeId,
    constant_id,
    empty_graph,
    is_connected,
    root_component,
    subgraph,
    to_triples,
)

_LOGGER = logging.getLogger(__name__)

PathLike = Union[str, pathlib.Path]

_INSTANCE_ROLE = ":instance"
_SYMBOL_RE = re.compile(r"""^[A-Za-z][^\s()/:~"'^]*$""")
_METADATA_SPLIT_RE = re.compile(r"(?:^|\s)::(?=\S)")
_BLOCK_SPLIT_RE = re.compile(r"\n[ \t]*\n")


@dataclass(frozen=True)
class CorpusEntry:
    ordinal: int
    graph: LabeledGraph
    metadata: dict[str, str] = field(default_factory=dict)
    # raw comment lines, written back verbatim
    comments: tuple[str, ...] = ()
    valid: bool = True

    @property
    def id(self) -> Optional[str]:
        return self.metadata.get("id")

    @property
    def snt(self) -> Optional[str]:
        return self.metadata.get("snt")


@dataclass
class Corpus:
    entries: list[CorpusEntry]
    path: Optional[pathlib.Path] = None

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[CorpusEntry]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> CorpusEntry:
        return self.entries[i]

    @property
    def graphs(self) -> list[LabeledGraph]:
        return [e.graph for e in self.entries]

    def ids(self) -> Optional[list[str]]:
        """Entry ids, or None if any entry lacks one."""
        ids = [e.id for e in self.entries]
        if any(i is None for i in ids):
            return None
        return ids  # type: ignore[return-value]

    @classmethod
    def from_graphs(cls, graphs: Sequence[LabeledGraph], ids: Optional[Sequence[str]] = None) -> "Corpus":
        entries = []
        for i, g in enumerate(graphs):
            metadata = {}
            comments: tuple[str, ...] = ()
            if ids is not None:
                metadata = {"id": ids[i]}
                comments = (f"# ::id {ids[i]}",)
            entries.append(CorpusEntry(i, g, metadata, comments))
        return cls(entries)


def parse_metadata(lines: Sequence[str]) -> dict[str, str]:
    """Parse "# ::key value ::key2 value2" comment lines."""
    metadata: dict[str, str] = {}
    for line in lines:
        body = line.lstrip("#").strip()
        for chunk in _METADATA_SPLIT_RE.split(body)[1:]:
            key, _, value = chunk.partition(" ")
            # keys are unique per entry; the first occurrence wins
            metadata.setdefault(key, value.strip())
    return metadata


def _model(amr_mode: bool):
    return _amr_model.model if amr_mode else _noop_model.model


def _from_penman(pg: penman.Graph) -> LabeledGraph:
    nodes: dict[NodeId, str] = {}
    for source, _, concept in pg.instances():
        if concept is None or concept == "":
            raise PenmanSyntaxError(f"variable {source} has no concept")
        if source in nodes and nodes[source] != concept:
            raise DuplicateVariableConcept(source, [nodes[source], concept])
        nodes[source] = concept

    variables = set(nodes)
    edges = []
    constants = []
    for source, role, target in pg.triples:
        if role == _INSTANCE_ROLE:
            continue
        if source not in variables:
            raise PenmanSyntaxError(f"relation {role} starts at unknown variable {source}")
        if target is None:
            raise PenmanSyntaxError(f"role {role} of {source} has no target")
        if target in variables:
            edges.append((source, target, role))
        else:
            value = str(target)
            c = constant_id(source, role, value, set(nodes))
            nodes[c] = value
            constants.append(c)
            edges.append((source, c, role))

    return LabeledGraph(nodes, edges, pg.top, constants)


def parse_penman(text: str, amr_mode: bool = True) -> LabeledGraph:
    """Parse one PENMAN expression.

    With amr_mode, inverse roles (":ARG0-of") are normalised to the reversed
    canonical role.

    :raises PenmanSyntaxError: malformed input, with line and column
    :raises DuplicateVariableConcept: one variable receives two concepts
    """
    try:
        pg = penman.decode(text, model=_model(amr_mode))
    except penman.DecodeError as e:
        message = getattr(e, "message", None) or str(e)
        raise PenmanSyntaxError(message, getattr(e, "lineno", None), getattr(e, "offset", None)) from e
    return _from_penman(pg)


def _variable_names(g: LabeledGraph) -> dict[NodeId, str]:
    """Keep node ids as variable names where possible, invent the rest."""
    constant_values = {g.nodes[c] for c in g.constants}
    names: dict[NodeId, str] = {}
    taken: set[str] = set()
    pending = []
    for node in g.nodes:
        if g.is_constant(node):
            continue
        if _SYMBOL_RE.match(node) and node not in constant_values:
            names[node] = node
            taken.add(node)
        else:
            pending.append(node)
    counters: dict[str, int] = {}
    for node in pending:
        first = g.nodes[node][0].lower()
        prefix = first if first.isalpha() else "x"
        n = counters.get(prefix, 0)
        while f"{prefix}{n}" in taken or f"{prefix}{n}" in constant_values:
            n += 1
        names[node] = f"{prefix}{n}"
        taken.add(names[node])
        counters[prefix] = n + 1
    return names


def _ordered_triples(g: LabeledGraph, names: dict[NodeId, str],
                     invert: bool = True) -> list[tuple[str, str, str]]:
    """Depth-first triple order from the root so the layout nests naturally.

    Outgoing edges come first; an incoming edge is only laid out from its
    target (as an inverse role) when its source has not been reached yet.
    Without `invert` only outgoing edges are followed.

    :raises NotSerializable: some node is out of reach without inverse roles
    """
    assert g.root is not None
    outgoing: dict[NodeId, list[tuple[NodeId, NodeId]]] = {n: [] for n in g.nodes}
    incoming: dict[NodeId, list[tuple[NodeId, NodeId]]] = {n: [] for n in g.nodes}
    for edge in g.edges:
        outgoing[edge[0]].append(edge)
        incoming[edge[1]].append(edge)

    triples: list[tuple[str, str, str]] = []
    visited: set[NodeId] = set()
    emitted: set[tuple[NodeId, NodeId]] = set()

    def emit(edge: tuple[NodeId, NodeId]) -> None:
        emitted.add(edge)
        source, target = edge
        value = g.nodes[target] if g.is_constant(target) else names[target]
        triples.append((names[source], g.edges[edge], value))

    def visit(node: NodeId) -> None:
        visited.add(node)
        triples.append((names[node], _INSTANCE_ROLE, g.nodes[node]))
        for edge in outgoing[node]:
            if edge in emitted:
                continue
            emit(edge)
            target = edge[1]
            if not g.is_constant(target) and target not in visited:
                visit(target)
        if not invert:
            return
        for edge in incoming[node]:
            if edge in emitted or edge[0] in visited:
                continue
            emit(edge)
            visit(edge[0])

    visit(g.root)
    unreached = [n for n in g.nodes if not g.is_constant(n) and n not in visited]
    if unreached:
        raise NotSerializable(f"nodes {', '.join(unreached)} need inverse roles to be reached from the root")
    return triples


def serialize_penman(g: LabeledGraph, amr_mode: bool = True) -> str:
    """Serialise a rooted, connected graph to PENMAN.

    Edges into already placed nodes are written as inverse roles in AMR mode
    only; generic graphs are read back without inverse normalisation, so they
    must be reachable from the root along edge directions.

    :raises NotRooted: g has no root
    :raises Disconnected: g is not connected
    :raises NotSerializable: an edge label is not a role (":label"), or a
        generic graph needs inverse roles
    """
    if g.root is None:
        raise NotRooted("graph has no root")
    if not is_connected(g):
        raise Disconnected("graph is not connected")
    for (source, target), label in g.edges.items():
        if not label.startswith(":") or len(label) == 1:
            raise NotSerializable(f"edge {source} -> {target}: label {label!r} is not a role")
    names = _variable_names(g)
    pg = penman.Graph(_ordered_triples(g, names, invert=amr_mode), top=names[g.root])
    return penman.encode(pg)


def _forward_reachable(g: LabeledGraph) -> LabeledGraph:
    assert g.root is not None
    keep = {g.root}
    stack = [g.root]
    while stack:
        for target in g.successors(stack.pop()):
            if target not in keep:
                keep.add(target)
                stack.append(target)
    return subgraph(g, keep)


def serializable(g: LabeledGraph, amr_mode: bool = True) -> tuple[LabeledGraph, bool]:
    """Return a graph serialize_penman accepts and whether `g` was truncated.

    Unrooted or disconnected graphs are cut down to the root's component. In
    generic mode the result is further cut down to what the root reaches along
    edge directions.
    """
    if not g.nodes:
        return g, False
    truncated = False
    if g.root is None or not is_connected(g):
        g, truncated = root_component(g), True
    if not amr_mode and g.nodes:
        reachable = _forward_reachable(g)
        if len(reachable) < len(g):
            g, truncated = reachable, True
    return g, truncated


def _entry_text(entry: CorpusEntry, amr_mode: bool = True) -> str:
    lines = list(entry.comments)
    g, truncated = serializable(entry.graph, amr_mode)
    if truncated:
        _LOGGER.warning("entry %d (::id %s): writing the part of the graph reachable from its root",
                        entry.ordinal, entry.id)
    if g.nodes:
        lines.append(serialize_penman(g, amr_mode))
    else:
        _LOGGER.warning("entry %d (::id %s): empty graph written as %s",
                        entry.ordinal, entry.id, EMPTY_GRAPH_PENMAN)
        lines.append(EMPTY_GRAPH_PENMAN)
    return "\n".join(lines)


def format_corpus(corpus: Corpus, amr_mode: bool = True) -> str:
    return "".join(_entry_text(e, amr_mode) + "\n\n" for e in corpus.entries)


def _split_block(block: str) -> tuple[list[str], str]:
    comments = []
    body = []
    for line in block.splitlines():
        if line.lstrip().startswith("#"):
            comments.append(line.rstrip())
        elif line.strip():
            body.append(line.rstrip())
    return comments, "\n".join(body)


def parse_corpus(text: str, strict: bool = True, amr_mode: bool = True,
                 path: Optional[pathlib.Path] = None) -> Corpus:
    """Parse blank-line separated PENMAN blocks.

    With strict=False an unparsable entry is logged and replaced by an empty
    graph so that ordinal alignment with other files is preserved.

    :raises CorpusEntryError: (strict only) an entry does not parse
    """
    entries: list[CorpusEntry] = []
    for block in _BLOCK_SPLIT_RE.split(text.replace("\r\n", "\n")):
        comments, body = _split_block(block)
        if not body:
            if comments:
                _LOGGER.debug("skipping comment-only block: %r", comments[0])
            continue
        ordinal = len(entries)
        metadata = parse_metadata([c for c in comments if "::" in c])
        try:
            graph = parse_penman(body, amr_mode=amr_mode)
            valid = True
        except GrensembleValueError as e:
            error = CorpusEntryError(ordinal, metadata.get("id"), e)
            if strict:
                raise error from e
            _LOGGER.warning("%s: %s", path if path is not None else "<text>", error)
            graph = empty_graph()
            valid = False
        entries.append(CorpusEntry(ordinal, graph, metadata, tuple(comments), valid))
    _LOGGER.info("read %d entries from %s", len(entries), path if path is not None else "<text>")
    return Corpus(entries, path)


def read_corpus(path: PathLike, strict: bool = True, amr_mode: bool = True) -> Corpus:
    path = pathlib.Path(path)
    return parse_corpus(path.read_text(encoding="utf-8"), strict=strict, amr_mode=amr_mode, path=path)


def write_corpus(path: PathLike, corpus: Corpus, amr_mode: bool = True) -> None:
    path = pathlib.Path(path)
    path.write_text(format_corpus(corpus, amr_mode), encoding="utf-8")
    _LOGGER.info("wrote %d entries to %s", len(corpus), path)


def align_corpora(corpora: Sequence[Corpus]) -> list[tuple[CorpusEntry, ...]]:
    """Align entries across corpora.

    When every entry of every corpus has an ::id, entries are matched by id in
    the order of the first corpus. Otherwise they are matched by position.

    :raises IdMismatch: an id is missing from, or duplicated in, some corpus
    :raises LengthMismatch: positional alignment of corpora of different sizes
    """
    if not corpora:
        return []

    if all(c.ids() is not None for c in corpora):
        indexes: list[dict[str, CorpusEntry]] = []
        for c in corpora:
            by_id: dict[str, CorpusEntry] = {}
            for e in c.entries:
                assert e.id is not None
                if e.id in by_id:
                    raise IdMismatch(e.id, f"duplicate id in {c.path}")
                by_id[e.id] = e
            indexes.append(by_id)

        reference = indexes[0]
        for c, by_id in zip(corpora, indexes):
            for entry_id in reference:
                if entry_id not in by_id:
                    raise IdMismatch(entry_id, f"missing from {c.path}")
            for entry_id in by_id:
                if entry_id not in reference:
                    raise IdMismatch(entry_id, f"only present in {c.path}")

        return [tuple(by_id[entry_id] for by_id in indexes) for entry_id in reference]

    lengths = [len(c) for c in corpora]
    if len(set(lengths)) > 1:
        raise LengthMismatch(
            "corpora have different lengths: "
            + ", ".join(f"{c.path}={len(c)}" for c in corpora)
        )
    return list(zip(*(c.entries for c in corpora)))


def corpus_to_json(corpus: Corpus, amr_mode: bool = True) -> list[dict[str, Any]]:
    """Export a corpus as [{id, snt, penman, triples}, ...]."""
    records = []
    for entry in corpus.entries:
        g, _ = serializable(entry.graph, amr_mode)
        records.append({
            "id": entry.id,
            "snt": entry.snt,
            "penman": serialize_penman(g, amr_mode) if g.nodes else None,
            "triples": [[str(t.kind), t.relation, t.source, t.target] for t in to_triples(entry.graph)],
        })
    return records


def write_corpus_json(path: PathLike, corpus: Corpus, amr_mode: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(corpus_to_json(corpus, amr_mode), f, indent=2, ensure_ascii=False)
