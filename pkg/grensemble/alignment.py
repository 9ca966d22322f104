"""Vertex matching between labeled graphs.

best_match approximates the best vertex match with the Smatch hill-climbing
heuristic: a greedy label-match seed followed by seeded random restarts, each
climbing with single remaps and pairwise swaps until no move improves the
number of matched triples. brute_force_match is the exact oracle for tiny
graphs.

Only candidate pairs are ever mapped: equal-label nodes, endpoints of
equal-label edges and the root pair. Constants are only candidates for
constants with the same value.
"""

import logging
import random
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional
from .const import BRUTE_FORCE_MAX_NODES, DEFAULT_RESTARTS, DEFAULT_SEED
from .exceptions import TooLarge
from .graph import Edge, LabeledGraph, NodeId

_LOGGER = logging.getLogger(__name__)

UNMAPPED = -1


@dataclass(frozen=True)
class MatcherParams:
    restarts: int = DEFAULT_RESTARTS
    seed: int = DEFAULT_SEED
    # None: climb to a local optimum
    max_climb_steps: Optional[int] = None
    match_root: bool = True


@dataclass(frozen=True)
class VertexMatch:
    """Partial injective node mapping from g1 to g2.

    node_support and edge_support hold s_phi for every node and edge of g1.
    score counts matched triples: instances, edges (attributes included) and
    the root when root matching is on.
    """
    mapping: dict[NodeId, NodeId]
    score: int
    node_support: dict[NodeId, int]
    edge_support: dict[Edge, int]


@dataclass(frozen=True)
class SupportMap:
    node_support: dict[NodeId, int]
    edge_support: dict[Edge, int]

    @property
    def total(self) -> int:
        return sum(self.node_support.values()) + sum(self.edge_support.values())

    def minimum(self) -> Optional[int]:
        values = list(self.node_support.values()) + list(self.edge_support.values())
        return min(values) if values else None


class _MatchProblem:
    """Index-based weights of a matching instance.

    unary[(i, j)] is the number of triples matched by mapping node i of g1 to
    node j of g2 alone; binary[(i, j)] lists (k, l, w): w more triples match
    when k is also mapped to l.
    """

    def __init__(self, g1: LabeledGraph, g2: LabeledGraph, match_root: bool):
        self.nodes1 = list(g1.nodes)
        self.nodes2 = list(g2.nodes)
        index1 = {v: i for i, v in enumerate(self.nodes1)}
        index2 = {v: j for j, v in enumerate(self.nodes2)}

        candidates: list[set[int]] = [set() for _ in self.nodes1]
        label_matches: list[list[int]] = [[] for _ in self.nodes1]
        unary: dict[tuple[int, int], int] = defaultdict(int)
        binary: dict[tuple[int, int], dict[tuple[int, int], int]] = defaultdict(lambda: defaultdict(int))

        by_label: dict[tuple[str, bool], list[int]] = defaultdict(list)
        for j, v in enumerate(self.nodes2):
            by_label[(g2.nodes[v], g2.is_constant(v))].append(j)
        for i, v in enumerate(self.nodes1):
            constant = g1.is_constant(v)
            for j in by_label.get((g1.nodes[v], constant), ()):
                candidates[i].add(j)
                label_matches[i].append(j)
                if not constant:
                    unary[(i, j)] += 1

        # roots are always aligned candidates; the top triple only matches
        # when the root concepts agree
        if match_root and g1.root is not None and g2.root is not None:
            pair = (index1[g1.root], index2[g2.root])
            if g1.nodes[g1.root] == g2.nodes[g2.root]:
                unary[pair] += 1
            candidates[pair[0]].add(pair[1])

        edges_by_label: dict[str, list[Edge]] = defaultdict(list)
        for edge, label in g2.edges.items():
            edges_by_label[label].append(edge)
        for (u, v), label in g1.edges.items():
            for a, b in edges_by_label.get(label, ()):
                if g1.is_constant(v) != g2.is_constant(b):
                    continue
                if g1.is_constant(v) and g1.nodes[v] != g2.nodes[b]:
                    continue
                i, k = index1[u], index1[v]
                j, l = index2[a], index2[b]
                if i == k:
                    # self loops only match self loops
                    if j == l:
                        unary[(i, j)] += 1
                        candidates[i].add(j)
                    continue
                if j == l:
                    continue
                candidates[i].add(j)
                candidates[k].add(l)
                binary[(i, j)][(k, l)] += 1
                binary[(k, l)][(i, j)] += 1

        self.candidates = [sorted(c) for c in candidates]
        self.candidate_sets = [frozenset(c) for c in candidates]
        self.label_matches = label_matches
        self.unary = dict(unary)
        self.binary = {p: [(k, l, w) for (k, l), w in ws.items()] for p, ws in binary.items()}
        self.pair_weight = {p: dict(ws) for p, ws in binary.items()}

    def __len__(self) -> int:
        return len(self.nodes1)

    def score(self, mapping: list[int]) -> int:
        total = 0
        for i, j in enumerate(mapping):
            if j == UNMAPPED:
                continue
            total += self.unary.get((i, j), 0)
            for k, l, w in self.binary.get((i, j), ()):
                if k > i and mapping[k] == l:
                    total += w
        return total

    def _contribution(self, mapping: list[int], i: int, j: int, exclude: int = UNMAPPED) -> int:
        """Triples matched by i -> j given the rest of `mapping`, ignoring node `exclude`."""
        if j == UNMAPPED:
            return 0
        total = self.unary.get((i, j), 0)
        for k, l, w in self.binary.get((i, j), ()):
            if k != exclude and mapping[k] == l:
                total += w
        return total

    def _pair(self, i: int, j: int, k: int, l: int) -> int:
        if j == UNMAPPED or l == UNMAPPED:
            return 0
        return self.pair_weight.get((i, j), {}).get((k, l), 0)

    def _allowed(self, i: int, j: int) -> bool:
        return j == UNMAPPED or j in self.candidate_sets[i]

    def best_step(self, mapping: list[int]) -> tuple[int, Optional[list[int]]]:
        """Best improving single remap or swap, or (0, None) at a local optimum."""
        used = {j for j in mapping if j != UNMAPPED}
        best_gain = 0
        best: Optional[tuple[int, int, int, int]] = None

        for i, j in enumerate(mapping):
            current = self._contribution(mapping, i, j)
            for c in self.candidates[i]:
                if c in used:
                    continue
                gain = self._contribution(mapping, i, c) - current
                if gain > best_gain:
                    best_gain = gain
                    best = (i, c, i, c)

        n = len(mapping)
        for i in range(n):
            a = mapping[i]
            for k in range(i + 1, n):
                b = mapping[k]
                if a == b:
                    continue
                if not (self._allowed(i, b) and self._allowed(k, a)):
                    continue
                old = (self._contribution(mapping, i, a, k) + self._contribution(mapping, k, b, i)
                       + self._pair(i, a, k, b))
                new = (self._contribution(mapping, i, b, k) + self._contribution(mapping, k, a, i)
                       + self._pair(i, b, k, a))
                gain = new - old
                if gain > best_gain:
                    best_gain = gain
                    best = (i, b, k, a)

        if best is None:
            return 0, None
        i, j, k, l = best
        new_mapping = list(mapping)
        new_mapping[i] = j
        new_mapping[k] = l
        return best_gain, new_mapping

    def climb(self, mapping: list[int], max_steps: Optional[int]) -> tuple[list[int], int]:
        score = self.score(mapping)
        steps = 0
        while max_steps is None or steps < max_steps:
            gain, new_mapping = self.best_step(mapping)
            if new_mapping is None:
                break
            mapping = new_mapping
            score += gain
            steps += 1
        return mapping, score

    def greedy_init(self, rng: random.Random) -> list[int]:
        """Map every node to its first free equal-label candidate.

        Nodes without a free label match get a random free candidate.
        """
        used: set[int] = set()
        mapping = [UNMAPPED] * len(self)
        leftover = []
        for i in range(len(self)):
            for j in self.label_matches[i]:
                if j not in used:
                    mapping[i] = j
                    used.add(j)
                    break
            else:
                leftover.append(i)
        for i in leftover:
            free = [j for j in self.candidates[i] if j not in used]
            if free:
                mapping[i] = rng.choice(free)
                used.add(mapping[i])
        return mapping

    def random_init(self, rng: random.Random) -> list[int]:
        used: set[int] = set()
        mapping = [UNMAPPED] * len(self)
        for i in range(len(self)):
            free = [j for j in self.candidates[i] if j not in used]
            if free:
                mapping[i] = rng.choice(free)
                used.add(mapping[i])
        return mapping


def _vertex_match(g1: LabeledGraph, g2: LabeledGraph, mapping: dict[NodeId, NodeId],
                  match_root: bool) -> VertexMatch:
    node_support = {}
    for v, label in g1.nodes.items():
        node_support[v] = int(v in mapping and g2.nodes[mapping[v]] == label)

    edge_support = {}
    for (u, v), label in g1.edges.items():
        matched = 0
        if u in mapping and v in mapping:
            matched = int(g2.edges.get((mapping[u], mapping[v])) == label)
        edge_support[(u, v)] = matched

    score = sum(s for v, s in node_support.items() if not g1.is_constant(v))
    score += sum(edge_support.values())
    if (match_root and g1.root is not None and g2.root is not None
            and mapping.get(g1.root) == g2.root and g1.nodes[g1.root] == g2.nodes[g2.root]):
        score += 1
    return VertexMatch(mapping, score, node_support, edge_support)


def _to_dict(problem: _MatchProblem, mapping: list[int]) -> dict[NodeId, NodeId]:
    return {
        problem.nodes1[i]: problem.nodes2[j]
        for i, j in enumerate(mapping) if j != UNMAPPED
    }


def best_match(g1: LabeledGraph, g2: LabeledGraph, params: MatcherParams = MatcherParams()) -> VertexMatch:
    """Approximate the best vertex match from g1 to g2 by hill climbing.

    Restart 0 starts from the greedy label-match seed, the others from random
    candidate mappings. The result is deterministic for a fixed seed.
    """
    problem = _MatchProblem(g1, g2, params.match_root)
    rng = random.Random(params.seed)
    best_mapping: list[int] = [UNMAPPED] * len(problem)
    best_score = -1
    for restart in range(max(1, params.restarts)):
        if restart == 0:
            start = problem.greedy_init(rng)
        else:
            start = problem.random_init(rng)
        mapping, score = problem.climb(start, params.max_climb_steps)
        _LOGGER.debug("restart %d: score %d", restart, score)
        if score > best_score:
            best_mapping, best_score = mapping, score
    return _vertex_match(g1, g2, _to_dict(problem, best_mapping), params.match_root)


def brute_force_match(g1: LabeledGraph, g2: LabeledGraph, params: MatcherParams = MatcherParams()) -> VertexMatch:
    """Exact maximum-score vertex match by exhaustive search.

    :raises TooLarge: both graphs have more than BRUTE_FORCE_MAX_NODES nodes
    """
    if min(len(g1.nodes), len(g2.nodes)) > BRUTE_FORCE_MAX_NODES:
        raise TooLarge(f"brute force matching is limited to graphs with at most "
                       f"{BRUTE_FORCE_MAX_NODES} nodes on one side")
    problem = _MatchProblem(g1, g2, params.match_root)
    n = len(problem)

    def potential(i: int) -> int:
        best = 0
        for j in problem.candidates[i]:
            value = problem.unary.get((i, j), 0) + sum(w for _, _, w in problem.binary.get((i, j), ()))
            best = max(best, value)
        return best

    # upper bound on what nodes i.. can still add
    bound = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        bound[i] = bound[i + 1] + potential(i)

    mapping = [UNMAPPED] * n
    used: set[int] = set()
    best_mapping = list(mapping)
    best_score = 0

    def search(i: int, score: int) -> None:
        nonlocal best_mapping, best_score
        if score + bound[i] <= best_score and i > 0:
            return
        if i == n:
            if score > best_score:
                best_mapping, best_score = list(mapping), score
            return
        for j in problem.candidates[i]:
            if j in used:
                continue
            gain = problem.unary.get((i, j), 0)
            for k, l, w in problem.binary.get((i, j), ()):
                if k < i and mapping[k] == l:
                    gain += w
            mapping[i] = j
            used.add(j)
            search(i + 1, score + gain)
            used.discard(j)
            mapping[i] = UNMAPPED
        search(i + 1, score)

    search(0, 0)
    return _vertex_match(g1, g2, _to_dict(problem, best_mapping), params.match_root)


def accumulate_support(g: LabeledGraph, matches: Sequence[VertexMatch]) -> SupportMap:
    """Sum the per-element flags of matches from g to each graph of a collection."""
    node_support = {v: 0 for v in g.nodes}
    edge_support = {e: 0 for e in g.edges}
    for match in matches:
        for v, s in match.node_support.items():
            node_support[v] += s
        for e, s in match.edge_support.items():
            edge_support[e] += s
    return SupportMap(node_support, edge_support)


def self_match(g: LabeledGraph, params: MatcherParams = MatcherParams()) -> VertexMatch:
    """Identity match of g with itself."""
    return _vertex_match(g, g, {v: v for v in g.nodes}, params.match_root)


def support_of(g: LabeledGraph, graphs: Sequence[LabeledGraph], params: MatcherParams = MatcherParams(),
               pivot_index: Optional[int] = None) -> SupportMap:
    """Total support of every node and edge of g against a collection.

    If g is graphs[pivot_index], its self match contributes 1 to every element.
    """
    matches = []
    for index, other in enumerate(graphs):
        if index == pivot_index:
            matches.append(self_match(g, params))
        else:
            matches.append(best_match(g, other, params))
    return accumulate_support(g, matches)


def is_theta_supported(g: LabeledGraph, graphs: Sequence[LabeledGraph], theta: float,
                       params: MatcherParams = MatcherParams()) -> bool:
    """True iff every node and edge of g has support >= theta."""
    if theta <= 0:
        return True
    minimum = support_of(g, graphs, params).minimum()
    return minimum is None or minimum >= theta
