import pytest
import time
from collections import Counter
from scipy import stats  # type: ignore
from grensemble.alignment import MatcherParams, best_match, is_theta_supported, support_of
from grensemble.const import MODE_STRICT, TIE_STABLE_RNG
from grensemble.exceptions import EmptyCollection, GrensembleValueError, IdMismatch
from grensemble.graph import build_graph, empty_graph, is_connected
from grensemble.voting import (
    EnsembleConfig,
    default_theta,
    ensemble,
    ensemble_corpus,
    filter_votes,
    init_votes,
    poll_votes,
    resolve_theta,
)
from grensemble.penman_io import Corpus, parse_penman
from grensemble.scoring import corpus_smatch, smatch
from grensemble.synth import NoiseSpec, perturb, random_gold, synth_corpora


def test_default_theta():
    assert default_theta(3) == 2
    assert default_theta(1) == 1
    assert default_theta(7) == 4
    assert default_theta(4) == 2
    with pytest.raises(GrensembleValueError):
        default_theta(0)


def test_resolve_theta():
    assert resolve_theta(0.5, 3) == 2
    assert resolve_theta(0.5, 7) == 4
    assert resolve_theta(0.6, 5) == 3
    assert resolve_theta(1.0, 5) == 5
    assert resolve_theta(0.1, 3) == 1
    assert resolve_theta(2, 3) == 2
    with pytest.raises(GrensembleValueError):
        resolve_theta(4, 3)
    with pytest.raises(GrensembleValueError):
        resolve_theta(0, 3)
    with pytest.raises(GrensembleValueError):
        resolve_theta(1.5, 3)


def test_config_validation():
    with pytest.raises(GrensembleValueError):
        EnsembleConfig(mode="lenient")
    with pytest.raises(GrensembleValueError):
        EnsembleConfig(tie_policy="last")


def test_init_votes(trio):
    table = init_votes(trio[0])
    assert table.node_votes == {"1": Counter(A=1), "2": Counter(D=1), "3": Counter(B=1)}
    assert table.edge_votes == {("1", "2"): Counter({":X": 1}), ("1", "3"): Counter({":Y": 1})}
    assert table.contributors == 1

    empty = init_votes(empty_graph())
    assert empty.node_votes == {}
    assert empty.edge_votes == {}


def test_poll_votes(trio):
    g1, g2, g3 = trio
    table = init_votes(g1)
    match = best_match(g1, g2)
    assert match.mapping == {"1": "3", "2": "2", "3": "1"}
    poll_votes(table, g1, g2, match)
    # new candidate label C on node 3, new candidate Z on edge (1, 2)
    assert table.node_votes["3"] == Counter(B=1, C=1)
    assert table.edge_votes[("1", "2")] == Counter({":X": 1, ":Z": 1})
    assert table.edge_votes[("1", "3")] == Counter({":Y": 2})
    # edge (3, 4) of g2 has an unmapped endpoint
    assert len(table.edge_votes) == 2
    assert table.contributors == 2

    poll_votes(table, g1, g3, best_match(g1, g3))
    assert table.node_votes["1"] == Counter(A=3)
    assert table.edge_votes[("1", "2")] == Counter({":X": 1, ":Z": 2})
    assert table.contributors == 3

    for votes in list(table.node_votes.values()) + list(table.edge_votes.values()):
        assert all(count <= table.contributors for count in votes.values())


def test_poll_identical_and_unmatched(trio):
    g1 = trio[0]
    table = init_votes(g1)
    poll_votes(table, g1, g1, best_match(g1, g1))
    assert table.node_votes == {"1": Counter(A=2), "2": Counter(D=2), "3": Counter(B=2)}

    table = init_votes(g1)
    other = build_graph({"x": "Q"})
    poll_votes(table, g1, other, best_match(g1, other))
    assert table.node_votes == init_votes(g1).node_votes
    assert table.contributors == 2


def test_poll_new_edge():
    pivot = build_graph({"a": "x", "b": "y", "c": "z"}, {("a", "b"): ":r", ("a", "c"): ":r"}, root="a")
    other = build_graph({"a": "x", "b": "y", "c": "z"},
                        {("a", "b"): ":r", ("a", "c"): ":r", ("b", "c"): ":s"}, root="a")
    table = init_votes(pivot)
    poll_votes(table, pivot, other, best_match(pivot, other))
    assert table.edge_votes[("b", "c")] == Counter({":s": 1})

    # a second vote makes the new edge reach theta = 2 in strict mode
    poll_votes(table, pivot, other, best_match(pivot, other))
    g = filter_votes(table, pivot, EnsembleConfig(theta=2, mode=MODE_STRICT))
    assert g.edges[("b", "c")] == ":s"


def test_filter_example(trio):
    g1, g2, g3 = trio
    table = init_votes(g1)
    for other in (g2, g3):
        poll_votes(table, g1, other, best_match(g1, other))
    for mode in ("valid_amr", MODE_STRICT):
        g = filter_votes(table, g1, EnsembleConfig(theta=2, mode=mode))
        assert dict(g.nodes) == {"1": "A", "2": "D", "3": "B"}
        assert dict(g.edges) == {("1", "2"): ":Z", ("1", "3"): ":Y"}
        assert g.root == "1"


def test_filter_ties_prefer_pivot_label():
    pivot = build_graph({"a": "m"}, root="a")
    table = init_votes(pivot)
    table.node_votes["a"].update({"b": 1})
    table.contributors = 2
    assert filter_votes(table, pivot, EnsembleConfig(theta=1)).nodes["a"] == "m"

    table.node_votes["a"] = Counter({"z": 1, "c": 1})
    assert filter_votes(table, pivot, EnsembleConfig(theta=1)).nodes["a"] == "c"


def test_filter_theta_one_relabels():
    pivot = build_graph({"a": "m", "b": "n"}, {("a", "b"): ":r"}, root="a")
    table = init_votes(pivot)
    table.node_votes["b"].update({"o": 2})
    table.edge_votes[("a", "b")].update({":s": 2})
    table.contributors = 3
    for mode in ("valid_amr", MODE_STRICT):
        g = filter_votes(table, pivot, EnsembleConfig(theta=1, mode=mode))
        assert dict(g.nodes) == {"a": "m", "b": "o"}
        assert dict(g.edges) == {("a", "b"): ":s"}


def chain_table():
    # a -> b -> c, where b has too few votes
    pivot = build_graph({"a": "x", "b": "y", "c": "z"}, {("a", "b"): ":r", ("b", "c"): ":r"}, root="a")
    table = init_votes(pivot)
    table.contributors = 3
    table.node_votes["a"].update({"x": 2})
    table.node_votes["c"].update({"z": 2})
    table.edge_votes[("a", "b")].update({":r": 2})
    table.edge_votes[("b", "c")].update({":r": 2})
    return pivot, table


def test_filter_strict_drops_weak_nodes():
    pivot, table = chain_table()
    g = filter_votes(table, pivot, EnsembleConfig(theta=2, mode=MODE_STRICT))
    assert set(g.nodes) == {"a", "c"}
    assert not g.edges
    assert not is_connected(g)


def test_filter_valid_keeps_connecting_nodes():
    pivot, table = chain_table()
    g = filter_votes(table, pivot, EnsembleConfig(theta=2))
    assert dict(g.nodes) == {"a": "x", "b": "y", "c": "z"}
    assert g.root == "a"
    assert is_connected(g)

    # a weak leaf is dropped
    table.node_votes["c"] = Counter(z=1)
    g = filter_votes(table, pivot, EnsembleConfig(theta=2))
    assert set(g.nodes) == {"a", "b"}


def test_filter_valid_keeps_root():
    pivot = build_graph({"a": "x", "b": "y"}, {("a", "b"): ":r"}, root="a")
    table = init_votes(pivot)
    table.contributors = 3
    table.node_votes["a"] = Counter(x=1, w=1)
    table.node_votes["b"].update({"y": 2})
    g = filter_votes(table, pivot, EnsembleConfig(theta=2))
    assert g.root == "a"
    assert g.nodes["a"] == "x"
    g = filter_votes(table, pivot, EnsembleConfig(theta=2, mode=MODE_STRICT))
    assert g.root is None
    assert set(g.nodes) == {"b"}


def test_filter_drops_orphan_constants():
    pivot = parse_penman("(w / want-01 :polarity - :ARG0 (b / boy))")
    table = init_votes(pivot)
    table.contributors = 3
    table.node_votes["w:polarity=-"].update({"-": 2})
    table.edge_votes[("w", "w:polarity=-")] = Counter({":mode": 2, ":polarity": 1})
    table.node_votes["w"].update({"want-01": 2})
    g = filter_votes(table, pivot, EnsembleConfig(theta=3, mode=MODE_STRICT))
    # the attribute edge lost, its constant goes too
    assert set(g.nodes) == {"w"}


def test_filter_monotone_in_theta():
    gold = random_gold(10, 1.3, seed=4)
    graphs = [gold] + [perturb(gold, NoiseSpec(0.3, 0.3, 0.1, 0.1), seed=s) for s in range(4)]
    table = init_votes(graphs[0])
    for other in graphs[1:]:
        poll_votes(table, graphs[0], other, best_match(graphs[0], other))
    previous = None
    for theta in range(1, 6):
        g = filter_votes(table, graphs[0], EnsembleConfig(theta=theta, mode=MODE_STRICT))
        elements = set(g.nodes.items()) | set(g.edges.items())
        if previous is not None:
            assert elements <= previous
        previous = elements


def test_ensemble_example(trio):
    result = ensemble(trio, EnsembleConfig(theta=2))
    assert dict(result.graph.nodes) == {"1": "A", "2": "D", "3": "B"}
    assert dict(result.graph.edges) == {("1", "2"): ":Z", ("1", "3"): ":Y"}
    assert result.pivot_index == 0
    assert result.theta == 2
    assert result.support.total == max(result.per_pivot_supports) == 13
    assert len(result.per_pivot_supports) == 3
    assert is_theta_supported(result.graph, trio, 2)
    assert support_of(result.graph, trio).minimum() >= 2


def test_ensemble_corrects_root(contrast_case):
    pivot, voters = contrast_case
    graphs = [pivot] + voters
    result = ensemble(graphs)
    assert result.theta == 2
    g = result.graph
    assert g.nodes[g.root] == "contrast-01"
    assert sorted(g.edges[e] for e in g.edges if e[0] == g.root) == [":ARG1", ":ARG2"]
    assert smatch(g, voters[0]).f1 == 1.0

    # with the pivot fixed to the first graph, its own nodes are corrected
    fixed = ensemble(graphs, EnsembleConfig(pivot=0))
    assert fixed.pivot_index == 0
    assert fixed.graph.nodes["z0"] == "contrast-01"
    assert fixed.graph.edges[("z0", "z1")] == ":ARG1"
    assert fixed.graph.edges[("z0", "z4")] == ":ARG2"
    assert len(fixed.per_pivot_supports) == 1


def test_ensemble_consensus():
    g = parse_penman("(w / want-01 :polarity - :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))")
    for theta in (1, 2, 3):
        result = ensemble([g, g, g], EnsembleConfig(theta=theta))
        assert result.graph == g
        assert set(result.support.node_support.values()) == {3}
        assert set(result.support.edge_support.values()) == {3}


def test_ensemble_single():
    g = random_gold(6, 1.2, seed=0)
    result = ensemble([g])
    assert result.graph == g
    assert result.pivot_index == 0


def test_ensemble_errors(trio):
    with pytest.raises(EmptyCollection):
        ensemble([])
    with pytest.raises(GrensembleValueError):
        ensemble(trio, EnsembleConfig(pivot=3))
    with pytest.raises(GrensembleValueError):
        ensemble(trio, EnsembleConfig(theta=4))


def test_tie_policy(trio):
    same = [trio[0]] * 3
    result = ensemble(same, EnsembleConfig(tie_policy=TIE_STABLE_RNG))
    again = ensemble(same, EnsembleConfig(tie_policy=TIE_STABLE_RNG))
    assert result.pivot_index == again.pivot_index
    assert result.pivot_index in range(3)
    assert ensemble(same).pivot_index == 0


def test_pivot_containment():
    gold = random_gold(10, 1.3, seed=9)
    graphs = [perturb(gold, NoiseSpec(0.2, 0.2, 0.1, 0.1), seed=s) for s in range(5)]
    for mode in ("valid_amr", MODE_STRICT):
        result = ensemble(graphs, EnsembleConfig(mode=mode))
        pivot = graphs[result.pivot_index]
        assert set(result.graph.nodes) <= set(pivot.nodes)
        for source, target in result.graph.edges:
            assert source in pivot.nodes and target in pivot.nodes
        if mode == "valid_amr":
            assert result.graph.root == pivot.root
            assert is_connected(result.graph)


def test_strict_support_holds_on_noisy_inputs():
    # a fresh match of the filtered pivot may align differently from the voting matches
    config = EnsembleConfig(mode=MODE_STRICT)
    noise = NoiseSpec(0.3, 0.3, 0.1, 0.1)
    for seed in range(20):
        gold = random_gold(10, 1.3, seed=seed)
        graphs = [perturb(gold, noise, seed=100 * seed + k) for k in range(5)]
        result = ensemble(graphs, config)
        assert is_theta_supported(result.graph, graphs, result.theta, config.matcher)
        assert result.support.minimum() is None or result.support.minimum() >= result.theta
        assert result.support == support_of(result.graph, graphs, config.matcher)


def majority_case(seed: int):
    gold = random_gold(8, 1.2, seed=seed)
    noise = NoiseSpec(0.2, 0.2, 0.1, 0.1)
    graphs = [gold, gold, gold, perturb(gold, noise, seed=seed + 1), perturb(gold, noise, seed=seed + 2)]
    return gold, graphs


def test_majority_recovery():
    config = EnsembleConfig(theta=3, mode=MODE_STRICT)
    exact = 0
    cases = 20
    for seed in range(cases):
        gold, graphs = majority_case(seed)
        result = ensemble(graphs, config)
        if result.pivot_index < 3:
            assert result.graph == gold
            assert is_theta_supported(result.graph, graphs, 3)
        exact += smatch(result.graph, gold).f1 == 1.0
    assert exact >= cases - 1


def test_majority_recovery_fixed_pivot():
    for seed in range(5):
        gold, graphs = majority_case(seed)
        table = init_votes(gold)
        for other in graphs[1:]:
            poll_votes(table, gold, other, best_match(gold, other))
        g = filter_votes(table, gold, EnsembleConfig(theta=3, mode=MODE_STRICT))
        assert g == gold


def test_ensemble_corpus():
    gold, preds = synth_corpora(4, m=3, n_nodes=8, seed=1)
    corpus, report = ensemble_corpus(preds, EnsembleConfig())
    assert len(corpus) == 4
    assert corpus.ids() == gold.ids()
    assert [row["id"] for row in report] == gold.ids()
    for row in report:
        assert set(row) == {"id", "pivot_index", "per_pivot_supports", "theta", "mode",
                            "elapsed_ms", "pivot_count", "truncated"}
        assert row["theta"] == 2
        assert row["mode"] == "valid_amr"
        assert row["pivot_count"] == 3
        assert not row["truncated"]

    parallel, _ = ensemble_corpus(preds, EnsembleConfig(), jobs=2)
    assert parallel.graphs == corpus.graphs


def test_ensemble_corpus_single_input():
    gold, _ = synth_corpora(3, m=1, n_nodes=6, seed=4)
    corpus, _ = ensemble_corpus([gold])
    assert corpus.graphs == gold.graphs


def test_ensemble_corpus_errors():
    with pytest.raises(EmptyCollection):
        ensemble_corpus([])
    a = Corpus.from_graphs([parse_penman("(a / x)")], ids=["1"])
    b = Corpus.from_graphs([parse_penman("(a / x)")], ids=["2"])
    with pytest.raises(IdMismatch):
        ensemble_corpus([a, b])


def test_ensemble_lift():
    gold, preds = synth_corpora(30, m=5, n_nodes=12, seed=21)
    corpus, _ = ensemble_corpus(preds, EnsembleConfig())
    ensemble_f1 = corpus_smatch(corpus, gold).f1
    best_single = max(corpus_smatch(p, gold).f1 for p in preds)
    assert ensemble_f1 > best_single


@pytest.mark.slow
def test_ensemble_lift_full():
    gold, preds = synth_corpora(200, m=5, n_nodes=20, seed=0)
    corpus, report = ensemble_corpus(preds, EnsembleConfig(mode=MODE_STRICT), jobs=4)
    ensemble_f1 = corpus_smatch(corpus, gold, jobs=4).f1
    best_single = max(corpus_smatch(p, gold, jobs=4).f1 for p in preds)
    assert ensemble_f1 - best_single >= 0.01

    params = MatcherParams()
    for entry, row in zip(corpus, report):
        inputs = [p[entry.ordinal].graph for p in preds]
        assert is_theta_supported(entry.graph, inputs, row["theta"], params)


@pytest.mark.slow
def test_majority_recovery_full():
    config = EnsembleConfig(theta=3, mode=MODE_STRICT)
    exact = 0
    cases = 200
    for seed in range(cases):
        gold, graphs = majority_case(seed)
        result = ensemble(graphs, config)
        assert is_theta_supported(result.graph, graphs, 3)
        if result.pivot_index < 3:
            assert result.graph == gold
        exact += smatch(result.graph, gold).f1 == 1.0
    assert exact >= 0.99 * cases


@pytest.mark.slow
def test_single_sentence_runtime():
    gold = random_gold(20, 1.5, seed=0)
    graphs = [perturb(gold, NoiseSpec(), seed=s) for s in range(7)]
    start = time.perf_counter()
    ensemble(graphs)
    assert time.perf_counter() - start < 2.0


@pytest.mark.slow
def test_ensemble_lift_repeated():
    lifts = []
    for rep in range(10):
        gold, preds = synth_corpora(200, m=5, n_nodes=20, seed=1000 + rep)
        corpus, _ = ensemble_corpus(preds, EnsembleConfig(mode=MODE_STRICT), jobs=4)
        ensemble_f1 = corpus_smatch(corpus, gold, jobs=4).f1
        best_single = max(corpus_smatch(p, gold, jobs=4).f1 for p in preds)
        lifts.append(ensemble_f1 - best_single)
    assert sum(lifts) / len(lifts) >= 0.01
    assert stats.ttest_1samp(lifts, 0.0, alternative="greater").pvalue < 0.01


@pytest.mark.slow
def test_corpus_runtime():
    # 100 sentences of about 50 triples, seven models
    _, preds = synth_corpora(100, m=7, n_nodes=20, density=1.5, seed=0)
    start = time.perf_counter()
    corpus, _ = ensemble_corpus(preds, EnsembleConfig(), jobs=8)
    assert time.perf_counter() - start < 60.0
    assert len(corpus) == 100
