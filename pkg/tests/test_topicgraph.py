import itertools

import numpy as np
import pytest

from engdyn.errors import EmptyArticle, InvalidInput
from engdyn.topicgraph import (ArticleTerms, TermGraph, cluster_report,
                               count_terms, extract_terms, load_stopwords,
                               louvain, louvain_trace, modularity, project)


def set_partitions(items):
    """All partitions of a list into non-empty blocks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def oracle_modularity(graph, blocks):
    """Q from the raw adjacency formula, independent of the library path."""
    label = {}
    for i, blk in enumerate(blocks):
        for node in blk:
            label[node] = i
    degree = {n: 0.0 for n in graph.nodes}
    for (a, b), w in graph.edges.items():
        degree[a] += w
        degree[b] += w
    two_m = sum(degree.values())
    if two_m == 0:
        return 0.0
    q = 0.0
    for i in graph.nodes:
        for j in graph.nodes:
            if label[i] != label[j]:
                continue
            key = (i, j) if i < j else (j, i)
            a_ij = float(graph.edges.get(key, 0)) if i != j else 0.0
            q += a_ij / two_m - degree[i] * degree[j] / (two_m * two_m)
    return q


def brute_force_best(graph):
    best_q, best_blocks = -2.0, None
    for blocks in set_partitions(list(graph.nodes)):
        q = oracle_modularity(graph, blocks)
        if q > best_q:
            best_q, best_blocks = q, blocks
    return best_q, best_blocks


def clique_ring(n_cliques=4, size=5):
    edges = {}
    for c in range(n_cliques):
        names = [f"c{c}n{k}" for k in range(size)]
        for a, b in itertools.combinations(names, 2):
            edges[(a, b)] = 1
    for c in range(n_cliques):
        a = f"c{c}n0"
        b = f"c{(c + 1) % n_cliques}n1"
        edges[(a, b) if a < b else (b, a)] = 1
    nodes = tuple(sorted({n for e in edges for n in e}))
    return TermGraph(nodes=nodes, edges=edges)


class TestExtractTerms:
    def test_hand_counted_example(self):
        terms = extract_terms("a1", "The cat sat on the mat cat cat mat",
                              frozenset({"the", "on"}))
        assert terms.top_terms == (("cat", 3), ("mat", 2), ("sat", 1))

    def test_stopword_only_text_is_empty(self):
        with pytest.raises(EmptyArticle):
            extract_terms("a1", "the on 123 456", frozenset({"the", "on"}))

    def test_numbers_never_become_terms(self):
        terms = extract_terms("a1", "42 2024 covid19 covid19", frozenset())
        assert terms.terms == ("covid",)

    def test_top_ten_cutoff(self):
        vocab = [chr(ord("a") + i) * 3 for i in range(12)]  # aaa, bbb, ...
        words = []
        for i, word in enumerate(vocab):
            words.extend([word] * (12 - i))
        terms = extract_terms("a1", " ".join(words), frozenset())
        assert len(terms.top_terms) == 10
        assert terms.top_terms[0] == ("aaa", 12)
        assert set(terms.terms) == set(vocab[:10])

    def test_cutoff_ties_break_lexicographically(self):
        text = "zeta alpha beta gamma delta " * 2
        terms = extract_terms("a1", text, frozenset(), k=3)
        assert terms.terms == ("alpha", "beta", "delta")

    def test_frequencies_non_increasing(self):
        terms = extract_terms("a1", "b b b a a c", frozenset())
        freqs = [f for _, f in terms.top_terms]
        assert freqs == sorted(freqs, reverse=True)

    def test_pretokenized_path(self):
        terms = count_terms("a1", ["News", "news", "the", "vote"],
                            frozenset({"the"}))
        assert terms.top_terms == (("news", 2), ("vote", 1))

    def test_bundled_stopwords(self):
        stop = load_stopwords()
        assert {"the", "on", "and", "is"} <= stop


class TestProject:
    def test_two_articles_share_one_term(self):
        arts = [ArticleTerms("a1", (("a", 2), ("b", 1))),
                ArticleTerms("a2", (("b", 3), ("c", 1)))]
        graph = project(arts)
        assert graph.edges == {("a", "b"): 1, ("b", "c"): 1}
        assert graph.nodes == ("a", "b", "c")

    def test_repeated_cooccurrence_accumulates(self):
        arts = [ArticleTerms("a1", (("a", 1), ("b", 1))),
                ArticleTerms("a2", (("a", 1), ("b", 1)))]
        assert project(arts).edges == {("a", "b"): 2}

    def test_weights_match_bruteforce_intersections(self):
        rng = np.random.default_rng(12)
        vocab = [f"w{i}" for i in range(30)]
        arts = []
        for i in range(20):
            picks = rng.choice(vocab, size=rng.integers(2, 9), replace=False)
            arts.append(ArticleTerms(f"a{i}",
                                     tuple((w, 1) for w in sorted(picks))))
        graph = project(arts)
        for t1, t2 in itertools.combinations(sorted({t for a in arts
                                                     for t in a.terms}), 2):
            expected = sum(1 for a in arts
                           if t1 in a.terms and t2 in a.terms)
            assert graph.edges.get((t1, t2), 0) == expected

    def test_order_invariance(self):
        arts = [ArticleTerms("a1", (("a", 1), ("b", 1))),
                ArticleTerms("a2", (("b", 1), ("c", 1))),
                ArticleTerms("a3", (("a", 1), ("c", 1)))]
        assert project(arts) == project(list(reversed(arts)))

    def test_empty_input_rejected(self):
        with pytest.raises(InvalidInput):
            project([])


class TestLouvain:
    def test_two_cliques_recovered_exactly(self, two_clique_graph):
        result = louvain(two_clique_graph, seed=0)
        part = result.partition
        assert part["a"] == part["b"] == part["c"]
        assert part["x"] == part["y"] == part["z"]
        assert part["a"] != part["x"]
        best_q, best_blocks = brute_force_best(two_clique_graph)
        assert result.modularity == pytest.approx(best_q, abs=1e-12)
        assert sorted(map(sorted, best_blocks)) == [["a", "b", "c"],
                                                    ["x", "y", "z"]]

    def test_edgeless_graph_is_singletons(self):
        graph = TermGraph(nodes=("p", "q", "r"), edges={})
        result = louvain(graph, seed=1)
        assert sorted(result.partition.values()) == [0, 1, 2]
        assert result.modularity == 0.0

    def test_clique_ring_recovers_four_communities(self):
        graph = clique_ring()
        for seed in range(5):
            result = louvain(graph, seed=seed)
            groups = {}
            for node, cid in result.partition.items():
                groups.setdefault(cid, set()).add(node)
            assert len(groups) == 4
            for members in groups.values():
                assert len({m[:2] for m in members}) == 1  # one clique each

    def test_ring_modularity_matches_quotient_bruteforce(self):
        # aggregate each K5 into one node (self-loops dropped, degrees kept
        # through the formula) and brute-force the 4-node quotient
        graph = clique_ring()
        result = louvain(graph, seed=2)
        # by symmetry the optimum groups whole cliques; enumerate clique
        # groupings directly on the original graph
        cliques = [[f"c{c}n{k}" for k in range(5)] for c in range(4)]
        best_q = -2.0
        for blocks in set_partitions(list(range(4))):
            node_blocks = [[n for c in blk for n in cliques[c]]
                           for blk in blocks]
            best_q = max(best_q, oracle_modularity(graph, node_blocks))
        assert result.modularity == pytest.approx(best_q, abs=1e-12)

    def test_modularity_non_decreasing_per_pass(self, two_clique_graph):
        fixtures = [two_clique_graph, clique_ring()]
        rng = np.random.default_rng(4)
        for n in (5, 8):
            edges = {}
            for a, b in itertools.combinations(range(n), 2):
                if rng.random() < 0.45:
                    edges[(f"n{a}", f"n{b}")] = int(rng.integers(1, 4))
            if edges:
                nodes = tuple(sorted({x for e in edges for x in e}))
                fixtures.append(TermGraph(nodes=nodes, edges=edges))
        for graph in fixtures:
            for seed in range(3):
                trace = louvain_trace(graph, seed=seed)
                assert all(b >= a - 1e-12 for a, b in zip(trace, trace[1:]))

    def test_final_q_matches_recomputation(self, two_clique_graph):
        for graph in (two_clique_graph, clique_ring()):
            result = louvain(graph, seed=7)
            assert result.modularity == pytest.approx(
                modularity(graph, result.partition), abs=1e-12)

    def test_small_graphs_near_bruteforce_optimum(self):
        rng = np.random.default_rng(99)
        for trial in range(6):
            n = int(rng.integers(4, 9))
            edges = {}
            for a, b in itertools.combinations(range(n), 2):
                if rng.random() < 0.5:
                    edges[(f"n{a}", f"n{b}")] = int(rng.integers(1, 4))
            if not edges:
                continue
            nodes = tuple(sorted({x for e in edges for x in e}))
            graph = TermGraph(nodes=nodes, edges=edges)
            result = louvain(graph, seed=trial)
            best_q, _ = brute_force_best(graph)
            assert result.modularity >= best_q - 0.05

    def test_seeded_determinism(self, two_clique_graph):
        a = louvain(two_clique_graph, seed=13)
        b = louvain(two_clique_graph, seed=13)
        assert a.partition == b.partition
        assert a.modularity == b.modularity

    def test_empty_graph_rejected(self):
        with pytest.raises(InvalidInput):
            louvain(TermGraph(nodes=(), edges={}), seed=0)


class TestClusterReport:
    def test_two_clique_report(self, two_clique_graph):
        result = louvain(two_clique_graph, seed=0)
        report = cluster_report(result)
        assert len(report) == 2
        terms_by_comm = [sorted(t for t, _ in ranked) for _, ranked in report]
        assert ["a", "b", "c"] in terms_by_comm
        assert ["x", "y", "z"] in terms_by_comm

    def test_singletons_have_one_term_each(self):
        graph = TermGraph(nodes=("p", "q"), edges={})
        report = cluster_report(louvain(graph, seed=0))
        assert [len(ranked) for _, ranked in report] == [1, 1]

    def test_report_is_deterministic(self, two_clique_graph):
        r1 = cluster_report(louvain(two_clique_graph, seed=5))
        r2 = cluster_report(louvain(two_clique_graph, seed=5))
        assert repr(r1) == repr(r2)

    def test_requires_partition(self, two_clique_graph):
        with pytest.raises(InvalidInput):
            cluster_report(two_clique_graph)

    def test_top_n_cap(self):
        edges = {(f"hub", f"s{i}"): 1 for i in range(15)}
        edges = {tuple(sorted(k)): v for k, v in edges.items()}
        nodes = tuple(sorted({x for e in edges for x in e}))
        graph = louvain(TermGraph(nodes=nodes, edges=edges), seed=0)
        report = cluster_report(graph, top_n=3)
        assert all(len(ranked) <= 3 for _, ranked in report)
