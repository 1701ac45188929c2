"""Tests for closeness, betweenness and centrality tables."""

import time
from itertools import combinations

import networkx as nx
import pytest
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from ..constants import CentralitySortKey
from ..domain import CoAffiliationGraph
from ..exceptions import ConfigurationError, ContractViolationError
from ..services import centrality_service

NAMES = [f"N{index:02d}" for index in range(50)]


def make_graph(edges, nodes=None):
    """Graph with unit node weights unless ``nodes`` gives them."""
    weights = {}
    for edge in edges:
        source, target = sorted(edge[:2])
        weights[(source, target)] = edge[2] if len(edge) > 2 else 1
    node_weights = dict(nodes or {})
    for source, target in weights:
        node_weights.setdefault(source, 1)
        node_weights.setdefault(target, 1)
    return CoAffiliationGraph(level="country", nodes=dict(sorted(node_weights.items())), edges=dict(sorted(weights.items())))


def brute_force_betweenness(graph):
    """Shortest paths through each node, summed over unordered pairs."""
    view = nx.Graph()
    view.add_nodes_from(graph.nodes)
    view.add_edges_from(graph.edges)
    scores = dict.fromkeys(graph.nodes, 0.0)
    for source, target in combinations(sorted(graph.nodes), 2):
        if not nx.has_path(view, source, target):
            continue
        paths = list(nx.all_shortest_paths(view, source, target))
        for path in paths:
            for node in path[1:-1]:
                scores[node] += 1 / len(paths)
    return scores


def brute_force_closeness(graph):
    view = nx.Graph()
    view.add_nodes_from(graph.nodes)
    view.add_edges_from(graph.edges)
    n = len(graph.nodes)
    scores = {}
    for node in graph.nodes:
        lengths = nx.single_source_shortest_path_length(view, node)
        reached, total = len(lengths), sum(lengths.values())
        scores[node] = 0.0 if n <= 1 or total == 0 else ((reached - 1) / (n - 1)) * ((reached - 1) / total)
    return scores


edge_sets = st.sets(
    st.tuples(st.sampled_from(NAMES), st.sampled_from(NAMES)).filter(lambda pair: pair[0] != pair[1]),
    max_size=120,
)


class SmallGraphCentralityTest(SimpleTestCase):
    """Tests against hand-computed values on small graphs."""

    def test_path_of_three(self):
        graph = make_graph([("A", "B"), ("B", "C")])

        closeness = centrality_service.closeness_all(graph)
        betweenness = centrality_service.betweenness_all(graph)

        self.assertAlmostEqual(closeness["B"], 1.0)
        self.assertAlmostEqual(closeness["A"], 2 / 3)
        self.assertAlmostEqual(betweenness["B"], 1.0)
        self.assertEqual(betweenness["A"], 0.0)

    def test_triangle(self):
        graph = make_graph([("A", "B"), ("B", "C"), ("A", "C")])

        self.assertEqual(set(centrality_service.betweenness_all(graph).values()), {0.0})
        for value in centrality_service.closeness_all(graph).values():
            self.assertAlmostEqual(value, 1.0)

    def test_complete_graph_of_four(self):
        graph = make_graph(combinations("ABCD", 2))

        for value in centrality_service.closeness_all(graph).values():
            self.assertAlmostEqual(value, 1.0)

    def test_cycle_of_four(self):
        graph = make_graph([("A", "B"), ("B", "C"), ("C", "D"), ("A", "D")])

        for value in centrality_service.betweenness_all(graph).values():
            self.assertAlmostEqual(value, 0.5)

    def test_disconnected_components_are_scaled(self):
        graph = make_graph([("A", "B"), ("C", "D")])

        for value in centrality_service.closeness_all(graph).values():
            self.assertAlmostEqual(value, 1 / 3)

    def test_isolated_node(self):
        graph = make_graph([("A", "B")], nodes={"Z": 4})

        self.assertEqual(centrality_service.closeness_all(graph)["Z"], 0.0)
        self.assertEqual(centrality_service.betweenness_all(graph)["Z"], 0.0)

    def test_threshold_removes_edges(self):
        graph = make_graph([("A", "B", 3), ("B", "C", 1)])

        closeness = centrality_service.closeness_all(graph, threshold=2)

        self.assertEqual(closeness["C"], 0.0)
        self.assertAlmostEqual(closeness["A"], 0.5)

    def test_chunked_sources_match_single_pass(self):
        """Test summing per-chunk contributions equals one networkx pass over all sources."""
        view = nx.connected_watts_strogatz_graph(150, 4, 0.2, seed=11)
        graph = make_graph([(f"C{source:03d}", f"C{target:03d}") for source, target in view.edges])
        expected = nx.betweenness_centrality(
            nx.relabel_nodes(view, lambda node: f"C{node:03d}"), normalized=False
        )

        betweenness = centrality_service.betweenness_all(graph)

        self.assertEqual(list(betweenness), sorted(expected))
        for node, value in expected.items():
            self.assertAlmostEqual(betweenness[node], value, places=9)


class OracleCentralityTest(SimpleTestCase):
    """Property tests against path enumeration."""

    @given(edges=edge_sets)
    @settings(max_examples=100, deadline=None, derandomize=True)
    def test_matches_brute_force(self, edges):
        graph = make_graph(edges, nodes={NAMES[0]: 1})

        betweenness = centrality_service.betweenness_all(graph)
        closeness = centrality_service.closeness_all(graph)

        for node, expected in brute_force_betweenness(graph).items():
            self.assertAlmostEqual(betweenness[node], expected, places=9)
        for node, expected in brute_force_closeness(graph).items():
            self.assertAlmostEqual(closeness[node], expected, places=9)

    @pytest.mark.slow
    def test_seeded_random_graphs(self):
        """Test 100 seeded random graphs of up to 50 nodes against enumeration, in under 10 seconds."""
        elapsed = 0.0
        for seed in range(100):
            size = 5 + seed % 46
            density = (0.05, 0.1, 0.2, 0.4)[seed % 4]
            view = nx.gnp_random_graph(size, density, seed=seed)
            graph = make_graph(
                [(f"N{source:02d}", f"N{target:02d}") for source, target in view.edges],
                nodes={f"N{node:02d}": 1 for node in view.nodes},
            )

            started = time.perf_counter()
            betweenness = centrality_service.betweenness_all(graph)
            closeness = centrality_service.closeness_all(graph)
            elapsed += time.perf_counter() - started

            for node, expected in brute_force_betweenness(graph).items():
                self.assertLess(abs(betweenness[node] - expected), 1e-9, msg=f"seed {seed}, {node}")
            for node, expected in brute_force_closeness(graph).items():
                self.assertLess(abs(closeness[node] - expected), 1e-9, msg=f"seed {seed}, {node}")

        self.assertLess(elapsed, 10.0)

    @given(edges=edge_sets, weights=st.lists(st.sampled_from([1, 2, 4]), min_size=120, max_size=120))
    @settings(max_examples=60, deadline=None)
    def test_weighted_mode_matches_networkx(self, edges, weights):
        """Test 1/weight lengths against networkx with the same float lengths."""
        weighted_edges = [(source, target, weight) for (source, target), weight in zip(sorted(edges), weights)]
        graph = make_graph(weighted_edges, nodes={NAMES[0]: 1})
        view = nx.Graph()
        view.add_nodes_from(graph.nodes)
        view.add_edges_from(
            (source, target, {"length": 1 / weight}) for (source, target), weight in graph.edges.items()
        )

        betweenness = centrality_service.betweenness_all(graph, weighted=True)
        closeness = centrality_service.closeness_all(graph, weighted=True)
        expected_betweenness = nx.betweenness_centrality(view, normalized=False, weight="length")
        expected_closeness = nx.closeness_centrality(view, distance="length", wf_improved=True)

        for node in graph.nodes:
            self.assertAlmostEqual(betweenness[node], expected_betweenness[node], places=9)
            self.assertAlmostEqual(closeness[node], expected_closeness[node], places=9)

    def test_worker_count_does_not_change_results(self):
        """Test a graph spanning several source chunks gives identical output with two workers."""
        names = [f"C{index:03d}" for index in range(150)]
        edges = list(zip(names, names[1:])) + [(names[index], names[index + 7]) for index in range(0, 140, 5)]
        graph = make_graph(edges)

        single = centrality_service.betweenness_all(graph, workers=1)
        parallel = centrality_service.betweenness_all(graph, workers=2)

        self.assertEqual(single, parallel)
        self.assertEqual(
            centrality_service.closeness_all(graph, workers=1), centrality_service.closeness_all(graph, workers=2)
        )

    def test_invalid_worker_count(self):
        with self.assertRaises(ConfigurationError):
            centrality_service.betweenness_all(make_graph([("A", "B")]), workers=0)


class CentralityTableTest(SimpleTestCase):
    """Tests for ranked tables and region subgraphs."""

    def setUp(self):
        self.star = make_graph(
            [("HUB", "LEAF_A"), ("HUB", "LEAF_B"), ("HUB", "LEAF_C")],
            nodes={"HUB": 9, "LEAF_A": 1, "LEAF_B": 5, "LEAF_C": 5},
        )

    def test_ranking_and_ties(self):
        rows = centrality_service.centrality_table(self.star, top_k=4)

        self.assertEqual([row.entity for row in rows], ["HUB", "LEAF_B", "LEAF_C", "LEAF_A"])
        self.assertAlmostEqual(rows[0].betweenness, 3.0)
        self.assertEqual(rows[0].researcher_count, 9)

    def test_top_k_truncates(self):
        self.assertEqual(len(centrality_service.centrality_table(self.star, top_k=2)), 2)

    def test_sort_by_researchers(self):
        rows = centrality_service.centrality_table(self.star, top_k=4, sort_key=CentralitySortKey.RESEARCHERS)
        self.assertEqual([row.researcher_count for row in rows], [9, 5, 5, 1])

    def test_non_positive_top_k(self):
        for top_k in (0, -3, True):
            with self.subTest(top_k=top_k):
                with self.assertRaises(ConfigurationError):
                    centrality_service.centrality_table(self.star, top_k=top_k)

    def test_region_subgraph_is_recomputed(self):
        graph = make_graph([("FRANCE", "SPAIN"), ("SPAIN", "USA")])

        entities = centrality_service.region_entities(graph, ["france", "usa"])
        subgraph = centrality_service.region_subgraph(graph, entities)

        self.assertEqual(entities, ["FRANCE", "USA"])
        self.assertEqual(subgraph.edges, {})
        self.assertAlmostEqual(centrality_service.betweenness_all(graph)["SPAIN"], 1.0)
        self.assertEqual(set(centrality_service.betweenness_all(subgraph).values()), {0.0})

    def test_region_subgraph_requires_entities(self):
        with self.assertRaises(ContractViolationError):
            centrality_service.region_subgraph(self.star, [])
