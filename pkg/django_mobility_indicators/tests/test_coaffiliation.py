"""Tests for top-two selection, co-affiliation graphs and graph summaries."""

from django.test import SimpleTestCase, override_settings

from ..conf import reload_config
from ..constants import AggregationLevel, OccurrenceCounting
from ..domain import CoAffiliationGraph
from ..exceptions import ContractViolationError
from ..services import corpus_service, coaffiliation_service
from .factories import affiliation, history, histories, record

ES = "SPAIN"
FR = "FRANCE"
US = "USA"
NL = "NETHERLANDS"


class TopTwoEntitiesTest(SimpleTestCase):
    """Tests for the most-common-entity ranking."""

    def test_counts(self):
        author = history("A1", {2003: [FR], 2004: [FR], 2005: [FR, ES], 2006: [ES], 2007: [US]})
        self.assertEqual(coaffiliation_service.top_two_entities(author), (FR, ES))

    def test_ties_broken_by_first_use(self):
        author = history("A1", {2004: [US], 2005: [NL], 2006: [US], 2007: [NL]})
        self.assertEqual(coaffiliation_service.top_two_entities(author), (US, NL))

    def test_same_year_ties_broken_by_key(self):
        author = history("A1", {2004: [US, ES]})
        self.assertEqual(coaffiliation_service.top_two_entities(author), (ES, US))

    def test_single_entity(self):
        author = history("A1", {2004: [NL], 2005: [NL]})
        self.assertEqual(coaffiliation_service.top_two_entities(author), (NL, None))

    def test_publication_and_year_counting_differ(self):
        """Test several papers in one year count once per year but several times per paper."""
        records = [
            record("P1", 2004, {"A1": [ES]}),
            record("P2", 2005, {"A1": [US]}),
            record("P3", 2005, {"A1": [US]}),
            record("P4", 2005, {"A1": [US]}),
            record("P5", 2006, {"A1": [ES]}),
            record("P6", 2007, {"A1": [NL]}),
        ]
        author = corpus_service.build_author_histories(records)["A1"]

        by_paper = coaffiliation_service.top_two_entities(author, counting=OccurrenceCounting.PUBLICATIONS)
        by_year = coaffiliation_service.top_two_entities(author, counting=OccurrenceCounting.YEARS)

        self.assertEqual(by_paper, (US, ES))
        self.assertEqual(by_year, (ES, US))

    @override_settings(MOBILITY_OCCURRENCE_COUNTING="years")
    def test_counting_follows_settings(self):
        reload_config()
        self.addCleanup(reload_config)
        records = [record("P1", 2004, {"A1": [ES]}), record("P2", 2005, {"A1": [US]}), record("P3", 2005, {"A1": [US]})]
        author = corpus_service.build_author_histories(records)["A1"]

        self.assertEqual(coaffiliation_service.top_two_entities(author), (ES, US))


class BuildGraphTest(SimpleTestCase):
    """Tests for graph construction."""

    def test_edges_and_nodes(self):
        data = histories(
            {
                "R1": {2004: [ES], 2005: [FR]},
                "R2": {2004: [ES, FR]},
                "R3": {2004: [ES], 2005: [US]},
                "R4": {2004: [NL]},
            }
        )

        graph = coaffiliation_service.build_coaffiliation_graph(data)

        self.assertEqual(graph.edges, {(FR, ES): 2, (ES, US): 1})
        self.assertEqual(graph.nodes, {ES: 3, FR: 2, NL: 1, US: 1})
        self.assertEqual(graph.researcher_count, 4)

    def test_only_top_two_pair_is_linked(self):
        author = {"R1": history("R1", {2003: [FR], 2004: [FR], 2005: [ES], 2006: [ES], 2007: [US]})}

        graph = coaffiliation_service.build_coaffiliation_graph(author)

        self.assertEqual(graph.edges, {(FR, ES): 1})
        self.assertEqual(set(graph.nodes), {ES, FR, US})

    def test_all_pairs(self):
        author = {"R1": history("R1", {2004: [FR, ES, US]})}

        graph = coaffiliation_service.build_coaffiliation_graph(author, all_pairs=True)

        self.assertEqual(graph.edges, {(FR, ES): 1, (FR, US): 1, (ES, US): 1})

    def test_city_level_scope(self):
        records = [
            record("P1", 2004, {"R1": [affiliation(ES, city="MADRID")]}),
            record("P2", 2005, {"R1": [affiliation(ES, city="BARCELONA")]}),
            record("P3", 2004, {"R2": [affiliation(ES, city="MADRID")]}),
            record("P4", 2005, {"R2": [affiliation(FR, city="PARIS")]}),
        ]
        data = corpus_service.build_author_histories(records)

        graph = coaffiliation_service.build_coaffiliation_graph(data, AggregationLevel.CITY, scope=["spain"])

        self.assertEqual(graph.edges, {("SPAIN|BARCELONA", "SPAIN|MADRID"): 1})
        self.assertEqual(graph.researcher_count, 1)
        self.assertNotIn("FRANCE|PARIS", graph.nodes)

    def test_invariants_rejected(self):
        with self.assertRaises(ContractViolationError):
            CoAffiliationGraph(level="country", nodes={ES: 1}, edges={(ES, ES): 1})
        with self.assertRaises(ContractViolationError):
            CoAffiliationGraph(level="country", nodes={ES: 1, FR: 1}, edges={(ES, FR): 1})
        with self.assertRaises(ContractViolationError):
            CoAffiliationGraph(level="country", nodes={ES: 1}, edges={(ES, FR): 1})

    def test_deterministic_under_input_order(self):
        timelines = {"R1": {2004: [ES], 2005: [FR]}, "R2": {2004: [US], 2005: [NL]}, "R3": {2004: [FR, NL]}}
        forward = coaffiliation_service.build_coaffiliation_graph(histories(timelines))
        backward = coaffiliation_service.build_coaffiliation_graph(histories(dict(reversed(list(timelines.items())))))

        self.assertEqual(forward, backward)


class GraphSummaryTest(SimpleTestCase):
    """Tests for graph summaries."""

    def test_empty_graph(self):
        summary = coaffiliation_service.graph_summary(CoAffiliationGraph.empty("country"))

        self.assertEqual((summary.node_count, summary.edge_count, summary.component_count), (0, 0, 0))
        self.assertEqual(summary.density, 0.0)

    def test_triangle(self):
        graph = coaffiliation_service.build_coaffiliation_graph(
            {"R1": history("R1", {2004: [FR, ES, US]})}, all_pairs=True
        )

        summary = coaffiliation_service.graph_summary(graph)

        self.assertEqual(summary.node_count, 3)
        self.assertEqual(summary.edge_count, 3)
        self.assertEqual(summary.component_count, 1)
        self.assertEqual(summary.density, 1.0)

    def test_threshold_drops_light_edges(self):
        graph = CoAffiliationGraph(
            level="country", nodes={ES: 3, FR: 2, US: 1}, edges={(FR, ES): 2, (ES, US): 1}, researcher_count=3
        )

        summary = coaffiliation_service.graph_summary(graph, threshold=2)

        self.assertEqual(summary.node_count, 3)
        self.assertEqual(summary.edge_count, 1)
        self.assertEqual(summary.component_count, 2)
        self.assertAlmostEqual(summary.density, 1 / 3)
