"""Tests for artifact writers and readers."""

import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from .. import exporters
from ..constants import ExportFormat, MobilityLabel
from ..domain import CentralityRow, CitationIndicators, CoAffiliationGraph, MobilityEvent, ShareRow
from ..exceptions import DataInconsistencyError


class ExporterTestCase(SimpleTestCase):
    def setUp(self):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        self.out = Path(directory.name)

    def lines(self, name):
        return (self.out / name).read_text(encoding="utf-8").splitlines()


class GraphExportTest(ExporterTestCase):
    """Tests for graph files."""

    def setUp(self):
        super().setUp()
        self.graph = CoAffiliationGraph(
            level="city",
            nodes={"SPAIN|BARCELONA": 2, "SPAIN|MADRID": 3, "FRANCE|PARIS": 1},
            edges={("FRANCE|PARIS", "SPAIN|MADRID"): 1, ("SPAIN|BARCELONA", "SPAIN|MADRID"): 2},
            researcher_count=4,
        )

    def test_csv_round_trip(self):
        written = exporters.write_graph(self.graph, self.out / "network_city")

        self.assertEqual([path.name for path in written], ["network_city_edges.csv", "network_city_nodes.csv"])
        self.assertEqual(exporters.read_graph_csv(self.out / "network_city", "city", 4), self.graph)

    def test_threshold_filters_edges(self):
        exporters.write_graph(self.graph, self.out / "network_city", threshold=2)

        self.assertEqual(
            self.lines("network_city_edges.csv"), ["source,target,weight", "SPAIN|BARCELONA,SPAIN|MADRID,2"]
        )
        self.assertEqual(len(self.lines("network_city_nodes.csv")), 4)

    def test_graphml_round_trip(self):
        written = exporters.write_graph(self.graph, self.out / "network_city", ExportFormat.GRAPHML)

        self.assertEqual(written[-1].suffix, ".graphml")
        self.assertEqual(exporters.read_graphml(written[-1]), self.graph)

    def test_pajek(self):
        written = exporters.write_graph(self.graph, self.out / "network_city", ExportFormat.PAJEK)

        self.assertEqual(written[-1].name, "network_city.net")
        self.assertTrue(written[-1].read_text().startswith("*vertices 3"))


class EventExportTest(ExporterTestCase):
    """Tests for event tables."""

    def test_round_trip(self):
        events = [
            MobilityEvent("A2", 2004, MobilityLabel.MULTI_AFFILIATION, None, frozenset({"SPAIN", "USA"}), frozenset()),
            MobilityEvent(
                "A1", 2005, MobilityLabel.MOBILE, frozenset({"USA"}), frozenset({"SPAIN"}), frozenset({"SPAIN"}), True
            ),
        ]
        path = self.out / "events.csv"

        exporters.write_events(events, path)

        self.assertEqual(exporters.read_events(path), sorted(events, key=lambda event: event.author_id))
        self.assertEqual(self.lines("events.csv")[2], "A2,2004,MULTI_AFFILIATION,,SPAIN;USA,,false")

    def test_missing_columns(self):
        path = self.out / "events.csv"
        path.write_text("author_id,year\nA1,2004\n", encoding="utf-8")

        with self.assertRaises(DataInconsistencyError):
            exporters.read_events(path)


class NumericExportTest(ExporterTestCase):
    """Tests for fixed-decimal formatting."""

    def test_centrality_decimals(self):
        exporters.write_centrality([CentralityRow("SPAIN", 3, 2 / 3, 1.0)], self.out / "centrality.csv")

        self.assertEqual(self.lines("centrality.csv"), ["entity,researchers,closeness,betweenness", "SPAIN,3,0.666667,1.0000"])

    def test_undefined_share_is_empty(self):
        share = ShareRow(country="SPAIN", capacity=0, capacity_share=0.0, observed_share=0.5, normalized_share=None)

        exporters.write_shares([share], self.out / "shares.csv")

        self.assertEqual(self.lines("shares.csv")[1], "SPAIN,0,0.000000,0.500000,")

    def test_indicators_end_with_corpus_row(self):
        value = CitationIndicators(paper_count=2, total_citations=3, mean_citations=1.5, mncs=1.0, pp_top10=0.5)

        exporters.write_indicators(
            {MobilityLabel.MOBILE: value, MobilityLabel.NON_MOBILE: value}, value, self.out / "indicators.csv"
        )

        labels = [line.split(",")[0] for line in self.lines("indicators.csv")[1:]]
        self.assertEqual(labels, ["NON_MOBILE", "MOBILE", "ALL"])
        self.assertEqual(self.lines("indicators.csv")[-1], "ALL,2,3,1.5000,1.0000,0.5000")

    def test_unclassified_row_precedes_corpus_row(self):
        value = CitationIndicators(paper_count=2, total_citations=3, mean_citations=1.5, mncs=1.0, pp_top10=0.5)
        early = CitationIndicators(paper_count=1, total_citations=0, mean_citations=0.0, mncs=0.0, pp_top10=0.0)

        exporters.write_indicators({MobilityLabel.MOBILE: value}, value, self.out / "indicators.csv", unclassified=early)

        labels = [line.split(",")[0] for line in self.lines("indicators.csv")[1:]]
        self.assertEqual(labels, ["MOBILE", "UNCLASSIFIED", "ALL"])
