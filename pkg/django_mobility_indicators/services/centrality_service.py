"""Centrality service: closeness, betweenness and ranked centrality tables."""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import networkx as nx

from ..constants import CentralitySortKey, DefaultValues
from ..domain import CentralityRow, CoAffiliationGraph, EntityKey, country_of
from ..exceptions import ConfigurationError, ContractViolationError
from ..exporters import graph_to_networkx
from .base import BaseService, log_execution


def betweenness_partial(view: nx.Graph, sources: Sequence[EntityKey], weight: Optional[str]) -> Dict[EntityKey, float]:
    """Betweenness contributed by shortest paths leaving ``sources``."""
    return nx.betweenness_centrality_subset(view, sources=sources, targets=list(view), normalized=False, weight=weight)


def closeness_partial(view: nx.Graph, nodes: Sequence[EntityKey], weight: Optional[str]) -> Dict[EntityKey, float]:
    return {node: nx.closeness_centrality(view, u=node, distance=weight, wf_improved=True) for node in nodes}


class CentralityService(BaseService):
    """Service for centrality measures over co-affiliation graphs.

    Edges at or above the threshold are treated as present and unweighted
    unless the weighted mode is enabled, where the length of an edge is
    1/weight.
    """

    def _view(self, graph: CoAffiliationGraph, threshold: Optional[int], weighted: Optional[bool]):
        """networkx view of the graph plus the edge attribute to use as length."""
        threshold = self.config.EDGE_THRESHOLD if threshold is None else threshold
        weighted = self.config.WEIGHTED_CENTRALITY if weighted is None else weighted
        view = graph_to_networkx(graph, threshold)
        if not weighted:
            return view, None
        for _, _, data in view.edges(data=True):
            data["length"] = 1.0 / data["weight"]
        return view, "length"

    def _run_chunks(
        self, function: Callable, view: nx.Graph, weight: Optional[str], workers: Optional[int]
    ) -> List[Dict[EntityKey, float]]:
        """Evaluate ``function`` over node chunks, in chunk order."""
        workers = self.config.CENTRALITY_WORKERS if workers is None else workers
        self.validate_positive_int(workers, "MOBILITY_CENTRALITY_WORKERS")
        nodes = sorted(view)
        size = DefaultValues.CENTRALITY_CHUNK_SIZE
        chunks = [nodes[start : start + size] for start in range(0, len(nodes), size)]

        if workers == 1 or len(chunks) <= 1:
            return [function(view, chunk, weight) for chunk in chunks]

        with ProcessPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(function, [view] * len(chunks), chunks, [weight] * len(chunks)))

    @log_execution()
    def closeness_all(
        self,
        graph: CoAffiliationGraph,
        threshold: Optional[int] = None,
        weighted: Optional[bool] = None,
        workers: Optional[int] = None,
    ) -> Dict[EntityKey, float]:
        """Component-scaled closeness of every node; isolated nodes score 0."""
        view, weight = self._view(graph, threshold, weighted)
        values = {}
        for partial in self._run_chunks(closeness_partial, view, weight, workers):
            values.update(partial)
        return {node: values[node] for node in sorted(values)}

    @log_execution()
    def betweenness_all(
        self,
        graph: CoAffiliationGraph,
        threshold: Optional[int] = None,
        weighted: Optional[bool] = None,
        workers: Optional[int] = None,
    ) -> Dict[EntityKey, float]:
        """Non-normalized betweenness of every node over unordered pairs."""
        view, weight = self._view(graph, threshold, weighted)
        totals = dict.fromkeys(sorted(view), 0.0)
        for partial in self._run_chunks(betweenness_partial, view, weight, workers):
            for node, value in partial.items():
                totals[node] += value
        return totals

    def centrality_table(
        self,
        graph: CoAffiliationGraph,
        top_k: Optional[int] = None,
        sort_key: str = CentralitySortKey.BETWEENNESS,
        threshold: Optional[int] = None,
        weighted: Optional[bool] = None,
        workers: Optional[int] = None,
    ) -> List[CentralityRow]:
        """Ranked rows, descending by ``sort_key``.

        Ties fall back to researcher count (descending) and then entity key.

        Raises:
            ConfigurationError: If top_k is not positive

        """
        top_k = self.config.TOP_K if top_k is None else top_k
        if isinstance(top_k, bool) or not isinstance(top_k, int) or top_k <= 0:
            raise ConfigurationError(f"top_k must be a positive integer, got {top_k}", setting="MOBILITY_TOP_K")
        sort_key = CentralitySortKey(sort_key)

        closeness = self.closeness_all(graph, threshold, weighted, workers)
        betweenness = self.betweenness_all(graph, threshold, weighted, workers)
        rows = [
            CentralityRow(
                entity=entity,
                researcher_count=graph.nodes[entity],
                closeness=closeness[entity],
                betweenness=betweenness[entity],
            )
            for entity in sorted(graph.nodes)
        ]

        primary = {
            CentralitySortKey.BETWEENNESS: lambda row: row.betweenness,
            CentralitySortKey.CLOSENESS: lambda row: row.closeness,
            CentralitySortKey.RESEARCHERS: lambda row: row.researcher_count,
        }[sort_key]
        rows.sort(key=lambda row: (-primary(row), -row.researcher_count, row.entity))
        return rows[:top_k]

    def region_entities(self, graph: CoAffiliationGraph, countries: Iterable[str]) -> List[EntityKey]:
        """Nodes of the graph located in any of the listed countries."""
        countries = {country.strip().upper() for country in countries}
        return [key for key in sorted(graph.nodes) if country_of(key) in countries]

    def region_subgraph(self, graph: CoAffiliationGraph, entities: Iterable[EntityKey]) -> CoAffiliationGraph:
        """Subgraph induced on the listed entities.

        Centralities must be recomputed on the result; values of the full
        graph do not carry over.

        Raises:
            ContractViolationError: If the entity list is empty

        """
        entities = list(entities)
        if not entities:
            raise ContractViolationError("region_subgraph requires a non-empty entity set")
        subgraph = graph.induced(entities)
        if not subgraph.nodes:
            self.logger.warning("No listed entity is present in the graph; region subgraph is empty")
        return subgraph


centrality_service = CentralityService()
