"""Co-affiliation service: researcher co-occurrence networks at every level."""

from collections import Counter
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

import networkx as nx

from ..constants import AggregationLevel, OccurrenceCounting
from ..domain import AuthorHistory, CoAffiliationGraph, EntityKey, GraphSummary, country_of, entity_keys
from ..exporters import graph_to_networkx
from .base import BaseService, log_execution

TopTwo = Tuple[Optional[EntityKey], Optional[EntityKey]]


class CoAffiliationService(BaseService):
    """Service for building and summarizing co-affiliation graphs."""

    def entity_occurrences(
        self, history: AuthorHistory, level: str, counting: Optional[str] = None
    ) -> Tuple[Counter, Dict[EntityKey, int]]:
        """Occurrence count and first-use year of every entity of one author."""
        counting = OccurrenceCounting(counting or self.config.OCCURRENCE_COUNTING)
        occurrences: Counter = Counter()
        first_use: Dict[EntityKey, int] = {}

        if counting == OccurrenceCounting.PUBLICATIONS:
            for publication in history.publications:
                for key in entity_keys(publication.affiliations, level):
                    occurrences[key] += 1
                    first_use[key] = min(first_use.get(key, publication.year), publication.year)
        else:
            for year, keys in history.entities_by_year(level).items():
                for key in keys:
                    occurrences[key] += 1
                    first_use.setdefault(key, year)
        return occurrences, first_use

    def top_two_entities(
        self, history: AuthorHistory, level: str = AggregationLevel.COUNTRY, counting: Optional[str] = None
    ) -> TopTwo:
        """The author's two most common entities.

        Ties are broken by earliest first-use year, then by key. The second
        entry is None for single-entity authors; both are None when the author
        has no entity at this level.
        """
        level = self.validate_level(level)
        occurrences, first_use = self.entity_occurrences(history, level, counting)
        ranked = sorted(occurrences, key=lambda key: (-occurrences[key], first_use[key], key))
        if not ranked:
            return None, None
        return ranked[0], ranked[1] if len(ranked) > 1 else None

    def in_scope(self, keys: Iterable[Optional[EntityKey]], scope: Optional[FrozenSet[str]]) -> bool:
        if scope is None:
            return True
        return all(country_of(key) in scope for key in keys if key)

    @log_execution()
    def build_coaffiliation_graph(
        self,
        histories: Mapping[str, AuthorHistory],
        level: str = AggregationLevel.COUNTRY,
        scope: Optional[Iterable[str]] = None,
        all_pairs: Optional[bool] = None,
        counting: Optional[str] = None,
    ) -> CoAffiliationGraph:
        """Build the researcher co-occurrence graph.

        Args:
            histories: Eligible author histories
            level: Aggregation level of the nodes
            scope: Country names; a researcher is kept only when both top
                entities lie in scope, and only in-scope entities become nodes
            all_pairs: Link every pair of a researcher's entities instead of
                only the top-two pair
            counting: Occurrence counting used for the top-two ranking

        """
        level = self.validate_level(level)
        all_pairs = self.config.ALL_PAIRS_EDGES if all_pairs is None else all_pairs
        scope = frozenset(country.strip().upper() for country in scope) if scope is not None else None

        nodes: Counter = Counter()
        edges: Counter = Counter()
        researchers = 0
        for author_id in sorted(histories):
            history = histories[author_id]
            top = self.top_two_entities(history, level, counting)
            if top[0] is None or not self.in_scope(top, scope):
                continue

            researchers += 1
            entities = sorted(key for key in history.all_entities(level) if self.in_scope([key], scope))
            nodes.update(entities)

            if all_pairs:
                edges.update(combinations(entities, 2))
            elif top[1] is not None:
                edges[tuple(sorted(top))] += 1

        graph = CoAffiliationGraph(
            level=level,
            nodes=dict(sorted(nodes.items())),
            edges=dict(sorted(edges.items())),
            researcher_count=researchers,
        )
        self.log_operation(
            "Built co-affiliation graph",
            level=str(level),
            nodes=len(graph.nodes),
            edges=len(graph.edges),
            researchers=researchers,
        )
        return graph

    def graph_summary(self, graph: CoAffiliationGraph, threshold: int = 1) -> GraphSummary:
        """Node, edge, researcher and component counts plus density."""
        view = graph_to_networkx(graph, threshold)
        nodes = view.number_of_nodes()
        edges = view.number_of_edges()
        return GraphSummary(
            node_count=nodes,
            edge_count=edges,
            researcher_count=graph.researcher_count,
            component_count=nx.number_connected_components(view) if nodes else 0,
            density=self.safe_divide(2 * edges, nodes * (nodes - 1)),
        )


coaffiliation_service = CoAffiliationService()
