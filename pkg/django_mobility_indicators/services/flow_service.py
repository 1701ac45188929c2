"""Flow service: directed mobility flows and capacity-normalized shares.

The normalized share of a country is its observed share of sent (or
received) flow divided by its share of the researcher population, so a
value above 1 means the country sends (or receives) more than its size
predicts.
"""

from collections import Counter, defaultdict
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from ..constants import AggregationLevel, FlowDirection
from ..domain import AuthorHistory, EntityKey, FlowMatrix, MobilityEvent, ShareRow, country_of
from ..exceptions import ContractViolationError, FlowError, NoMobilityEventsError
from .base import BaseService, log_execution

FlowEdge = Tuple[EntityKey, EntityKey, float]


class FlowService(BaseService):
    """Service for flow matrices and sending/receiving shares."""

    def flow_edges_from_event(self, event: MobilityEvent) -> List[FlowEdge]:
        """Split one mobility event over its prior and new entities.

        Each (prior, new) pair carries 1/(|prior|*|new|), so an event weighs 1.

        Raises:
            ContractViolationError: If the event is not a mobility event

        """
        if not event.is_mobile or not event.prior_entities or not event.new_entities:
            raise ContractViolationError(
                f"Event {event.author_id}/{event.year} labelled {event.label} is not a mobility event"
            )
        weight = 1.0 / (len(event.prior_entities) * len(event.new_entities))
        return [
            (sender, receiver, weight)
            for sender in sorted(event.prior_entities)
            for receiver in sorted(event.new_entities)
        ]

    def capacities(
        self, histories: Mapping[str, AuthorHistory], level: str = AggregationLevel.COUNTRY
    ) -> Dict[EntityKey, int]:
        """Eligible researchers ever affiliated with each entity."""
        level = self.validate_level(level)
        counts: Counter = Counter()
        for history in histories.values():
            counts.update(history.all_entities(level))
        return dict(sorted(counts.items()))

    def _in_scope(self, key: EntityKey, scope: Optional[frozenset]) -> bool:
        return scope is None or country_of(key) in scope

    @log_execution()
    def build_flow_matrix(
        self,
        events: Iterable[MobilityEvent],
        capacities: Mapping[EntityKey, int],
        scope: Optional[Iterable[str]] = None,
        dedup_researchers: Optional[bool] = None,
        half_in_scope: Optional[bool] = None,
    ) -> FlowMatrix:
        """Sum event edges into a sender-by-receiver matrix.

        Args:
            events: Classified events; non-mobile events are ignored
            capacities: Researcher counts per entity
            scope: Country names; flows need both endpoints in scope (or only
                the sender in half-in-scope mode)
            dedup_researchers: Spread a total weight of 1 over each mobile
                researcher's events instead of 1 per event
            half_in_scope: Keep flows whose sender is in scope

        """
        dedup_researchers = self.config.FLOW_DEDUP_RESEARCHERS if dedup_researchers is None else dedup_researchers
        half_in_scope = self.config.FLOW_HALF_IN_SCOPE if half_in_scope is None else half_in_scope
        scope = frozenset(country.strip().upper() for country in scope) if scope is not None else None

        mobile = sorted(
            (event for event in events if event.is_mobile), key=lambda event: (event.author_id, event.year)
        )
        per_researcher = Counter(event.author_id for event in mobile)

        cells: Dict[Tuple[EntityKey, EntityKey], float] = defaultdict(float)
        for event in mobile:
            scale = 1.0 / per_researcher[event.author_id] if dedup_researchers else 1.0
            for sender, receiver, weight in self.flow_edges_from_event(event):
                if not self._in_scope(sender, scope):
                    continue
                if not half_in_scope and not self._in_scope(receiver, scope):
                    continue
                cells[(sender, receiver)] += weight * scale

        entities = {key for key in capacities if self._in_scope(key, scope)}
        for sender, receiver in cells:
            entities.update((sender, receiver))
        entities = tuple(sorted(entities))
        position = {key: index for index, key in enumerate(entities)}

        flow = np.zeros((len(entities), len(entities)), dtype=float)
        for (sender, receiver), weight in sorted(cells.items()):
            flow[position[sender], position[receiver]] += weight

        matrix = FlowMatrix(
            entities=entities,
            flow=flow,
            capacity={key: int(capacities.get(key, 0)) for key in entities},
        )
        self.log_operation("Built flow matrix", entities=len(entities), total_flow=round(matrix.total, 6))
        return matrix

    def normalized_shares(self, matrix: FlowMatrix, direction: str = FlowDirection.SENDING) -> List[ShareRow]:
        """Capacity-normalized sending or receiving share of every entity.

        Raises:
            NoMobilityEventsError: If the matrix carries no flow
            FlowError: If no entity has capacity

        """
        direction = FlowDirection(direction)
        total_flow = matrix.total
        if total_flow <= 0:
            raise NoMobilityEventsError()
        total_capacity = sum(matrix.capacity.values())
        if total_capacity <= 0:
            raise FlowError("no researcher capacity in scope", code="NO_CAPACITY")

        sums = matrix.row_sums if direction == FlowDirection.SENDING else matrix.column_sums
        rows = []
        for index, key in enumerate(matrix.entities):
            capacity = matrix.capacity.get(key, 0)
            capacity_share = capacity / total_capacity
            observed_share = float(sums[index]) / total_flow
            normalized = observed_share / capacity_share if capacity_share > 0 else None
            if normalized is None and observed_share > 0:
                self.logger.warning(
                    f"{key} has {direction.value} flow but no capacity; normalized share undefined",
                    extra={"_custom_fields": {"entity": key}},
                )
            rows.append(
                ShareRow(
                    country=key,
                    capacity=capacity,
                    capacity_share=capacity_share,
                    observed_share=observed_share,
                    normalized_share=normalized,
                )
            )
        return rows

    def flow_pairs(self, matrix: FlowMatrix) -> Dict[Tuple[EntityKey, EntityKey], float]:
        """Non-zero cells keyed by (sender, receiver)."""
        senders, receivers = np.nonzero(matrix.flow)
        return {
            (matrix.entities[i], matrix.entities[j]): float(matrix.flow[i, j])
            for i, j in sorted(zip(senders.tolist(), receivers.tolist()))
        }

    def heatmap_rows(self, matrix: FlowMatrix) -> List[Dict[str, object]]:
        """Long-format (country, direction, normalized_share) table for plotting."""
        rows = []
        for direction in FlowDirection:
            for share in self.normalized_shares(matrix, direction):
                rows.append(
                    {"country": share.country, "direction": direction.value, "normalized_share": share.normalized_share}
                )
        return rows


flow_service = FlowService()
