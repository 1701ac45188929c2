"""Domain types for django-mobility-indicators.

All types are immutable once constructed and safe to share read-only
between threads and worker processes.
"""

from bisect import bisect_right
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from .constants import ENTITY_SEPARATOR, MOBILE_LABELS, MULTI_LABELS, SET_SEPARATOR, AggregationLevel, MobilityLabel
from .exceptions import ContractViolationError

# Canonical composite name of an entity at one aggregation level. The level
# travels with the container (graph, event list, flow matrix), not the key.
EntityKey = str


# ===========================================
# CORPUS TYPES
# ===========================================


@dataclass(frozen=True, order=True)
class Affiliation:
    """One address on a publication."""

    organization: str
    city: str
    country: str

    @property
    def is_complete(self) -> bool:
        return bool(self.organization and self.city)

    def entity_key(self, level: str) -> Optional[EntityKey]:
        """Return the entity key at ``level``, or None when the name is missing.

        City and organization keys are qualified by country so that homonyms in
        different countries stay distinct.
        """
        if level == AggregationLevel.COUNTRY:
            return self.country
        if level == AggregationLevel.CITY:
            return f"{self.country}{ENTITY_SEPARATOR}{self.city}" if self.city else None
        if level == AggregationLevel.ORGANIZATION:
            return f"{self.country}{ENTITY_SEPARATOR}{self.organization}" if self.organization else None
        raise ContractViolationError(f"Unknown aggregation level: {level}")


def country_of(key: EntityKey) -> str:
    """Country component of an entity key at any level."""
    return key.split(ENTITY_SEPARATOR, 1)[0]


def entity_keys(affiliations: Iterable[Affiliation], level: str) -> FrozenSet[EntityKey]:
    keys = (affiliation.entity_key(level) for affiliation in affiliations)
    return frozenset(key for key in keys if key)


@dataclass(frozen=True)
class AuthorEntry:
    author_id: str
    affiliations: Tuple[Affiliation, ...] = ()


@dataclass(frozen=True)
class PublicationRecord:
    """One publication with its per-author affiliation lists."""

    pub_id: str
    year: int
    field: str
    citations: int
    author_entries: Tuple[AuthorEntry, ...]

    @property
    def author_ids(self) -> Tuple[str, ...]:
        return tuple(entry.author_id for entry in self.author_entries)


@dataclass(frozen=True, order=True)
class AuthorPublication:
    """An author's view of one publication: the addresses they listed on it."""

    year: int
    pub_id: str
    affiliations: FrozenSet[Affiliation] = field(compare=False)


@dataclass(frozen=True)
class AuthorHistory:
    """Per-researcher timeline of yearly affiliation sets.

    ``timeline`` holds only years with at least one affiliation; ``publications``
    holds every publication, including those without address data.
    """

    author_id: str
    timeline: Mapping[int, FrozenSet[Affiliation]]
    pub_count: int
    publications: Tuple[AuthorPublication, ...] = ()
    publication_years: Tuple[int, ...] = ()

    @property
    def first_year(self) -> Optional[int]:
        """First year with address data; None when the author has none."""
        return min(self.timeline) if self.timeline else None

    @property
    def last_year(self) -> Optional[int]:
        return max(self.timeline) if self.timeline else None

    @property
    def first_publication_year(self) -> int:
        return min(self.publication_years)

    @property
    def last_publication_year(self) -> int:
        return max(self.publication_years)

    @property
    def active_years(self) -> Tuple[int, ...]:
        return tuple(sorted(self.timeline))

    def entities_by_year(self, level: str) -> Dict[int, FrozenSet[EntityKey]]:
        """Entity sets per year at ``level``; years without a usable key are dropped."""
        result = {}
        for year in sorted(self.timeline):
            keys = entity_keys(self.timeline[year], level)
            if keys:
                result[year] = keys
        return result

    def origin_entities(self, level: str) -> FrozenSet[EntityKey]:
        by_year = self.entities_by_year(level)
        if not by_year:
            return frozenset()
        return by_year[min(by_year)]

    def all_entities(self, level: str) -> FrozenSet[EntityKey]:
        keys = set()
        for affiliations in self.timeline.values():
            keys.update(entity_keys(affiliations, level))
        return frozenset(keys)


@dataclass(frozen=True)
class FieldYearBaseline:
    """Citation reference values of one (field, year) cell."""

    field: str
    year: int
    paper_count: int
    total_citations: int
    # Sorted ascending; enough to evaluate the top-10% rule for any count.
    citation_distribution: Tuple[int, ...] = ()

    @property
    def mean_citations(self) -> float:
        return self.total_citations / self.paper_count

    def fraction_greater(self, citations: int) -> float:
        """Share of papers in the cell cited strictly more than ``citations``."""
        greater = len(self.citation_distribution) - bisect_right(self.citation_distribution, citations)
        return greater / self.paper_count


# ===========================================
# MOBILITY TYPES
# ===========================================


@dataclass(frozen=True)
class MobilityEvent:
    """Classification of one active author-year."""

    author_id: str
    year: int
    label: MobilityLabel
    prior_entities: Optional[FrozenSet[EntityKey]]
    current_entities: FrozenSet[EntityKey]
    new_entities: FrozenSet[EntityKey]
    is_return: bool = False

    @property
    def is_mobile(self) -> bool:
        return self.label in MOBILE_LABELS

    @property
    def is_multi(self) -> bool:
        return self.label in MULTI_LABELS

    def with_return(self, is_return: bool) -> "MobilityEvent":
        return replace(self, is_return=is_return)


@dataclass(frozen=True)
class AuthorMobilityProfile:
    author_id: str
    origin_entities: FrozenSet[EntityKey]
    ever_mobile: bool
    ever_multi: bool
    returned: bool
    events: Tuple[MobilityEvent, ...]


# ===========================================
# NETWORK TYPES
# ===========================================


@dataclass(frozen=True)
class CoAffiliationGraph:
    """Weighted undirected co-affiliation graph.

    ``nodes`` maps an entity to its researcher count; ``edges`` maps a sorted
    entity pair to the number of researchers linking the two.
    """

    level: str
    nodes: Mapping[EntityKey, int]
    edges: Mapping[Tuple[EntityKey, EntityKey], int]
    researcher_count: int = 0

    def __post_init__(self):
        for (source, target), weight in self.edges.items():
            if source == target:
                raise ContractViolationError(f"Self-loop on {source}")
            if source > target:
                raise ContractViolationError(f"Edge ({source}, {target}) is not stored in sorted order")
            if source not in self.nodes or target not in self.nodes:
                raise ContractViolationError(f"Edge ({source}, {target}) has an endpoint outside the node set")
            if weight < 1:
                raise ContractViolationError(f"Edge ({source}, {target}) has weight {weight}")
        for key, weight in self.nodes.items():
            if not key or weight < 1:
                raise ContractViolationError(f"Node {key!r} has weight {weight}")

    @classmethod
    def empty(cls, level: str) -> "CoAffiliationGraph":
        return cls(level=level, nodes={}, edges={}, researcher_count=0)

    def edge_items(self, threshold: int = 1) -> List[Tuple[EntityKey, EntityKey, int]]:
        """Edges at or above ``threshold`` in canonical order."""
        return [
            (source, target, weight)
            for (source, target), weight in sorted(self.edges.items())
            if weight >= threshold
        ]

    def induced(self, entities: Iterable[EntityKey]) -> "CoAffiliationGraph":
        """Subgraph induced on the listed entities that exist in the graph."""
        keep = {key for key in entities if key in self.nodes}
        return CoAffiliationGraph(
            level=self.level,
            nodes={key: weight for key, weight in sorted(self.nodes.items()) if key in keep},
            edges={
                pair: weight
                for pair, weight in sorted(self.edges.items())
                if pair[0] in keep and pair[1] in keep
            },
            researcher_count=self.researcher_count,
        )


@dataclass(frozen=True)
class GraphSummary:
    node_count: int
    edge_count: int
    researcher_count: int
    component_count: int
    density: float


@dataclass(frozen=True)
class CentralityRow:
    entity: EntityKey
    researcher_count: int
    closeness: float
    betweenness: float


# ===========================================
# FLOW TYPES
# ===========================================


@dataclass(frozen=True, eq=False)
class FlowMatrix:
    """Directed sender-to-receiver flow with per-entity capacity counts."""

    entities: Tuple[EntityKey, ...]
    flow: np.ndarray
    capacity: Mapping[EntityKey, int]

    def __post_init__(self):
        size = len(self.entities)
        if self.flow.shape != (size, size):
            raise ContractViolationError(f"Flow matrix shape {self.flow.shape} does not match {size} entities")
        if np.any(np.diag(self.flow) != 0):
            raise ContractViolationError("Flow matrix diagonal must be zero")
        if np.any(self.flow < 0):
            raise ContractViolationError("Flow matrix cells must be non-negative")

    def index(self, entity: EntityKey) -> int:
        return self.entities.index(entity)

    def cell(self, sender: EntityKey, receiver: EntityKey) -> float:
        if sender not in self.entities or receiver not in self.entities:
            return 0.0
        return float(self.flow[self.index(sender), self.index(receiver)])

    @property
    def total(self) -> float:
        return float(self.flow.sum())

    @property
    def row_sums(self) -> np.ndarray:
        return self.flow.sum(axis=1)

    @property
    def column_sums(self) -> np.ndarray:
        return self.flow.sum(axis=0)


@dataclass(frozen=True)
class ShareRow:
    """Capacity-normalized share of one country.

    ``normalized_share`` is None when the country has flow but no capacity.
    """

    country: EntityKey
    capacity: int
    capacity_share: float
    observed_share: float
    normalized_share: Optional[float]


# ===========================================
# IMPACT TYPES
# ===========================================


@dataclass(frozen=True)
class CitationIndicators:
    paper_count: int
    total_citations: int
    mean_citations: float
    mncs: float
    pp_top10: float


# ===========================================
# SET SERIALIZATION
# ===========================================


def join_entities(entities: Optional[Iterable[EntityKey]]) -> str:
    """Serialize an entity set as sorted, semicolon-joined keys; None becomes empty."""
    if entities is None:
        return ""
    return SET_SEPARATOR.join(sorted(entities))


def split_entities(value: str) -> FrozenSet[EntityKey]:
    return frozenset(part for part in (value or "").split(SET_SEPARATOR) if part)
