"""Mobility service: classify author-years and summarize mobility profiles."""

from collections import Counter, defaultdict
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..constants import AggregationLevel, MobilityLabel
from ..domain import AuthorHistory, AuthorMobilityProfile, EntityKey, MobilityEvent, entity_keys
from ..exceptions import ContractViolationError
from .base import BaseService, log_execution


class MobilityService(BaseService):
    """Service for year-by-year mobility classification."""

    def label_year(
        self,
        current: FrozenSet[EntityKey],
        prior: Optional[FrozenSet[EntityKey]],
        multi: Optional[bool] = None,
    ) -> MobilityLabel:
        """Label one active year against the preceding active year.

        Args:
            current: Entities of the year; must be non-empty
            prior: Entities of the preceding active year, None for the first year
            multi: Override for the multiple-affiliation test (per-paper mode);
                defaults to ``len(current) > 1``

        Raises:
            ContractViolationError: If current is empty

        """
        if not current:
            raise ContractViolationError("label_year requires a non-empty current entity set")

        is_multi = len(current) > 1 if multi is None else multi
        is_mobile = prior is not None and bool(current - prior)

        if is_mobile and is_multi:
            return MobilityLabel.MOBILE_AND_MULTI
        if is_mobile:
            return MobilityLabel.MOBILE
        if is_multi:
            return MobilityLabel.MULTI_AFFILIATION
        return MobilityLabel.NON_MOBILE

    def classify_author(
        self,
        history: AuthorHistory,
        level: str = AggregationLevel.COUNTRY,
        per_paper_multi: Optional[bool] = None,
    ) -> List[MobilityEvent]:
        """One event per active year, ascending, with return flags set.

        Gap years are skipped: the prior set is that of the most recent earlier
        active year.
        """
        level = self.validate_level(level)
        per_paper_multi = self.config.PER_PAPER_MULTI if per_paper_multi is None else per_paper_multi
        by_year = history.entities_by_year(level)
        multi_years = self._per_paper_multi_years(history, level) if per_paper_multi else None

        events = []
        prior = None
        for year, current in by_year.items():
            multi = (year in multi_years) if multi_years is not None else None
            events.append(
                MobilityEvent(
                    author_id=history.author_id,
                    year=year,
                    label=self.label_year(current, prior, multi=multi),
                    prior_entities=prior,
                    current_entities=current,
                    new_entities=current - prior if prior is not None else frozenset(),
                )
            )
            prior = current

        origin = events[0].current_entities if events else frozenset()
        return self.detect_return(events, origin)

    def _per_paper_multi_years(self, history: AuthorHistory, level: str) -> set:
        """Years in which a single paper lists more than one entity."""
        return {
            publication.year
            for publication in history.publications
            if len(entity_keys(publication.affiliations, level)) > 1
        }

    def detect_return(self, events: Sequence[MobilityEvent], origin: FrozenSet[EntityKey]) -> List[MobilityEvent]:
        """Flag events that come back to the origin after a fully-away year.

        An event is a return when an earlier year had no origin entity, this
        year has one, and the immediately preceding active year had none.
        """
        flagged = []
        been_away = False
        previous_away = False
        for index, event in enumerate(events):
            at_origin = bool(event.current_entities & origin)
            is_return = index > 0 and at_origin and been_away and previous_away
            flagged.append(event.with_return(is_return))
            previous_away = not at_origin
            been_away = been_away or previous_away
        return flagged

    @log_execution()
    def classify_corpus(
        self,
        histories: Mapping[str, AuthorHistory],
        level: str = AggregationLevel.COUNTRY,
        per_paper_multi: Optional[bool] = None,
    ) -> List[MobilityEvent]:
        """Classify every author; events ordered by author_id then year."""
        events = []
        for author_id in sorted(histories):
            events.extend(self.classify_author(histories[author_id], level, per_paper_multi))
        self.log_operation("Classified corpus", authors=len(histories), events=len(events), level=str(level))
        return events

    # ===========================================
    # PROFILES AND AGGREGATES
    # ===========================================

    def summarize_profiles(
        self, events: Iterable[MobilityEvent]
    ) -> Tuple[Dict[str, AuthorMobilityProfile], List[Dict[str, object]]]:
        """Per-author profiles plus the per-year label count table.

        Returns:
            (profiles by author_id, aggregate rows) where the aggregate rows hold
            one row per year with a count per label, followed by a total row

        """
        by_author: Dict[str, List[MobilityEvent]] = defaultdict(list)
        for event in events:
            by_author[event.author_id].append(event)

        profiles = {}
        for author_id in sorted(by_author):
            author_events = tuple(sorted(by_author[author_id], key=lambda event: event.year))
            profiles[author_id] = AuthorMobilityProfile(
                author_id=author_id,
                origin_entities=author_events[0].current_entities,
                ever_mobile=any(event.is_mobile for event in author_events),
                ever_multi=any(event.is_multi for event in author_events),
                returned=any(event.is_return for event in author_events),
                events=author_events,
            )

        return profiles, self.label_counts(profiles)

    def label_counts(self, profiles: Mapping[str, AuthorMobilityProfile]) -> List[Dict[str, object]]:
        """Event counts per label per year, plus a total row with author shares."""
        counts: Dict[int, Counter] = defaultdict(Counter)
        for profile in profiles.values():
            for event in profile.events:
                counts[event.year][event.label] += 1

        rows = []
        totals = Counter()
        for year in sorted(counts):
            row = {"year": str(year)}
            for label in MobilityLabel:
                row[label.value] = counts[year][label]
                totals[label] += counts[year][label]
            row["total"] = sum(counts[year].values())
            rows.append(row)

        total_row = {"year": "total"}
        for label in MobilityLabel:
            total_row[label.value] = totals[label]
        total_row["total"] = sum(totals.values())
        rows.append(total_row)
        return rows

    def author_shares(self, profiles: Mapping[str, AuthorMobilityProfile]) -> Dict[str, float]:
        """Shares of authors ever mobile or multi-affiliated, and of authors who returned."""
        authors = len(profiles)
        return {
            "authors": authors,
            "mobile_author_share": self.safe_divide(sum(p.ever_mobile for p in profiles.values()), authors),
            "multi_author_share": self.safe_divide(sum(p.ever_multi for p in profiles.values()), authors),
            "returning_author_share": self.safe_divide(sum(p.returned for p in profiles.values()), authors),
        }


mobility_service = MobilityService()
