"""Impact service: field-normalized citation indicators by mobility class."""

from bisect import bisect_right
from collections import defaultdict
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from ..constants import DefaultValues, MobilityLabel
from ..domain import AuthorHistory, CitationIndicators, FieldYearBaseline, MobilityEvent, PublicationRecord
from ..exceptions import ContractViolationError, DataInconsistencyError, EmptyStratumError
from .base import BaseService, log_execution

BaselineMap = Mapping[Tuple[str, int], FieldYearBaseline]
PaperWithBaseline = Tuple[PublicationRecord, FieldYearBaseline]


class ImpactService(BaseService):
    """Service for NCS, MNCS and PPtop10% indicators."""

    def normalized_citation_score(self, paper: PublicationRecord, baseline: FieldYearBaseline) -> float:
        """Citations divided by the mean of the paper's field-year cell.

        Raises:
            ContractViolationError: If the baseline is for another cell
            DataInconsistencyError: If a cited paper sits in an uncited cell

        """
        if (paper.field, paper.year) != (baseline.field, baseline.year):
            raise ContractViolationError(
                f"Baseline ({baseline.field}, {baseline.year}) does not match paper {paper.pub_id} "
                f"({paper.field}, {paper.year})"
            )
        if baseline.total_citations == 0:
            if paper.citations > 0:
                raise DataInconsistencyError(
                    f"Paper {paper.pub_id} has {paper.citations} citations in a cell with mean 0",
                    details={"pub_id": paper.pub_id},
                )
            return 0.0
        return paper.citations * baseline.paper_count / baseline.total_citations

    def mncs(self, scores: Iterable[float], stratum: Optional[str] = None) -> float:
        """Arithmetic mean of normalized citation scores.

        Raises:
            EmptyStratumError: If there are no scores

        """
        scores = list(scores)
        if not scores:
            raise EmptyStratumError(stratum=stratum)
        return self.fsum(scores) / len(scores)

    def is_top10(self, paper: PublicationRecord, baseline: FieldYearBaseline) -> bool:
        """True when fewer than 10% of the cell is cited strictly more; ties are inclusive."""
        return baseline.fraction_greater(paper.citations) < DefaultValues.TOP10_FRACTION

    def indicators(
        self, papers: Sequence[Tuple[PublicationRecord, FieldYearBaseline]], stratum: Optional[str] = None
    ) -> CitationIndicators:
        """All citation indicators over a non-empty set of papers."""
        if not papers:
            raise EmptyStratumError(stratum=stratum)
        count = len(papers)
        total = sum(paper.citations for paper, _ in papers)
        return CitationIndicators(
            paper_count=count,
            total_citations=total,
            mean_citations=total / count,
            mncs=self.mncs((self.normalized_citation_score(paper, baseline) for paper, baseline in papers), stratum),
            pp_top10=sum(self.is_top10(paper, baseline) for paper, baseline in papers) / count,
        )

    def _with_baseline(
        self, records: Iterable[PublicationRecord], baselines: BaselineMap
    ) -> Dict[str, Tuple[PublicationRecord, FieldYearBaseline]]:
        papers = {}
        for record in records:
            baseline = baselines.get((record.field, record.year))
            if baseline is not None:
                papers[record.pub_id] = (record, baseline)
        return papers

    def corpus_indicators(self, records: Iterable[PublicationRecord], baselines: BaselineMap) -> CitationIndicators:
        """Indicators over every paper with a baseline cell."""
        papers = self._with_baseline(records, baselines)
        return self.indicators([papers[pub_id] for pub_id in sorted(papers)], stratum="corpus")

    def _stratify(
        self,
        records: Iterable[PublicationRecord],
        events: Iterable[MobilityEvent],
        baselines: BaselineMap,
    ) -> Tuple[Dict[MobilityLabel, List[PaperWithBaseline]], List[PaperWithBaseline]]:
        """Author-publication pairs of classified authors, grouped by label.

        A pair takes the label of its author's latest classified year at or
        before the paper's year, so papers from years without address data
        carry the preceding label. Pairs earlier than the author's first
        classified year are returned separately as unclassified.
        """
        labelled: Dict[str, Dict[int, MobilityLabel]] = defaultdict(dict)
        for event in events:
            labelled[event.author_id][event.year] = MobilityLabel(event.label)
        years = {author_id: sorted(by_year) for author_id, by_year in labelled.items()}

        strata: Dict[MobilityLabel, List[PaperWithBaseline]] = defaultdict(list)
        unclassified: List[PaperWithBaseline] = []
        papers = self._with_baseline(records, baselines)
        for pub_id in sorted(papers):
            record, baseline = papers[pub_id]
            for author_id in sorted(set(record.author_ids)):
                if author_id not in years:
                    continue
                position = bisect_right(years[author_id], record.year)
                if position == 0:
                    unclassified.append((record, baseline))
                else:
                    label = labelled[author_id][years[author_id][position - 1]]
                    strata[label].append((record, baseline))
        return strata, unclassified

    @log_execution()
    def indicators_by_mobility_class(
        self,
        records: Iterable[PublicationRecord],
        events: Iterable[MobilityEvent],
        baselines: BaselineMap,
    ) -> Dict[MobilityLabel, CitationIndicators]:
        """Indicators per label over author-publication pairs of classified authors.

        Pairs without a baseline cell are left out; empty strata are absent
        from the result. See ``unclassified_indicators`` for pairs that
        precede an author's first classified year.
        """
        strata, unclassified = self._stratify(records, events, baselines)
        result = {}
        for label in MobilityLabel:
            if strata[label]:
                result[label] = self.indicators(strata[label], stratum=label.value)
        if unclassified:
            self.logger.warning(f"{len(unclassified)} author-publication pairs precede their author's first classified year")
        self.log_operation("Computed indicators by label", strata=len(result), unclassified=len(unclassified))
        return result

    def unclassified_indicators(
        self,
        records: Iterable[PublicationRecord],
        events: Iterable[MobilityEvent],
        baselines: BaselineMap,
    ) -> Optional[CitationIndicators]:
        """Indicators over pairs preceding their author's first classified year; None when there are none."""
        _, unclassified = self._stratify(records, events, baselines)
        return self.indicators(unclassified, stratum="unclassified") if unclassified else None

    def author_indicators(
        self,
        records: Iterable[PublicationRecord],
        histories: Mapping[str, AuthorHistory],
        baselines: BaselineMap,
    ) -> Dict[str, CitationIndicators]:
        """Indicators of every listed author over their papers with a baseline."""
        papers = self._with_baseline(records, baselines)
        result = {}
        for author_id in sorted(histories):
            own = [
                papers[publication.pub_id]
                for publication in histories[author_id].publications
                if publication.pub_id in papers
            ]
            if own:
                result[author_id] = self.indicators(own, stratum=author_id)
        return result


impact_service = ImpactService()
