"""Corpus service: parse, validate and normalize publication records.

Turns line-delimited publication records into per-author histories, applies
the eligibility rule and computes the field-year citation baselines every
normalized indicator depends on.
"""

import io
from collections import defaultdict
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd
from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from ..constants import ALIAS_MAP_HEADER, FORBIDDEN_NAME_CHARACTERS, SET_SEPARATOR, AggregationLevel, DefaultValues
from ..domain import (
    Affiliation,
    AuthorHistory,
    AuthorPublication,
    FieldYearBaseline,
    PublicationRecord,
    join_entities,
)
from ..exceptions import (
    ConfigurationError,
    CorpusError,
    DataInconsistencyError,
    RecordParseError,
    RecordValidationError,
)
from ..serializers import record_from_representation, record_representation, validated_record
from .base import BaseService, log_execution

PathLike = Union[str, Path]


@dataclass
class ValidationReport:
    """Ingestion statistics; rejected lines are kept with their diagnostics."""

    lines_read: int = 0
    parsed: int = 0
    rejected: int = 0
    duplicate_pub_ids: int = 0
    author_entries: int = 0
    authors_without_affiliation: int = 0
    affiliations: int = 0
    incomplete_affiliations: int = 0
    rejections: List[Tuple[int, str, str]] = field(default_factory=list)

    def count(self, record: PublicationRecord) -> None:
        self.parsed += 1
        for entry in record.author_entries:
            self.author_entries += 1
            if not entry.affiliations:
                self.authors_without_affiliation += 1
            for affiliation in entry.affiliations:
                self.affiliations += 1
                if not affiliation.is_complete:
                    self.incomplete_affiliations += 1

    def reject(self, error: CorpusError) -> None:
        self.rejected += 1
        self.rejections.append((error.line_number or 0, error.code, error.message))

    def summary_rows(self) -> List[Tuple[str, int]]:
        return [
            ("lines_read", self.lines_read),
            ("parsed", self.parsed),
            ("rejected", self.rejected),
            ("duplicate_pub_ids", self.duplicate_pub_ids),
            ("author_entries", self.author_entries),
            ("authors_without_affiliation", self.authors_without_affiliation),
            ("affiliations", self.affiliations),
            ("incomplete_affiliations", self.incomplete_affiliations),
        ]


class CorpusService(BaseService):
    """Service for corpus ingestion and per-author aggregation."""

    # ===========================================
    # RECORD PARSING
    # ===========================================

    def parse_publication_line(self, line: Union[str, bytes], line_number: Optional[int] = None) -> PublicationRecord:
        """Parse one input line into a validated record.

        Args:
            line: One JSON object in the corpus input format
            line_number: 1-based line number used in diagnostics

        Returns:
            PublicationRecord with normalized country names

        Raises:
            RecordParseError: Malformed JSON or a value of the wrong type
            SchemaError: A required field is missing
            RecordValidationError: A value violates a record invariant

        """
        raw = line.encode("utf-8") if isinstance(line, str) else line
        try:
            data = JSONParser().parse(io.BytesIO(raw))
        except ParseError as e:
            raise RecordParseError(str(e.detail), line_number=line_number) from e
        return validated_record(data, line_number)

    def serialize_record(self, record: PublicationRecord) -> str:
        """Serialize a record back to one line of the input format."""
        return JSONRenderer().render(record_representation(record)).decode("utf-8")

    # ===========================================
    # ALIAS MAPS
    # ===========================================

    def load_alias_map(self, path: PathLike) -> Dict[str, str]:
        """Load a ``raw,canonical`` table and resolve alias chains.

        Raises:
            ConfigurationError: Bad header, conflicting entries or a cyclic chain

        """
        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
        except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
            raise ConfigurationError(f"Cannot read alias map {path}: {e}", setting="MOBILITY_ALIAS_MAP") from e

        if tuple(column.strip().lower() for column in frame.columns) != ALIAS_MAP_HEADER:
            raise ConfigurationError(
                f"Alias map {path} must have header {','.join(ALIAS_MAP_HEADER)}", setting="MOBILITY_ALIAS_MAP"
            )

        direct: Dict[str, str] = {}
        for raw, canonical in zip(frame.iloc[:, 0], frame.iloc[:, 1]):
            raw, canonical = raw.strip(), canonical.strip()
            if not raw or raw == canonical:
                continue
            if any(character in canonical for character in FORBIDDEN_NAME_CHARACTERS):
                raise ConfigurationError(
                    f"Canonical name {canonical!r} contains a reserved character", setting="MOBILITY_ALIAS_MAP"
                )
            if direct.get(raw, canonical) != canonical:
                raise ConfigurationError(
                    f"Alias {raw!r} maps to both {direct[raw]!r} and {canonical!r}", setting="MOBILITY_ALIAS_MAP"
                )
            direct[raw] = canonical

        aliases = self.resolve_alias_chains(direct)
        self.log_operation("Loaded alias map", path=str(path), entries=len(aliases))
        return aliases

    def resolve_alias_chains(self, direct: Mapping[str, str]) -> Dict[str, str]:
        """Map every raw name to the end of its chain; cycles are configuration errors."""
        resolved = {}
        for raw in sorted(direct):
            seen = [raw]
            name = direct[raw]
            while name in direct:
                if name in seen:
                    chain = " -> ".join(seen + [name])
                    raise ConfigurationError(f"Cyclic alias chain: {chain}", setting="MOBILITY_ALIAS_MAP")
                seen.append(name)
                name = direct[name]
            resolved[raw] = name
        return resolved

    def apply_alias_map(self, record: PublicationRecord, aliases: Mapping[str, str]) -> PublicationRecord:
        """Replace organization and city names by their canonical forms."""
        if not aliases:
            return record

        def canonical(affiliation: Affiliation) -> Affiliation:
            return replace(
                affiliation,
                organization=aliases.get(affiliation.organization, affiliation.organization),
                city=aliases.get(affiliation.city, affiliation.city),
            )

        entries = tuple(
            replace(entry, affiliations=tuple(dict.fromkeys(canonical(affiliation) for affiliation in entry.affiliations)))
            for entry in record.author_entries
        )
        return replace(record, author_entries=entries)

    # ===========================================
    # CORPUS READING
    # ===========================================

    @log_execution()
    def read_corpus(
        self,
        paths: Sequence[PathLike],
        aliases: Optional[Mapping[str, str]] = None,
        strict: Optional[bool] = None,
    ) -> Tuple[List[PublicationRecord], ValidationReport]:
        """Read and validate every line of the input files.

        Bad lines are rejected into the report unless ``strict`` is set, in
        which case the first bad line is raised. Duplicate pub_ids keep the
        first occurrence. Records are returned sorted by pub_id.
        """
        strict = self.config.STRICT_INGEST if strict is None else strict
        report = ValidationReport()
        records: Dict[str, PublicationRecord] = {}

        for path in paths:
            with open(path, "rb") as handle:
                for line_number, line in enumerate(handle, start=1):
                    if not line.strip():
                        continue
                    report.lines_read += 1
                    try:
                        record = self.parse_publication_line(line, line_number)
                        if record.pub_id in records:
                            report.duplicate_pub_ids += 1
                            raise RecordValidationError(
                                f"duplicate pub_id {record.pub_id}", line_number=line_number, field="pub_id"
                            )
                    except CorpusError as e:
                        if strict:
                            raise
                        report.reject(e)
                        self.logger.warning(f"Rejected {path}:{e.message}", extra={"_custom_fields": e.details})
                        continue

                    records[record.pub_id] = self.apply_alias_map(record, aliases or {})
                    report.count(record)

        self.log_operation("Corpus read", parsed=report.parsed, rejected=report.rejected)
        return [records[pub_id] for pub_id in sorted(records)], report

    @log_execution()
    def load_normalized_records(self, path: PathLike) -> List[PublicationRecord]:
        """Load a records artifact written by ``serialize_record``.

        Lines were validated and alias-resolved at ingest, so they are rebuilt
        without running the serializers again.

        Raises:
            DataInconsistencyError: A line is not a serialized record

        """
        records = []
        with open(path, "rb") as handle:
            for line_number, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(record_from_representation(JSONParser().parse(io.BytesIO(line))))
                except (ParseError, KeyError, TypeError) as e:
                    raise DataInconsistencyError(
                        f"{path}:{line_number} is not a normalized record; rerun ingest",
                        details={"path": str(path), "line_number": line_number},
                    ) from e
        records.sort(key=lambda record: record.pub_id)
        self.log_operation("Normalized records loaded", records=len(records))
        return records

    # ===========================================
    # AUTHOR HISTORIES
    # ===========================================

    def build_author_histories(self, records: Iterable[PublicationRecord]) -> Dict[str, AuthorHistory]:
        """Aggregate records into one timeline per author.

        The affiliation set of a year is the union over the author's
        publications of that year; publications without address data count
        towards pub_count only.
        """
        publications: Dict[str, Dict[str, AuthorPublication]] = defaultdict(dict)
        for record in records:
            for entry in record.author_entries:
                publications[entry.author_id][record.pub_id] = AuthorPublication(
                    year=record.year, pub_id=record.pub_id, affiliations=frozenset(entry.affiliations)
                )

        histories = {}
        for author_id in sorted(publications):
            author_publications = tuple(sorted(publications[author_id].values()))
            timeline: Dict[int, set] = defaultdict(set)
            for publication in author_publications:
                if publication.affiliations:
                    timeline[publication.year].update(publication.affiliations)
            histories[author_id] = AuthorHistory(
                author_id=author_id,
                timeline={year: frozenset(timeline[year]) for year in sorted(timeline)},
                pub_count=len(author_publications),
                publications=author_publications,
                publication_years=tuple(publication.year for publication in author_publications),
            )
        return histories

    def filter_eligible_researchers(
        self,
        histories: Mapping[str, AuthorHistory],
        window_start: Optional[int] = None,
        window_end: Optional[int] = None,
        min_publications: int = DefaultValues.MIN_PUBLICATIONS,
    ) -> Dict[str, AuthorHistory]:
        """Keep authors with enough publications whose first year lies in the window.

        Raises:
            ConfigurationError: If window_start is after window_end

        """
        window_start = self.config.WINDOW_START if window_start is None else window_start
        window_end = self.config.WINDOW_END if window_end is None else window_end
        if window_start > window_end:
            raise ConfigurationError(
                f"Window start {window_start} is after window end {window_end}", setting="MOBILITY_WINDOW_START"
            )

        return {
            author_id: history
            for author_id, history in histories.items()
            if history.pub_count >= min_publications
            and history.first_year is not None
            and window_start <= history.first_year <= window_end
        }

    # ===========================================
    # CITATION BASELINES
    # ===========================================

    def compute_field_year_baselines(
        self, records: Iterable[PublicationRecord]
    ) -> Dict[Tuple[str, int], FieldYearBaseline]:
        """One baseline per (field, year) cell over every corpus paper in it."""
        cells: Dict[Tuple[str, int], List[int]] = defaultdict(list)
        for record in records:
            if record.field:
                cells[(record.field, record.year)].append(record.citations)

        return {
            key: FieldYearBaseline(
                field=key[0],
                year=key[1],
                paper_count=len(citations),
                total_citations=sum(citations),
                citation_distribution=tuple(sorted(citations)),
            )
            for key, citations in sorted(cells.items())
        }

    # ===========================================
    # AUTHOR VARIABLES
    # ===========================================

    def author_variables(
        self, histories: Mapping[str, AuthorHistory], level: str = AggregationLevel.COUNTRY
    ) -> List[Dict[str, object]]:
        """Per-author descriptive variables, one row per author in id order."""
        rows = []
        for author_id in sorted(histories):
            history = histories[author_id]
            years_by_entity = defaultdict(set)
            for year, entities in history.entities_by_year(level).items():
                for entity in entities:
                    years_by_entity[entity].add(year)
            rows.append(
                {
                    "author_id": author_id,
                    "pub_count": history.pub_count,
                    "first_publication_year": history.first_publication_year,
                    "last_publication_year": history.last_publication_year,
                    "origin_entities": join_entities(history.origin_entities(level)),
                    "entities": join_entities(history.all_entities(level)),
                    "entity_years": SET_SEPARATOR.join(
                        f"{entity}:{'/'.join(str(year) for year in sorted(years))}"
                        for entity, years in sorted(years_by_entity.items())
                    ),
                }
            )
        return rows


corpus_service = CorpusService()
