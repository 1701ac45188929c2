"""DRF serializers for publication records with validation."""

from typing import Any, Mapping, Optional, Tuple

from rest_framework import serializers
from rest_framework.exceptions import ErrorDetail

from .conf import get_config
from .constants import FORBIDDEN_NAME_CHARACTERS
from .domain import Affiliation, AuthorEntry, PublicationRecord
from .exceptions import CorpusError, RecordParseError, RecordValidationError, SchemaError

# DRF error codes grouped by the corpus error they map to.
SCHEMA_ERROR_CODES = frozenset({"required", "null", "blank", "empty"})
PARSE_ERROR_CODES = frozenset({"invalid", "not_a_list", "not_a_dict", "max_string_length", "parse_error"})


def _check_name(value: str) -> str:
    for character in FORBIDDEN_NAME_CHARACTERS:
        if character in value:
            raise serializers.ValidationError(
                f"Name {value!r} contains reserved character {character!r}", code="reserved_character"
            )
    return value


class AffiliationSerializer(serializers.Serializer):
    """One ``{org, city, country}`` address."""

    org = serializers.CharField(source="organization", allow_blank=True, default="")
    city = serializers.CharField(allow_blank=True, default="")
    country = serializers.CharField()

    def validate_org(self, value):
        return _check_name(value)

    def validate_city(self, value):
        return _check_name(value)

    def validate_country(self, value):
        """Normalize country names to the uppercase canonical form."""
        return _check_name(value.upper())


class AuthorEntrySerializer(serializers.Serializer):
    author_id = serializers.CharField()
    affiliations = AffiliationSerializer(many=True, default=list)


class PublicationRecordSerializer(serializers.Serializer):
    """Serializer for one corpus line."""

    pub_id = serializers.CharField()
    year = serializers.IntegerField()
    field = serializers.CharField(allow_blank=True, default="")
    citations = serializers.IntegerField(min_value=0, default=0)
    authors = AuthorEntrySerializer(source="author_entries", many=True, allow_empty=False)

    def validate_year(self, value):
        """Validate the year lies in the configured corpus range."""
        config = get_config()
        if not config.CORPUS_YEAR_MIN <= value <= config.CORPUS_YEAR_MAX:
            raise serializers.ValidationError(
                f"Year {value} outside corpus range {config.CORPUS_YEAR_MIN}-{config.CORPUS_YEAR_MAX}",
                code="out_of_range",
            )
        return value

    def validate_authors(self, value):
        seen = set()
        for entry in value:
            if entry["author_id"] in seen:
                raise serializers.ValidationError(
                    f"Author {entry['author_id']} listed twice", code="duplicate_author"
                )
            seen.add(entry["author_id"])
        return value

    def create(self, validated_data) -> PublicationRecord:
        return PublicationRecord(
            pub_id=validated_data["pub_id"],
            year=validated_data["year"],
            field=validated_data["field"],
            citations=validated_data["citations"],
            author_entries=tuple(
                AuthorEntry(
                    author_id=entry["author_id"],
                    affiliations=tuple(Affiliation(**affiliation) for affiliation in entry["affiliations"]),
                )
                for entry in validated_data["author_entries"]
            ),
        )


def first_error(errors: Any, path: str = "") -> Tuple[str, Optional[ErrorDetail]]:
    """Walk nested serializer errors and return ``(field path, detail)`` of the first one."""
    if isinstance(errors, ErrorDetail):
        return path, errors
    if isinstance(errors, dict):
        for name, nested in errors.items():
            if name == "non_field_errors":
                name = ""
            child = f"{path}.{name}" if path and name else (name or path)
            found_path, detail = first_error(nested, child)
            if detail is not None:
                return found_path, detail
    if isinstance(errors, list):
        for index, nested in enumerate(errors):
            child = path if isinstance(nested, ErrorDetail) else f"{path}[{index}]"
            found_path, detail = first_error(nested, child)
            if detail is not None:
                return found_path, detail
    return path, None


def error_from_serializer(errors: Any, line_number: Optional[int] = None) -> CorpusError:
    """Convert serializer errors into the matching corpus exception."""
    path, detail = first_error(errors)
    field = path or None
    code = getattr(detail, "code", "invalid")
    message = f"{field}: {detail}" if field else str(detail)

    if code in SCHEMA_ERROR_CODES:
        return SchemaError(message, line_number=line_number, field=field)
    if code in PARSE_ERROR_CODES:
        return RecordParseError(message, line_number=line_number, field=field)
    return RecordValidationError(message, line_number=line_number, field=field)


def validated_record(data: Any, line_number: Optional[int] = None) -> PublicationRecord:
    """Validate one decoded line and build the record.

    Raises:
        CorpusError: subclass matching the first failing field

    """
    if not isinstance(data, dict):
        raise RecordParseError("record must be a JSON object", line_number=line_number)
    serializer = PublicationRecordSerializer(data=data)
    if not serializer.is_valid():
        raise error_from_serializer(serializer.errors, line_number)
    return serializer.save()


def record_representation(record: PublicationRecord) -> dict:
    """Primitive representation of a record in input-format field order."""
    return PublicationRecordSerializer(instance=record).data



def record_from_representation(data: Mapping[str, Any]) -> PublicationRecord:
    """Rebuild a record from its primitive representation without field validation.

    Only for lines this package wrote itself, such as the normalized records
    artifact; untrusted input goes through ``validated_record``.
    """
    return PublicationRecord(
        pub_id=data["pub_id"],
        year=data["year"],
        field=data["field"],
        citations=data["citations"],
        author_entries=tuple(
            AuthorEntry(
                author_id=entry["author_id"],
                affiliations=tuple(
                    Affiliation(organization=item["org"], city=item["city"], country=item["country"])
                    for item in entry["affiliations"]
                ),
            )
            for entry in data["authors"]
        ),
    )
