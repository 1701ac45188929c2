"""Constants for django-mobility-indicators.

This module centralizes the enumerations, defaults, export formatting and
artifact names used throughout the package.
"""

from django.db import models
from django.utils.translation import gettext_lazy as _

# ===========================================
# ENUMERATIONS
# ===========================================


class AggregationLevel(models.TextChoices):
    """Level at which affiliations are aggregated into entities."""

    COUNTRY = "country", _("Country")
    CITY = "city", _("City")
    ORGANIZATION = "organization", _("Organization")

    @classmethod
    def parse(cls, value: str) -> "AggregationLevel":
        """Parse a level name, accepting the short ``org`` alias."""
        value = (value or "").strip().lower()
        if value == "org":
            value = cls.ORGANIZATION.value
        return cls(value)


class MobilityLabel(models.TextChoices):
    """Label of one author-year."""

    NON_MOBILE = "NON_MOBILE", _("No mobility")
    MOBILE = "MOBILE", _("Mobility")
    MULTI_AFFILIATION = "MULTI_AFFILIATION", _("Multiple affiliation")
    MOBILE_AND_MULTI = "MOBILE_AND_MULTI", _("Mobility and multiple affiliation")


MOBILE_LABELS = frozenset({MobilityLabel.MOBILE, MobilityLabel.MOBILE_AND_MULTI})
MULTI_LABELS = frozenset({MobilityLabel.MULTI_AFFILIATION, MobilityLabel.MOBILE_AND_MULTI})


class FlowDirection(models.TextChoices):
    """Direction of a capacity-normalized share."""

    SENDING = "sending", _("Sending")
    RECEIVING = "receiving", _("Receiving")


class CentralitySortKey(models.TextChoices):
    """Columns a centrality table can be ranked by."""

    BETWEENNESS = "betweenness", _("Betweenness")
    CLOSENESS = "closeness", _("Closeness")
    RESEARCHERS = "researchers", _("Researchers")


class ExportFormat(models.TextChoices):
    """Graph export formats."""

    CSV = "csv", _("Edge and node lists")
    GRAPHML = "graphml", _("GraphML")
    PAJEK = "pajek", _("Pajek .net")


class OccurrenceCounting(models.TextChoices):
    """How "most common affiliation" occurrences are counted."""

    PUBLICATIONS = "publications", _("Publications listing the entity")
    YEARS = "years", _("Active years listing the entity")


class PipelineStage(models.TextChoices):
    """Sub-commands of the ``mobility`` management command."""

    INGEST = "ingest", _("Ingest")
    CLASSIFY = "classify", _("Classify")
    NETWORK = "network", _("Network")
    CENTRALITY = "centrality", _("Centrality")
    FLOWS = "flows", _("Flows")
    IMPACT = "impact", _("Impact")
    SYNTH = "synth", _("Synthetic corpus")
    ALL = "all", _("Full pipeline")


# ===========================================
# DEFAULT VALUES
# ===========================================


class DefaultValues:
    """Default configuration values."""

    WINDOW_START = 2003
    WINDOW_END = 2015
    CORPUS_YEAR_MIN = 1900
    CORPUS_YEAR_MAX = 2100

    EDGE_THRESHOLD = 1
    TOP_K = 15
    CENTRALITY_WORKERS = 1
    CENTRALITY_CHUNK_SIZE = 64

    MIN_PUBLICATIONS = 2
    TOP10_FRACTION = 0.10

    OUTPUT_DIR = "mobility_output"
    LOG_LEVEL = "INFO"
    SLOW_OPERATION_THRESHOLD = 5.0  # seconds


class DecimalPlaces:
    """Fixed decimal places for numeric exports."""

    CLOSENESS = 6
    BETWEENNESS = 4
    INDICATORS = 4
    SHARES = 6
    FLOWS = 6
    DENSITY = 6


class ExitCodes:
    """Process exit statuses of the ``mobility`` command."""

    SUCCESS = 0
    USAGE_ERROR = 1
    DATA_ERROR = 2


# ===========================================
# SERIALIZATION CONVENTIONS
# ===========================================

ENTITY_SEPARATOR = "|"
SET_SEPARATOR = ";"
FORBIDDEN_NAME_CHARACTERS = (ENTITY_SEPARATOR, SET_SEPARATOR)
ALIAS_MAP_HEADER = ("raw", "canonical")


class ArtifactNames:
    """File names written to the output directory."""

    RECORDS = "records.jsonl"
    VALIDATION_REPORT = "validation_report.csv"
    BASELINES = "baselines.csv"
    AUTHOR_VARIABLES = "author_variables.csv"
    REJECTED_LINES = "rejected_lines.csv"

    EVENTS = "events.csv"
    PROFILES = "profiles.csv"
    LABEL_COUNTS = "label_counts.csv"

    FLOW_MATRIX = "flow_matrix.csv"
    SENDING_SHARES = "shares_sending.csv"
    RECEIVING_SHARES = "shares_receiving.csv"
    SHARES_HEATMAP = "shares_heatmap.csv"
    FLOW_PAIRS = "flow_pairs.csv"

    INDICATORS = "indicators_by_label.csv"
    AUTHOR_IMPACT = "author_impact.csv"

    SYNTH_CORPUS = "synthetic_corpus.jsonl"
    GROUND_TRUTH = "ground_truth.csv"
    GROUND_TRUTH_FLOWS = "ground_truth_flows.csv"
    VERIFICATION = "verification_report.csv"

    PROVENANCE_SUFFIX = ".provenance.json"

    @staticmethod
    def centrality_table(level: str, scope_tag: str = "", region: str = "") -> str:
        parts = [part for part in ("centrality", level, scope_tag, region) if part]
        return "_".join(parts) + ".csv"

    @staticmethod
    def network_prefix(level: str, scope_tag: str = "") -> str:
        """Base name shared by every export of one network."""
        suffix = f"_{scope_tag}" if scope_tag else ""
        return f"network_{level}{suffix}"


# ===========================================
# REGIONS
# ===========================================

# Country names as they appear in canonical affiliation data (uppercase).
REGIONS = {
    "europe": [
        "ALBANIA", "AUSTRIA", "BELARUS", "BELGIUM", "BOSNIA & HERZEGOVINA", "BULGARIA",
        "CROATIA", "CYPRUS", "CZECH REPUBLIC", "DENMARK", "ENGLAND", "ESTONIA", "FINLAND",
        "FRANCE", "GERMANY", "GREECE", "HUNGARY", "ICELAND", "IRELAND", "ITALY", "LATVIA",
        "LITHUANIA", "LUXEMBOURG", "MACEDONIA", "MALTA", "MOLDOVA", "MONTENEGRO",
        "NETHERLANDS", "NORTH IRELAND", "NORWAY", "POLAND", "PORTUGAL", "ROMANIA", "RUSSIA",
        "SCOTLAND", "SERBIA", "SLOVAKIA", "SLOVENIA", "SPAIN", "SWEDEN", "SWITZERLAND",
        "UKRAINE", "WALES",
    ],
    "africa": [
        "ALGERIA", "ANGOLA", "BENIN", "BOTSWANA", "BURKINA FASO", "BURUNDI", "CAMEROON",
        "CONGO", "COTE IVOIRE", "DEM REP CONGO", "EGYPT", "ETHIOPIA", "GABON", "GAMBIA",
        "GHANA", "GUINEA", "KENYA", "LIBYA", "MADAGASCAR", "MALAWI", "MALI", "MOROCCO",
        "MOZAMBIQUE", "NAMIBIA", "NIGER", "NIGERIA", "RWANDA", "SENEGAL", "SIERRA LEONE",
        "SOUTH AFRICA", "SUDAN", "TANZANIA", "TOGO", "TUNISIA", "UGANDA", "ZAMBIA", "ZIMBABWE",
    ],
}

# Two-letter codes accepted by ``--scope``. The United Kingdom appears as its
# constituent nations in address data.
COUNTRY_CODES = {
    "AL": ("ALBANIA",), "AT": ("AUSTRIA",), "BY": ("BELARUS",), "BE": ("BELGIUM",),
    "BA": ("BOSNIA & HERZEGOVINA",), "BG": ("BULGARIA",), "HR": ("CROATIA",), "CY": ("CYPRUS",),
    "CZ": ("CZECH REPUBLIC",), "DK": ("DENMARK",), "EE": ("ESTONIA",), "FI": ("FINLAND",),
    "FR": ("FRANCE",), "DE": ("GERMANY",), "GR": ("GREECE",), "HU": ("HUNGARY",), "IS": ("ICELAND",),
    "IE": ("IRELAND",), "IT": ("ITALY",), "LV": ("LATVIA",), "LT": ("LITHUANIA",), "LU": ("LUXEMBOURG",),
    "MK": ("MACEDONIA",), "MT": ("MALTA",), "MD": ("MOLDOVA",), "ME": ("MONTENEGRO",),
    "NL": ("NETHERLANDS",), "NO": ("NORWAY",), "PL": ("POLAND",), "PT": ("PORTUGAL",),
    "RO": ("ROMANIA",), "RU": ("RUSSIA",), "RS": ("SERBIA",), "SK": ("SLOVAKIA",), "SI": ("SLOVENIA",),
    "ES": ("SPAIN",), "SE": ("SWEDEN",), "CH": ("SWITZERLAND",), "UA": ("UKRAINE",),
    "GB": ("ENGLAND", "SCOTLAND", "WALES", "NORTH IRELAND"),
    "UK": ("ENGLAND", "SCOTLAND", "WALES", "NORTH IRELAND"),
    "DZ": ("ALGERIA",), "EG": ("EGYPT",), "ET": ("ETHIOPIA",), "GH": ("GHANA",), "KE": ("KENYA",),
    "MA": ("MOROCCO",), "NG": ("NIGERIA",), "SN": ("SENEGAL",), "ZA": ("SOUTH AFRICA",),
    "TZ": ("TANZANIA",), "TN": ("TUNISIA",), "UG": ("UGANDA",), "ZW": ("ZIMBABWE",),
    "US": ("USA",), "CA": ("CANADA",), "BR": ("BRAZIL",), "CN": ("PEOPLES R CHINA",), "JP": ("JAPAN",),
    "IN": ("INDIA",), "AU": ("AUSTRALIA",), "TR": ("TURKEY",), "IL": ("ISRAEL",),
}
