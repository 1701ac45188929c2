"""Synthetic corpus service: seeded worlds with planted mobility patterns.

Labels are drawn first and each year's country set is then built to realize
the drawn label, so the recorded ground truth is exactly what the
classification rules must recover. Every author has an independent numpy
``PCG64`` stream seeded with ``[seed, stream, author_index]``, which keeps corpora
identical across platforms and lets authors be generated in any order.
"""

import json
import logging
from collections import Counter
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..constants import MOBILE_LABELS, MobilityLabel
from ..domain import Affiliation, AuthorEntry, MobilityEvent, PublicationRecord
from ..exceptions import ConfigurationError
from .base import BaseService, log_execution

# Keyed by the drawn (mobile, multi) flags of a year.
PLANTED_LABELS = {
    (False, False): MobilityLabel.NON_MOBILE,
    (True, False): MobilityLabel.MOBILE,
    (False, True): MobilityLabel.MULTI_AFFILIATION,
    (True, True): MobilityLabel.MOBILE_AND_MULTI,
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of one synthetic world."""

    seed: int = 42
    n_authors: int = 1000
    year_start: int = 2003
    year_end: int = 2012
    countries: Tuple[str, ...] = ("NETHERLANDS", "SPAIN", "UNITED STATES", "FRANCE", "GERMANY")
    capacity_weights: Tuple[float, ...] = (1.0, 1.0, 1.0, 1.0, 1.0)
    mobility_rate: float = 0.2
    multi_rate: float = 0.1
    return_rate: float = 0.3
    # Probability that an author publishes in each year after the first.
    active_rate: float = 0.8
    papers_per_year: Tuple[int, int] = (1, 2)
    blocks: Tuple[Tuple[str, ...], ...] = ()
    bridge: Optional[str] = None
    # Mobility-rate multipliers keyed by the country an author moves from.
    over_sending: Tuple[Tuple[str, float], ...] = ()
    field_means: Tuple[Tuple[str, float], ...] = (("PHYSICS", 8.0), ("BIOLOGY", 12.0))
    mobile_citation_multiplier: float = 1.0
    institutions_per_country: int = 2
    noise_authors: int = 0

    @classmethod
    def from_dict(cls, data: Mapping) -> "ScenarioConfig":
        """Build a scenario from decoded JSON, converting lists to tuples."""
        known = {name for name in cls.__dataclass_fields__}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(f"Unknown scenario keys: {', '.join(unknown)}", setting="scenario")

        values = dict(data)
        for name in ("countries", "capacity_weights", "papers_per_year"):
            if name in values:
                values[name] = tuple(values[name])
        if "blocks" in values:
            values["blocks"] = tuple(tuple(block) for block in values["blocks"])
        for name in ("over_sending", "field_means"):
            if name in values:
                items = values[name].items() if isinstance(values[name], dict) else values[name]
                values[name] = tuple((key, float(value)) for key, value in items)
        return cls(**values)

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ScenarioConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as e:
            raise ConfigurationError(f"Cannot read scenario {path}: {e}", setting="scenario") from e
        return cls.from_dict(data)

    def to_dict(self) -> Dict:
        return asdict(self)


SCENARIO_PRESETS: Dict[str, ScenarioConfig] = {
    "default": ScenarioConfig(),
    # Equal capacities and uniform destinations: every normalized share tends to 1.
    "null": ScenarioConfig(
        n_authors=5000,
        countries=("A", "B", "C", "D", "E"),
        capacity_weights=(1.0, 1.0, 1.0, 1.0, 1.0),
        mobility_rate=0.7,
        multi_rate=0.0,
        return_rate=0.0,
    ),
    "bridge": ScenarioConfig(
        countries=("WEST1", "WEST2", "WEST3", "HUB", "EAST1", "EAST2", "EAST3"),
        capacity_weights=(1.0, 1.0, 1.0, 1.5, 1.0, 1.0, 1.0),
        mobility_rate=0.3,
        multi_rate=0.15,
        blocks=(("WEST1", "WEST2", "WEST3"), ("EAST1", "EAST2", "EAST3")),
        bridge="HUB",
    ),
    "over_sending": ScenarioConfig(
        n_authors=3000,
        countries=("POLAND", "ROMANIA", "FRANCE", "GERMANY", "SPAIN"),
        capacity_weights=(1.0, 1.0, 1.0, 1.0, 1.0),
        mobility_rate=0.1,
        multi_rate=0.0,
        over_sending=(("POLAND", 4.0), ("ROMANIA", 4.0)),
    ),
    "impact": ScenarioConfig(mobility_rate=0.3, multi_rate=0.2, mobile_citation_multiplier=2.0),
}


@dataclass
class GroundTruth:
    """Planted origins, events and flows of a synthetic corpus."""

    origins: Dict[str, FrozenSet[str]] = field(default_factory=dict)
    events: Dict[str, Tuple[MobilityEvent, ...]] = field(default_factory=dict)
    flows: Dict[Tuple[str, str], float] = field(default_factory=dict)

    def all_events(self) -> List[MobilityEvent]:
        return [event for author_id in sorted(self.events) for event in self.events[author_id]]

    def label_counts(self) -> Counter:
        return Counter(event.label for event in self.all_events())


@dataclass
class VerificationReport:
    """Mismatches between pipeline output and ground truth."""

    compared_events: int = 0
    compared_flows: int = 0
    mismatches: List[Dict[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def add(self, kind: str, key: str, expected, observed) -> None:
        self.mismatches.append({"kind": kind, "key": key, "expected": str(expected), "observed": str(observed)})


class SynthService(BaseService):
    """Service for deterministic synthetic corpora and their verification."""

    FLOW_TOLERANCE = 1e-9

    # ===========================================
    # CONFIGURATION CHECKS
    # ===========================================

    def validate_scenario(self, config: ScenarioConfig) -> ScenarioConfig:
        """Reject impossible scenarios.

        Raises:
            ConfigurationError: If the scenario cannot be generated

        """
        self.validate_positive_int(config.n_authors, "n_authors")
        self.validate_positive_int(config.institutions_per_country, "institutions_per_country")
        for name in ("mobility_rate", "multi_rate", "return_rate", "active_rate"):
            self.validate_probability(getattr(config, name), name)

        if not config.countries or len(set(config.countries)) != len(config.countries):
            raise ConfigurationError("Scenario countries must be a non-empty list of distinct names", setting="countries")
        if len(config.capacity_weights) != len(config.countries) or any(w <= 0 for w in config.capacity_weights):
            raise ConfigurationError("Each country needs a positive capacity weight", setting="capacity_weights")
        if config.year_end <= config.year_start:
            raise ConfigurationError("Scenario needs at least two years", setting="year_end")
        low, high = config.papers_per_year
        if low < 1 or high < low:
            raise ConfigurationError("papers_per_year must be (min >= 1, max >= min)", setting="papers_per_year")
        if not config.field_means or any(mean < 0 for _, mean in config.field_means):
            raise ConfigurationError("field_means needs non-negative means", setting="field_means")
        if config.mobile_citation_multiplier < 0 or config.noise_authors < 0:
            raise ConfigurationError("Multipliers and counts must be non-negative", setting="scenario")

        known = set(config.countries)
        for country, multiplier in config.over_sending:
            if country not in known or multiplier < 0:
                raise ConfigurationError(f"Bad over-sending entry for {country}", setting="over_sending")
        if config.blocks:
            listed = [country for block in config.blocks for country in block]
            if config.bridge is None or config.bridge not in known or config.bridge in listed:
                raise ConfigurationError("Block worlds need a bridge country outside every block", setting="bridge")
            if set(listed) | {config.bridge} != known or len(listed) != len(set(listed)):
                raise ConfigurationError("Blocks must partition the non-bridge countries", setting="blocks")

        if config.mobility_rate > 0 or config.multi_rate > 0:
            smallest = min((len(block) + 1 for block in config.blocks), default=len(config.countries))
            if smallest < 2:
                raise ConfigurationError(
                    "Mobility and multiple affiliation need at least two reachable countries", setting="countries"
                )
        return config

    # ===========================================
    # GENERATION
    # ===========================================

    @log_execution()
    def generate_corpus(self, config: ScenarioConfig) -> Tuple[List[PublicationRecord], GroundTruth]:
        """Generate records and ground truth; identical for identical configs."""
        self.validate_scenario(config)
        truth = GroundTruth()
        flows: Dict[Tuple[str, str], float] = Counter()
        records: List[PublicationRecord] = []

        for index in range(config.n_authors):
            author_records, origin, events = self._generate_author(config, index)
            author_id = self.author_id(index)
            records.extend(author_records)
            truth.origins[author_id] = origin
            truth.events[author_id] = events
            for event in events:
                if event.is_mobile:
                    weight = 1.0 / (len(event.prior_entities) * len(event.new_entities))
                    for sender in sorted(event.prior_entities):
                        for receiver in sorted(event.new_entities):
                            flows[(sender, receiver)] += weight

        for index in range(config.noise_authors):
            records.append(self._noise_record(config, index))

        truth.flows = dict(sorted(flows.items()))
        records.sort(key=lambda record: record.pub_id)
        self.log_operation(
            "Generated synthetic corpus", seed=config.seed, authors=config.n_authors, records=len(records)
        )
        return records, truth

    def author_id(self, index: int) -> str:
        return f"A{index:06d}"

    def _rng(self, config: ScenarioConfig, index: int, stream: int = 0) -> np.random.Generator:
        return np.random.default_rng([config.seed, stream, index])

    def _pick(self, rng: np.random.Generator, candidates: Sequence[str], weights: Mapping[str, float]) -> str:
        """Weighted choice over sorted candidates from one uniform draw."""
        ordered = sorted(candidates)
        cumulative = np.cumsum([weights[candidate] for candidate in ordered])
        position = int(np.searchsorted(cumulative, rng.random() * cumulative[-1], side="right"))
        return ordered[min(position, len(ordered) - 1)]

    def _reachable(self, config: ScenarioConfig, origin: str, rng: np.random.Generator) -> Tuple[str, ...]:
        """Countries an author may ever be affiliated with."""
        if not config.blocks:
            return config.countries
        for block in config.blocks:
            if origin in block:
                return tuple(block) + (config.bridge,)
        block = config.blocks[int(rng.integers(len(config.blocks)))]
        return tuple(block) + (config.bridge,)

    def _active_years(self, config: ScenarioConfig, rng: np.random.Generator) -> List[int]:
        first = int(rng.integers(config.year_start, config.year_end))
        years = [first] + [year for year in range(first + 1, config.year_end + 1) if rng.random() < config.active_rate]
        if len(years) == 1:
            years.append(first + 1)
        return years

    def _generate_author(self, config: ScenarioConfig, index: int):
        rng = self._rng(config, index)
        weights = dict(zip(config.countries, config.capacity_weights))
        over_sending = dict(config.over_sending)
        author_id = self.author_id(index)

        home = self._pick(rng, config.countries, weights)
        reachable = self._reachable(config, home, rng)
        years = self._active_years(config, rng)
        institutions = {
            country: int(rng.integers(1, config.institutions_per_country + 1)) for country in sorted(reachable)
        }

        events = []
        prior: Optional[FrozenSet[str]] = None
        origin: FrozenSet[str] = frozenset()
        been_away = previous_away = False
        for position, year in enumerate(years):
            mobile_draw = rng.random()
            multi_draw = rng.random() < config.multi_rate
            return_draw = rng.random() < config.return_rate

            if prior is None:
                others = [country for country in reachable if country != home]
                multi = multi_draw and bool(others)
                current = frozenset({home, self._pick(rng, others, weights)}) if multi else frozenset({home})
                label = PLANTED_LABELS[(False, multi)]
                origin = current
            else:
                candidates = [country for country in reachable if country not in prior]
                rate = min(1.0, config.mobility_rate * over_sending.get(sorted(prior)[0], 1.0))
                mobile = bool(candidates) and mobile_draw < rate
                multi = multi_draw and (mobile or len(prior) > 1)
                label = PLANTED_LABELS[(mobile, multi)]
                current = self._realize_label(rng, label, prior, origin, candidates, weights, return_draw)

            at_origin = bool(current & origin)
            events.append(
                MobilityEvent(
                    author_id=author_id,
                    year=year,
                    label=label,
                    prior_entities=prior,
                    current_entities=current,
                    new_entities=current - prior if prior is not None else frozenset(),
                    is_return=position > 0 and at_origin and been_away and previous_away,
                )
            )
            previous_away = not at_origin
            been_away = been_away or previous_away
            prior = current

        records = []
        field_means = dict(config.field_means)
        fields = sorted(field_means)
        low, high = config.papers_per_year
        serial = 0
        for event in events:
            affiliations = tuple(
                Affiliation(
                    organization=f"UNIVERSITY OF {country} {institutions[country]}",
                    city=f"{country} CITY {institutions[country]}",
                    country=country,
                )
                for country in sorted(event.current_entities)
            )
            multiplier = config.mobile_citation_multiplier if event.label in MOBILE_LABELS else 1.0
            for _ in range(int(rng.integers(low, high + 1))):
                field_name = fields[int(rng.integers(len(fields)))]
                records.append(
                    PublicationRecord(
                        pub_id=f"{author_id}-{serial:03d}",
                        year=event.year,
                        field=field_name,
                        citations=int(rng.poisson(field_means[field_name] * multiplier)),
                        author_entries=(AuthorEntry(author_id=author_id, affiliations=affiliations),),
                    )
                )
                serial += 1
        return records, origin, tuple(events)

    def _realize_label(
        self,
        rng: np.random.Generator,
        label: MobilityLabel,
        prior: FrozenSet[str],
        origin: FrozenSet[str],
        candidates: Sequence[str],
        weights: Mapping[str, float],
        returning: bool,
    ) -> FrozenSet[str]:
        """Country set of a year that the classification rules label ``label``.

        Mobile labels need a candidate outside ``prior``; a multiple
        affiliation without a move needs two prior countries.
        """
        kept = sorted(prior)[int(rng.integers(len(prior)))]
        if label == MobilityLabel.MULTI_AFFILIATION:
            return prior
        if label == MobilityLabel.NON_MOBILE:
            return frozenset({kept})

        origin_candidates = [country for country in candidates if country in origin]
        if returning and not prior & origin and origin_candidates:
            target = self._pick(rng, origin_candidates, weights)
        else:
            target = self._pick(rng, candidates, weights)
        if label == MobilityLabel.MOBILE_AND_MULTI:
            return frozenset({kept, target})
        return frozenset({target})

    def _noise_record(self, config: ScenarioConfig, index: int) -> PublicationRecord:
        """Single-paper author: shapes baselines, never eligible."""
        rng = self._rng(config, index, stream=1)
        weights = dict(zip(config.countries, config.capacity_weights))
        country = self._pick(rng, config.countries, weights)
        field_means = dict(config.field_means)
        fields = sorted(field_means)
        field_name = fields[int(rng.integers(len(fields)))]
        return PublicationRecord(
            pub_id=f"N{index:06d}-000",
            year=int(rng.integers(config.year_start, config.year_end + 1)),
            field=field_name,
            citations=int(rng.poisson(field_means[field_name])),
            author_entries=(
                AuthorEntry(
                    author_id=f"N{index:06d}",
                    affiliations=(Affiliation(f"UNIVERSITY OF {country} 1", f"{country} CITY 1", country),),
                ),
            ),
        )

    # ===========================================
    # VERIFICATION
    # ===========================================

    def verify_against_truth(
        self,
        events: Sequence[MobilityEvent],
        truth: GroundTruth,
        flows: Optional[Mapping[Tuple[str, str], float]] = None,
    ) -> VerificationReport:
        """Compare labels, return flags and flow totals with the planted values."""
        report = VerificationReport()
        observed = {(event.author_id, event.year): event for event in events}
        expected = {(event.author_id, event.year): event for event in truth.all_events()}

        for key in sorted(set(expected) | set(observed)):
            report.compared_events += 1
            name = f"{key[0]}/{key[1]}"
            planted, found = expected.get(key), observed.get(key)
            if planted is None or found is None:
                report.add("event", name, "present" if planted else "absent", "present" if found else "absent")
                continue
            if planted.label != found.label:
                report.add("label", name, planted.label.value, MobilityLabel(found.label).value)
            if planted.is_return != found.is_return:
                report.add("return", name, planted.is_return, found.is_return)

        if flows is not None:
            for pair in sorted(set(truth.flows) | {pair for pair, value in flows.items() if value}):
                report.compared_flows += 1
                planted_flow = truth.flows.get(pair, 0.0)
                found_flow = flows.get(pair, 0.0)
                if abs(planted_flow - found_flow) > self.FLOW_TOLERANCE:
                    report.add("flow", f"{pair[0]}->{pair[1]}", f"{planted_flow:.6f}", f"{found_flow:.6f}")

        level = self.log_level if report.ok else logging.WARNING
        self.log_operation("Verified against ground truth", severity=level, mismatches=len(report.mismatches))
        return report

    def scenario(self, name_or_path: Optional[str] = None, **overrides) -> ScenarioConfig:
        """Resolve a preset name or a JSON scenario file, then apply overrides."""
        if not name_or_path:
            config = SCENARIO_PRESETS["default"]
        elif name_or_path in SCENARIO_PRESETS:
            config = SCENARIO_PRESETS[name_or_path]
        else:
            config = ScenarioConfig.from_file(name_or_path)
        overrides = {key: value for key, value in overrides.items() if value is not None}
        return self.validate_scenario(replace(config, **overrides))


synth_service = SynthService()
