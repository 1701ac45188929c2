"""Pipeline service: staged runs of the indicator pipeline.

Every stage reads the artifacts of earlier stages from the output directory,
writes its own artifacts, and leaves a ``<stage>.provenance.json`` record
beside them with the run configuration and SHA-256 checksums of everything
it read and wrote.
"""

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

from django.utils.text import slugify

from .. import __version__, exporters
from ..constants import (
    COUNTRY_CODES,
    MOBILE_LABELS,
    AggregationLevel,
    ArtifactNames,
    CentralitySortKey,
    DefaultValues,
    ExportFormat,
    FlowDirection,
    OccurrenceCounting,
    PipelineStage,
)
from ..domain import AuthorHistory, MobilityEvent, PublicationRecord
from ..exceptions import ConfigurationError, MissingArtifactError
from ..observability.logging import PipelineLogger
from .base import BaseService, log_execution
from .centrality_service import centrality_service
from .coaffiliation_service import coaffiliation_service
from .corpus_service import corpus_service
from .flow_service import flow_service
from .impact_service import impact_service
from .mobility_service import mobility_service
from .synth_service import synth_service

STAGE_ORDER = (
    PipelineStage.INGEST,
    PipelineStage.CLASSIFY,
    PipelineStage.NETWORK,
    PipelineStage.CENTRALITY,
    PipelineStage.FLOWS,
    PipelineStage.IMPACT,
)


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one pipeline invocation."""

    inputs: Tuple[str, ...] = ()
    aliases: Optional[str] = None
    output_dir: str = DefaultValues.OUTPUT_DIR
    window_start: int = DefaultValues.WINDOW_START
    window_end: int = DefaultValues.WINDOW_END
    level: str = AggregationLevel.COUNTRY.value
    scope: Optional[Tuple[str, ...]] = None
    scope_tag: str = ""
    region: Optional[str] = None
    threshold: int = DefaultValues.EDGE_THRESHOLD
    top_k: int = DefaultValues.TOP_K
    sort_key: str = CentralitySortKey.BETWEENNESS.value
    export_format: str = ExportFormat.CSV.value
    all_pairs: bool = False
    occurrence_counting: str = OccurrenceCounting.PUBLICATIONS.value
    weighted: bool = False
    workers: int = DefaultValues.CENTRALITY_WORKERS
    dedup_researchers: bool = False
    half_in_scope: bool = False
    per_paper_multi: bool = False
    strict: bool = False
    scenario: Optional[str] = None
    seed: Optional[int] = None
    n_authors: Optional[int] = None

    @property
    def output_path(self) -> Path:
        return Path(self.output_dir)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["inputs"] = list(self.inputs)
        data["scope"] = list(self.scope) if self.scope is not None else None
        return data


@dataclass
class StageResult:
    """Outcome of one stage: what it read, what it wrote and a summary line."""

    stage: PipelineStage
    summary: str
    inputs: List[Path] = field(default_factory=list)
    artifacts: List[Path] = field(default_factory=list)
    provenance: Optional[Path] = None


class PipelineService(BaseService):
    """Service running pipeline stages against an output directory."""

    def __init__(self):
        super().__init__()
        self.pipeline_logger = PipelineLogger(self.logger.name)
        self._records_cache: Optional[Tuple[Tuple[str, int, int], List[PublicationRecord]]] = None

    # ===========================================
    # RUN CONFIGURATION
    # ===========================================

    def resolve_run(self, **options) -> RunConfig:
        """Overlay explicit options on the package settings.

        Options that are None fall back to the settings. ``scope`` may be a
        comma-separated list of country names or two-letter codes, a region
        name, or a file with one country per line.

        Raises:
            ConfigurationError: If the window, level or a numeric option is invalid

        """
        config = self.config
        scope = options.pop("scope", None)
        values: Dict[str, Any] = {
            "aliases": config.ALIAS_MAP_PATH,
            "output_dir": str(config.OUTPUT_DIR),
            "window_start": config.WINDOW_START,
            "window_end": config.WINDOW_END,
            "level": config.AGGREGATION_LEVEL.value,
            "threshold": config.EDGE_THRESHOLD,
            "top_k": config.TOP_K,
            "all_pairs": config.ALL_PAIRS_EDGES,
            "occurrence_counting": config.OCCURRENCE_COUNTING.value,
            "weighted": config.WEIGHTED_CENTRALITY,
            "workers": config.CENTRALITY_WORKERS,
            "dedup_researchers": config.FLOW_DEDUP_RESEARCHERS,
            "half_in_scope": config.FLOW_HALF_IN_SCOPE,
            "per_paper_multi": config.PER_PAPER_MULTI,
            "strict": config.STRICT_INGEST,
        }
        values.update({name: value for name, value in options.items() if value is not None})
        values["inputs"] = tuple(str(path) for path in values.get("inputs") or ())

        try:
            values["level"] = AggregationLevel.parse(str(values["level"])).value
        except ValueError as e:
            raise ConfigurationError(f"Unknown aggregation level: {values['level']}", setting="level") from e
        if values["window_start"] > values["window_end"]:
            raise ConfigurationError(
                f"Window start {values['window_start']} is after window end {values['window_end']}", setting="window"
            )
        for name in ("threshold", "top_k", "workers"):
            self.validate_positive_int(values[name], name)
        if values.get("region") and self.config.get_region(values["region"]) is None:
            raise ConfigurationError(f"Unknown region: {values['region']}", setting="region")

        if scope:
            values["scope"], values["scope_tag"] = self.resolve_scope(scope)
        return RunConfig(**values)

    def resolve_scope(self, value: str) -> Tuple[Tuple[str, ...], str]:
        """Country names of a scope argument plus the tag used in file names."""
        path = Path(value)
        if path.is_file():
            tokens = [
                line.strip()
                for line in path.read_text(encoding="utf-8").splitlines()
                if line.strip() and not line.lstrip().startswith("#")
            ]
            tag = path.stem
        else:
            tokens = [token.strip() for token in value.split(",") if token.strip()]
            tag = "_".join(tokens)

        countries = set()
        for token in tokens:
            region = self.config.get_region(token)
            if region is not None:
                countries.update(region)
            elif token.upper() in COUNTRY_CODES:
                countries.update(COUNTRY_CODES[token.upper()])
            else:
                countries.add(token.upper())
        if not countries:
            raise ConfigurationError(f"Scope {value!r} lists no country", setting="scope")
        return tuple(sorted(countries)), slugify(tag).replace("-", "_") or "scope"

    # ===========================================
    # STAGE DISPATCH
    # ===========================================

    def run_subcommand(self, name: str, run: RunConfig) -> List[StageResult]:
        """Run one stage, or every stage in order for ``all``.

        Raises:
            MissingArtifactError: If a prerequisite artifact is absent

        """
        stage = PipelineStage(name)
        run.output_path.mkdir(parents=True, exist_ok=True)
        if stage != PipelineStage.ALL:
            return [self._run_stage(stage, run)]

        results = []
        if not run.inputs:
            synth = self._run_stage(PipelineStage.SYNTH, run)
            results.append(synth)
            run = replace(run, inputs=(str(run.output_path / ArtifactNames.SYNTH_CORPUS),))
        for stage in STAGE_ORDER:
            results.append(self._run_stage(stage, run))
        return results

    def _run_stage(self, stage: PipelineStage, run: RunConfig) -> StageResult:
        handler = getattr(self, f"run_{stage.value}")
        self.pipeline_logger.log_stage(stage.value, "started", level=run.level)
        started = time.perf_counter()
        try:
            result = handler(run)
        except Exception:
            self.pipeline_logger.log_stage(stage.value, "failed", level=run.level)
            raise
        result.provenance = self.write_provenance(run, result)
        self.pipeline_logger.log_stage(
            stage.value, "completed", duration_ms=round((time.perf_counter() - started) * 1000, 1), level=run.level
        )
        return result

    # ===========================================
    # ARTIFACT ACCESS
    # ===========================================

    def require(self, run: RunConfig, name: str, stage: PipelineStage) -> Path:
        path = run.output_path / name
        if not path.is_file():
            raise MissingArtifactError(name, stage.value)
        return path

    def _write(self, run: RunConfig, name: str, writer, *args, **kwargs) -> Path:
        path = run.output_path / name
        rows = writer(*args, path, **kwargs)
        self.pipeline_logger.log_artifact(name, rows if isinstance(rows, int) else 0)
        return path

    def load_records(self, run: RunConfig) -> Tuple[List[PublicationRecord], Path]:
        path = self.require(run, ArtifactNames.RECORDS, PipelineStage.INGEST)
        stat = path.stat()
        key = (str(path.resolve()), stat.st_mtime_ns, stat.st_size)
        if self._records_cache is None or self._records_cache[0] != key:
            self._records_cache = (key, corpus_service.load_normalized_records(path))
        return list(self._records_cache[1]), path

    def eligible_histories(self, run: RunConfig, records: Sequence[PublicationRecord]) -> Dict[str, AuthorHistory]:
        histories = corpus_service.build_author_histories(records)
        return corpus_service.filter_eligible_researchers(histories, run.window_start, run.window_end)

    def load_events(self, run: RunConfig) -> Tuple[List[MobilityEvent], Path]:
        """Events of the last ``classify`` run, which must match the requested level."""
        path = self.require(run, ArtifactNames.EVENTS, PipelineStage.CLASSIFY)
        provenance = self.read_provenance(run.output_path / self.provenance_name(PipelineStage.CLASSIFY))
        if provenance is not None:
            level = provenance.get("config", {}).get("level")
            if level and level != run.level:
                raise ConfigurationError(
                    f"events were classified at level {level}; run `mobility classify --level {run.level}` first",
                    setting="level",
                )
        return exporters.read_events(path), path

    # ===========================================
    # STAGES
    # ===========================================

    @log_execution()
    def run_ingest(self, run: RunConfig) -> StageResult:
        if not run.inputs:
            raise ConfigurationError("ingest needs at least one --input file", setting="input")
        inputs = [Path(path) for path in run.inputs]
        for path in inputs:
            if not path.is_file():
                raise ConfigurationError(f"Input file {path} does not exist", setting="input")
        if run.aliases:
            inputs.append(Path(run.aliases))

        aliases = corpus_service.load_alias_map(run.aliases) if run.aliases else {}
        records, report = corpus_service.read_corpus(run.inputs, aliases, strict=run.strict)

        records_path = run.output_path / ArtifactNames.RECORDS
        with open(records_path, "w", encoding="utf-8", newline="\n") as handle:
            for record in records:
                handle.write(corpus_service.serialize_record(record) + "\n")
        self.pipeline_logger.log_artifact(ArtifactNames.RECORDS, len(records))
        for line_number, code, message in report.rejections:
            self.pipeline_logger.log_data_warning(message, line_number=line_number, code=code)

        eligible = self.eligible_histories(run, records)
        artifacts = [
            records_path,
            self._write(run, ArtifactNames.VALIDATION_REPORT, exporters.write_validation_report, report),
            self._write(run, ArtifactNames.REJECTED_LINES, exporters.write_rejections, report),
            self._write(
                run,
                ArtifactNames.BASELINES,
                exporters.write_baselines,
                corpus_service.compute_field_year_baselines(records),
            ),
            self._write(
                run,
                ArtifactNames.AUTHOR_VARIABLES,
                exporters.write_author_variables,
                corpus_service.author_variables(eligible, run.level),
            ),
        ]
        return StageResult(
            stage=PipelineStage.INGEST,
            summary=(
                f"ingest: {report.parsed} records, {report.rejected} rejected, "
                f"{len(eligible)} eligible researchers"
            ),
            inputs=inputs,
            artifacts=artifacts,
        )

    @log_execution()
    def run_classify(self, run: RunConfig) -> StageResult:
        records, records_path = self.load_records(run)
        eligible = self.eligible_histories(run, records)
        events = mobility_service.classify_corpus(eligible, run.level, run.per_paper_multi)
        profiles, counts = mobility_service.summarize_profiles(events)
        shares = mobility_service.author_shares(profiles)

        artifacts = [
            self._write(run, ArtifactNames.EVENTS, exporters.write_events, events),
            self._write(run, ArtifactNames.PROFILES, exporters.write_profiles, profiles),
            self._write(run, ArtifactNames.LABEL_COUNTS, exporters.write_label_counts, counts, shares),
        ]
        mobile = sum(event.label in MOBILE_LABELS for event in events)
        return StageResult(
            stage=PipelineStage.CLASSIFY,
            summary=f"classify: {len(events)} author-years of {len(profiles)} researchers, {mobile} mobility events",
            inputs=[records_path],
            artifacts=artifacts,
        )

    @log_execution()
    def run_network(self, run: RunConfig) -> StageResult:
        records, records_path = self.load_records(run)
        eligible = self.eligible_histories(run, records)
        graph = coaffiliation_service.build_coaffiliation_graph(
            eligible, run.level, run.scope, run.all_pairs, run.occurrence_counting
        )
        prefix = run.output_path / ArtifactNames.network_prefix(run.level, run.scope_tag)
        artifacts = exporters.write_graph(graph, prefix, run.export_format, run.threshold)

        summary = coaffiliation_service.graph_summary(graph, run.threshold)
        artifacts.append(
            self._write(run, f"{prefix.name}_summary.csv", exporters.write_graph_summary, summary)
        )
        return StageResult(
            stage=PipelineStage.NETWORK,
            summary=(
                f"network: {summary.node_count} nodes, {summary.edge_count} edges, "
                f"{summary.researcher_count} researchers at {run.level} level"
            ),
            inputs=[records_path],
            artifacts=artifacts,
        )

    @log_execution()
    def run_centrality(self, run: RunConfig) -> StageResult:
        name = ArtifactNames.network_prefix(run.level, run.scope_tag)
        edges_path = self.require(run, f"{name}_edges.csv", PipelineStage.NETWORK)
        nodes_path = self.require(run, f"{name}_nodes.csv", PipelineStage.NETWORK)
        summary_path = self.require(run, f"{name}_summary.csv", PipelineStage.NETWORK)

        researchers = int(exporters.read_graph_summary(summary_path).get("researchers", 0))
        graph = exporters.read_graph_csv(run.output_path / name, run.level, researchers)
        rows = centrality_service.centrality_table(
            graph, run.top_k, run.sort_key, run.threshold, run.weighted, run.workers
        )
        artifacts = [
            self._write(
                run, ArtifactNames.centrality_table(run.level, run.scope_tag), exporters.write_centrality, rows
            )
        ]

        if run.region:
            countries = self.config.get_region(run.region)
            entities = centrality_service.region_entities(graph, countries)
            if not entities:
                raise ConfigurationError(
                    f"Region {run.region} has no node in the {run.level} network", setting="region"
                )
            subgraph = centrality_service.region_subgraph(graph, entities)
            region_rows = centrality_service.centrality_table(
                subgraph, run.top_k, run.sort_key, run.threshold, run.weighted, run.workers
            )
            artifacts.append(
                self._write(
                    run,
                    ArtifactNames.centrality_table(run.level, run.scope_tag, slugify(run.region).replace("-", "_")),
                    exporters.write_centrality,
                    region_rows,
                )
            )

        top = rows[0].entity if rows else "none"
        return StageResult(
            stage=PipelineStage.CENTRALITY,
            summary=f"centrality: {len(graph.nodes)} nodes ranked by {run.sort_key}, top {top}",
            inputs=[edges_path, nodes_path, summary_path],
            artifacts=artifacts,
        )

    @log_execution()
    def run_flows(self, run: RunConfig) -> StageResult:
        events, events_path = self.load_events(run)
        records, records_path = self.load_records(run)
        capacities = flow_service.capacities(self.eligible_histories(run, records), run.level)
        matrix = flow_service.build_flow_matrix(
            events, capacities, run.scope, run.dedup_researchers, run.half_in_scope
        )

        artifacts = [
            self._write(run, ArtifactNames.FLOW_MATRIX, exporters.write_flow_matrix, matrix),
            self._write(run, ArtifactNames.FLOW_PAIRS, exporters.write_flow_pairs, flow_service.flow_pairs(matrix)),
            self._write(
                run,
                ArtifactNames.SENDING_SHARES,
                exporters.write_shares,
                flow_service.normalized_shares(matrix, FlowDirection.SENDING),
            ),
            self._write(
                run,
                ArtifactNames.RECEIVING_SHARES,
                exporters.write_shares,
                flow_service.normalized_shares(matrix, FlowDirection.RECEIVING),
            ),
            self._write(run, ArtifactNames.SHARES_HEATMAP, exporters.write_heatmap, flow_service.heatmap_rows(matrix)),
        ]
        return StageResult(
            stage=PipelineStage.FLOWS,
            summary=f"flows: {len(matrix.entities)} entities, total flow {matrix.total:.6f}",
            inputs=[events_path, records_path],
            artifacts=artifacts,
        )

    @log_execution()
    def run_impact(self, run: RunConfig) -> StageResult:
        events, events_path = self.load_events(run)
        records, records_path = self.load_records(run)
        baselines = corpus_service.compute_field_year_baselines(records)

        by_label = impact_service.indicators_by_mobility_class(records, events, baselines)
        unclassified = impact_service.unclassified_indicators(records, events, baselines)
        corpus = impact_service.corpus_indicators(records, baselines)
        by_author = impact_service.author_indicators(records, self.eligible_histories(run, records), baselines)

        artifacts = [
            self._write(
                run, ArtifactNames.INDICATORS, exporters.write_indicators, by_label, corpus, unclassified=unclassified
            ),
            self._write(run, ArtifactNames.AUTHOR_IMPACT, exporters.write_author_impact, by_author),
        ]
        return StageResult(
            stage=PipelineStage.IMPACT,
            summary=f"impact: {len(by_label)} label strata, corpus MNCS {corpus.mncs:.4f}",
            inputs=[events_path, records_path],
            artifacts=artifacts,
        )

    @log_execution()
    def run_synth(self, run: RunConfig) -> StageResult:
        """Generate a corpus, write it with its ground truth and check the classifier against it."""
        scenario = synth_service.scenario(run.scenario, seed=run.seed, n_authors=run.n_authors)
        records, truth = synth_service.generate_corpus(scenario)

        corpus_path = run.output_path / ArtifactNames.SYNTH_CORPUS
        with open(corpus_path, "w", encoding="utf-8", newline="\n") as handle:
            for record in records:
                handle.write(corpus_service.serialize_record(record) + "\n")
        self.pipeline_logger.log_artifact(ArtifactNames.SYNTH_CORPUS, len(records))

        histories = corpus_service.filter_eligible_researchers(
            corpus_service.build_author_histories(records), scenario.year_start, scenario.year_end
        )
        events = mobility_service.classify_corpus(histories, AggregationLevel.COUNTRY)
        matrix = flow_service.build_flow_matrix(
            events, flow_service.capacities(histories), dedup_researchers=False, half_in_scope=False
        )
        report = synth_service.verify_against_truth(events, truth, flow_service.flow_pairs(matrix))

        artifacts = [
            corpus_path,
            self._write(run, ArtifactNames.GROUND_TRUTH, exporters.write_events, truth.all_events()),
            self._write(run, ArtifactNames.GROUND_TRUTH_FLOWS, exporters.write_flow_pairs, truth.flows),
            self._write(run, ArtifactNames.VERIFICATION, exporters.write_verification, report),
        ]
        scenario_file = Path(run.scenario) if run.scenario and Path(run.scenario).is_file() else None
        return StageResult(
            stage=PipelineStage.SYNTH,
            summary=(
                f"synth: {len(records)} records from {scenario.n_authors} authors (seed {scenario.seed}), "
                f"{len(report.mismatches)} mismatches against ground truth"
            ),
            inputs=[scenario_file] if scenario_file else [],
            artifacts=artifacts,
        )

    # ===========================================
    # PROVENANCE
    # ===========================================

    def provenance_name(self, stage: PipelineStage) -> str:
        return f"{PipelineStage(stage).value}{ArtifactNames.PROVENANCE_SUFFIX}"

    def checksum(self, path: Path) -> str:
        digest = hashlib.sha256()
        with open(path, "rb") as handle:
            for block in iter(lambda: handle.read(1 << 16), b""):
                digest.update(block)
        return digest.hexdigest()

    def describe_run(self, run: RunConfig, result: StageResult) -> Dict[str, Any]:
        """Provenance record of one stage run.

        Identical runs produce identical records apart from ``created_at``.
        """
        return {
            "stage": result.stage.value,
            "package_version": __version__,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "config": run.to_dict(),
            "inputs": {str(path): self.checksum(path) for path in result.inputs},
            "artifacts": {path.name: self.checksum(path) for path in result.artifacts},
        }

    def write_provenance(self, run: RunConfig, result: StageResult) -> Path:
        path = run.output_path / self.provenance_name(result.stage)
        record = self.describe_run(run, result)
        path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path

    def read_provenance(self, path: Path) -> Optional[Dict[str, Any]]:
        if not path.is_file():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def provenance_diff(self, first: Mapping[str, Any], second: Mapping[str, Any]) -> List[str]:
        """Dotted keys whose values differ between two records, timestamps excluded."""
        left, right = self._flatten(first), self._flatten(second)
        return sorted(key for key in set(left) | set(right) if left.get(key, ...) != right.get(key, ...))

    def _flatten(self, record: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
        flat = {}
        for key, value in record.items():
            name = f"{prefix}{key}"
            if name == "created_at":
                continue
            if isinstance(value, Mapping):
                flat.update(self._flatten(value, f"{name}."))
            else:
                flat[name] = value
        return flat


pipeline_service = PipelineService()
