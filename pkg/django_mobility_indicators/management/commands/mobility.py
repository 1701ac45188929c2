"""CLI command running the mobility indicator pipeline."""

import argparse
import sys
from functools import partial
from typing import Tuple

from django.core.management.base import BaseCommand, CommandError, CommandParser

from ...constants import AggregationLevel, CentralitySortKey, ExitCodes, ExportFormat, OccurrenceCounting, PipelineStage
from ...exceptions import ConfigurationError, MissingArtifactError, MobilityIndicatorsError
from ...services.pipeline_service import pipeline_service

RUN_OPTIONS = (
    "inputs",
    "aliases",
    "output_dir",
    "level",
    "scope",
    "region",
    "threshold",
    "top_k",
    "sort_key",
    "export_format",
    "all_pairs",
    "occurrence_counting",
    "weighted",
    "workers",
    "dedup_researchers",
    "half_in_scope",
    "per_paper_multi",
    "strict",
    "scenario",
    "seed",
    "n_authors",
)


def window(value: str) -> Tuple[int, int]:
    """Parse ``START:END`` into two years."""
    start, separator, end = value.partition(":")
    try:
        if not separator:
            raise ValueError(value)
        years = int(start), int(end)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END years, got {value!r}") from None
    if years[0] > years[1]:
        raise argparse.ArgumentTypeError(f"window start {years[0]} is after window end {years[1]}")
    return years


def level(value: str) -> str:
    try:
        return AggregationLevel.parse(value).value
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown level {value!r}; use country, city or org") from None


def _usage_error(parser: argparse.ArgumentParser, message: str):
    """Report a usage problem with exit status 1 instead of argparse's 2."""
    if getattr(parser, "called_from_command_line", False):
        parser.print_usage(sys.stderr)
        parser.exit(ExitCodes.USAGE_ERROR, f"{parser.prog}: error: {message}\n")
    raise CommandError(f"Error: {message}", returncode=ExitCodes.USAGE_ERROR)


class Command(BaseCommand):
    """Pipeline command with one sub-command per stage."""

    help = "Compute researcher mobility indicators from publication records"
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.error = partial(_usage_error, parser)
        flags = self._flag_groups()
        stage_flags = {
            PipelineStage.INGEST: ["common", "ingest"],
            PipelineStage.CLASSIFY: ["common", "classify"],
            PipelineStage.NETWORK: ["common", "scope", "threshold", "network"],
            PipelineStage.CENTRALITY: ["common", "scope", "threshold", "centrality"],
            PipelineStage.FLOWS: ["common", "scope", "flows"],
            PipelineStage.IMPACT: ["common"],
            PipelineStage.SYNTH: ["common", "synth"],
            PipelineStage.ALL: [
                "common", "ingest", "classify", "scope", "threshold", "network", "centrality", "flows", "synth"
            ],
        }

        subparsers = parser.add_subparsers(dest="stage", metavar="stage", parser_class=CommandParser)
        subparsers.required = True
        for stage in PipelineStage:
            subparser = subparsers.add_parser(
                stage.value,
                help=str(stage.label),
                parents=[flags[name] for name in stage_flags[stage]],
                called_from_command_line=getattr(parser, "called_from_command_line", None),
            )
            subparser.error = partial(_usage_error, subparser)

    def _flag_groups(self):
        """Parent parsers holding the flags shared between stages."""
        groups = {name: argparse.ArgumentParser(add_help=False) for name in (
            "common", "ingest", "classify", "scope", "threshold", "network", "centrality", "flows", "synth"
        )}

        common = groups["common"]
        common.add_argument("--out", dest="output_dir", help="Output directory (default: $MOBILITY_OUTPUT_DIR)")
        common.add_argument("--level", type=level, help="Aggregation level: country, city or org")
        common.add_argument("--window", type=window, help="Eligibility window as START:END, e.g. 2003:2015")

        ingest = groups["ingest"]
        ingest.add_argument(
            "--input", dest="inputs", action="extend", nargs="+", help="Line-delimited publication files"
        )
        ingest.add_argument("--aliases", help="Alias map with a raw,canonical header")
        ingest.add_argument(
            "--strict", action="store_true", default=None, help="Abort on the first bad line instead of rejecting it"
        )

        groups["classify"].add_argument(
            "--per-paper-multi",
            action="store_true",
            default=None,
            help="Judge multiple affiliation per paper instead of per year",
        )

        groups["scope"].add_argument(
            "--scope", help="Comma-separated country names or codes, a region name, or a file of countries"
        )
        groups["threshold"].add_argument("--threshold", type=int, help="Minimum edge weight")

        network = groups["network"]
        network.add_argument("--format", dest="export_format", choices=ExportFormat.values, help="Graph export format")
        network.add_argument(
            "--all-pairs",
            action="store_true",
            default=None,
            help="Link every pair of a researcher's entities, not only the top two",
        )
        network.add_argument(
            "--counting",
            dest="occurrence_counting",
            choices=OccurrenceCounting.values,
            help="How most common affiliations are counted",
        )

        centrality = groups["centrality"]
        centrality.add_argument("--top-k", type=int, help="Rows per centrality table")
        centrality.add_argument("--sort", dest="sort_key", choices=CentralitySortKey.values, help="Ranking column")
        centrality.add_argument(
            "--weighted", action="store_true", default=None, help="Use 1/weight as edge length"
        )
        centrality.add_argument("--workers", type=int, help="Processes for shortest-path computations")
        centrality.add_argument("--region", help="Also rank the subgraph induced on this region")

        flows = groups["flows"]
        flows.add_argument(
            "--dedup-researchers",
            action="store_true",
            default=None,
            help="Give each mobile researcher a total flow weight of 1",
        )
        flows.add_argument(
            "--half-in-scope", action="store_true", default=None, help="Keep flows whose sender is in scope"
        )

        synth = groups["synth"]
        synth.add_argument("--scenario", help="Preset name or JSON scenario file")
        synth.add_argument("--seed", type=int, help="Random seed of the synthetic corpus")
        synth.add_argument("--authors", dest="n_authors", type=int, help="Number of synthetic authors")
        return groups

    def handle(self, *args, **options):
        """Handle the pipeline command."""
        run_options = {name: options.get(name) for name in RUN_OPTIONS}
        if options.get("window"):
            run_options["window_start"], run_options["window_end"] = options["window"]

        try:
            run = pipeline_service.resolve_run(**run_options)
            results = pipeline_service.run_subcommand(options["stage"], run)
        except (ConfigurationError, MissingArtifactError) as e:
            raise CommandError(e.message, returncode=ExitCodes.USAGE_ERROR) from e
        except MobilityIndicatorsError as e:
            raise CommandError(e.message, returncode=ExitCodes.DATA_ERROR) from e
        except OSError as e:
            raise CommandError(f"{e.strerror or e}: {e.filename}", returncode=ExitCodes.DATA_ERROR) from e

        for result in results:
            self.stdout.write(self.style.SUCCESS(result.summary))
