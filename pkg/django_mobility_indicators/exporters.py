"""Artifact writers and readers.

Tables are written with pandas, graphs with networkx. Every numeric column
is formatted to a fixed number of decimals before writing so that repeated
runs produce byte-identical files.
"""

from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import pandas as pd

from .constants import DecimalPlaces, ExportFormat, MobilityLabel
from .domain import (
    AuthorMobilityProfile,
    CentralityRow,
    CitationIndicators,
    CoAffiliationGraph,
    FieldYearBaseline,
    FlowMatrix,
    MobilityEvent,
    ShareRow,
    join_entities,
    split_entities,
)
from .exceptions import DataInconsistencyError

PathLike = Union[str, Path]

EVENT_COLUMNS = ["author_id", "year", "label", "prior_entities", "current_entities", "new_entities", "is_return"]
SHARE_COLUMNS = ["country", "capacity", "capacity_share", "observed_share", "normalized_share"]
INDICATOR_COLUMNS = ["paper_count", "total_citations", "mean_citations", "mncs", "pp_top10"]
CENTRALITY_COLUMNS = ["entity", "researchers", "closeness", "betweenness"]
AUTHOR_VARIABLE_COLUMNS = [
    "author_id",
    "pub_count",
    "first_publication_year",
    "last_publication_year",
    "origin_entities",
    "entities",
    "entity_years",
]


def fixed(value: Optional[float], places: int) -> str:
    """Fixed-decimal text; None becomes an empty cell."""
    if value is None:
        return ""
    return f"{value:.{places}f}"


def flag(value: bool) -> str:
    return "true" if value else "false"


def write_table(rows: Sequence[Mapping], columns: Sequence[str], path: PathLike) -> int:
    """Write rows as a delimited table with a header; returns the row count."""
    frame = pd.DataFrame(list(rows), columns=list(columns), dtype=object)
    frame.to_csv(path, index=False, lineterminator="\n")
    return len(frame)


def read_table(path: PathLike) -> pd.DataFrame:
    """Read a table written by ``write_table`` with every cell as text."""
    return pd.read_csv(path, dtype=str, keep_default_na=False)


# ===========================================
# CORPUS ARTIFACTS
# ===========================================


def write_validation_report(report, path: PathLike) -> int:
    return write_table(
        [{"metric": metric, "value": value} for metric, value in report.summary_rows()], ["metric", "value"], path
    )


def write_rejections(report, path: PathLike) -> int:
    return write_table(
        [{"line": line, "code": code, "message": message} for line, code, message in report.rejections],
        ["line", "code", "message"],
        path,
    )


def write_author_variables(rows: Sequence[Mapping], path: PathLike) -> int:
    return write_table(rows, AUTHOR_VARIABLE_COLUMNS, path)


def write_baselines(baselines: Mapping[Tuple[str, int], FieldYearBaseline], path: PathLike) -> int:
    rows = [
        {
            "field": baseline.field,
            "year": baseline.year,
            "paper_count": baseline.paper_count,
            "total_citations": baseline.total_citations,
            "mean_citations": fixed(baseline.mean_citations, DecimalPlaces.SHARES),
        }
        for _, baseline in sorted(baselines.items())
    ]
    return write_table(rows, ["field", "year", "paper_count", "total_citations", "mean_citations"], path)


# ===========================================
# MOBILITY ARTIFACTS
# ===========================================


def event_row(event: MobilityEvent) -> Dict[str, object]:
    return {
        "author_id": event.author_id,
        "year": event.year,
        "label": MobilityLabel(event.label).value,
        "prior_entities": join_entities(event.prior_entities),
        "current_entities": join_entities(event.current_entities),
        "new_entities": join_entities(event.new_entities),
        "is_return": flag(event.is_return),
    }


def write_events(events: Iterable[MobilityEvent], path: PathLike) -> int:
    ordered = sorted(events, key=lambda event: (event.author_id, event.year))
    return write_table([event_row(event) for event in ordered], EVENT_COLUMNS, path)


def read_events(path: PathLike) -> List[MobilityEvent]:
    """Rebuild events from an event table; an empty prior cell means no prior year."""
    frame = read_table(path)
    missing = set(EVENT_COLUMNS) - set(frame.columns)
    if missing:
        raise DataInconsistencyError(f"{path} lacks columns {', '.join(sorted(missing))}")
    return [
        MobilityEvent(
            author_id=row.author_id,
            year=int(row.year),
            label=MobilityLabel(row.label),
            prior_entities=split_entities(row.prior_entities) if row.prior_entities else None,
            current_entities=split_entities(row.current_entities),
            new_entities=split_entities(row.new_entities),
            is_return=row.is_return == "true",
        )
        for row in frame.itertuples(index=False)
    ]


def write_profiles(profiles: Mapping[str, AuthorMobilityProfile], path: PathLike) -> int:
    rows = [
        {
            "author_id": profile.author_id,
            "origin_entities": join_entities(profile.origin_entities),
            "ever_mobile": flag(profile.ever_mobile),
            "ever_multi": flag(profile.ever_multi),
            "returned": flag(profile.returned),
            "active_years": len(profile.events),
        }
        for _, profile in sorted(profiles.items())
    ]
    return write_table(rows, ["author_id", "origin_entities", "ever_mobile", "ever_multi", "returned", "active_years"], path)


def write_label_counts(rows: Sequence[Mapping], shares: Mapping[str, float], path: PathLike) -> int:
    """Per-year label counts followed by author-share rows."""
    columns = ["year"] + [label.value for label in MobilityLabel] + ["total"]
    table = list(rows)
    for name in ("mobile_author_share", "multi_author_share", "returning_author_share"):
        table.append({"year": name, "total": fixed(shares[name], DecimalPlaces.SHARES)})
    return write_table(table, columns, path)


# ===========================================
# NETWORK ARTIFACTS
# ===========================================


def graph_to_networkx(graph: CoAffiliationGraph, threshold: int = 1) -> nx.Graph:
    """networkx view with ``weight`` on nodes and edges."""
    view = nx.Graph(level=str(graph.level), researchers=graph.researcher_count)
    for key, weight in sorted(graph.nodes.items()):
        view.add_node(key, weight=weight)
    for source, target, weight in graph.edge_items(threshold):
        view.add_edge(source, target, weight=weight)
    return view


def write_graph(
    graph: CoAffiliationGraph, prefix: PathLike, export_format: str = ExportFormat.CSV, threshold: int = 1
) -> List[Path]:
    """Write a graph under ``prefix``; edge and node lists are always written.

    Returns:
        Paths of every file written

    """
    prefix = Path(prefix)
    edges_path = prefix.with_name(f"{prefix.name}_edges.csv")
    nodes_path = prefix.with_name(f"{prefix.name}_nodes.csv")
    write_table(
        [{"source": s, "target": t, "weight": w} for s, t, w in graph.edge_items(threshold)],
        ["source", "target", "weight"],
        edges_path,
    )
    write_table([{"id": key, "weight": weight} for key, weight in sorted(graph.nodes.items())], ["id", "weight"], nodes_path)
    written = [edges_path, nodes_path]

    export_format = ExportFormat(export_format)
    if export_format == ExportFormat.GRAPHML:
        path = prefix.with_suffix(".graphml")
        nx.write_graphml(graph_to_networkx(graph, threshold), path)
        written.append(path)
    elif export_format == ExportFormat.PAJEK:
        path = prefix.with_suffix(".net")
        nx.write_pajek(graph_to_networkx(graph, threshold), path)
        written.append(path)
    return written


def read_graph_csv(prefix: PathLike, level: str, researcher_count: int = 0) -> CoAffiliationGraph:
    """Rebuild a graph from its edge and node lists."""
    prefix = Path(prefix)
    nodes = read_table(prefix.with_name(f"{prefix.name}_nodes.csv"))
    edges = read_table(prefix.with_name(f"{prefix.name}_edges.csv"))
    return CoAffiliationGraph(
        level=level,
        nodes={row.id: int(row.weight) for row in nodes.itertuples(index=False)},
        edges={
            tuple(sorted((row.source, row.target))): int(row.weight) for row in edges.itertuples(index=False)
        },
        researcher_count=researcher_count,
    )


def read_graphml(path: PathLike) -> CoAffiliationGraph:
    view = nx.read_graphml(path)
    return CoAffiliationGraph(
        level=view.graph.get("level", ""),
        nodes={key: int(data["weight"]) for key, data in view.nodes(data=True)},
        edges={tuple(sorted((s, t))): int(data["weight"]) for s, t, data in view.edges(data=True)},
        researcher_count=int(view.graph.get("researchers", 0)),
    )


def write_graph_summary(summary, path: PathLike) -> int:
    rows = [
        {"metric": "nodes", "value": summary.node_count},
        {"metric": "edges", "value": summary.edge_count},
        {"metric": "researchers", "value": summary.researcher_count},
        {"metric": "components", "value": summary.component_count},
        {"metric": "density", "value": fixed(summary.density, DecimalPlaces.DENSITY)},
    ]
    return write_table(rows, ["metric", "value"], path)


def read_graph_summary(path: PathLike) -> Dict[str, str]:
    return {row.metric: row.value for row in read_table(path).itertuples(index=False)}


def write_centrality(rows: Sequence[CentralityRow], path: PathLike) -> int:
    return write_table(
        [
            {
                "entity": row.entity,
                "researchers": row.researcher_count,
                "closeness": fixed(row.closeness, DecimalPlaces.CLOSENESS),
                "betweenness": fixed(row.betweenness, DecimalPlaces.BETWEENNESS),
            }
            for row in rows
        ],
        CENTRALITY_COLUMNS,
        path,
    )


# ===========================================
# FLOW ARTIFACTS
# ===========================================


def write_flow_matrix(matrix: FlowMatrix, path: PathLike) -> int:
    """Square matrix; rows are senders, columns receivers."""
    rows = []
    for i, sender in enumerate(matrix.entities):
        row = {"sender": sender}
        for j, receiver in enumerate(matrix.entities):
            row[receiver] = fixed(float(matrix.flow[i, j]), DecimalPlaces.FLOWS)
        rows.append(row)
    return write_table(rows, ["sender"] + list(matrix.entities), path)


def write_shares(shares: Sequence[ShareRow], path: PathLike) -> int:
    return write_table(
        [
            {
                "country": share.country,
                "capacity": share.capacity,
                "capacity_share": fixed(share.capacity_share, DecimalPlaces.SHARES),
                "observed_share": fixed(share.observed_share, DecimalPlaces.SHARES),
                "normalized_share": fixed(share.normalized_share, DecimalPlaces.SHARES),
            }
            for share in shares
        ],
        SHARE_COLUMNS,
        path,
    )


def write_heatmap(rows: Sequence[Mapping], path: PathLike) -> int:
    return write_table(
        [{**row, "normalized_share": fixed(row["normalized_share"], DecimalPlaces.SHARES)} for row in rows],
        ["country", "direction", "normalized_share"],
        path,
    )


def write_flow_pairs(flows: Mapping[Tuple[str, str], float], path: PathLike) -> int:
    return write_table(
        [
            {"sender": sender, "receiver": receiver, "flow": fixed(value, DecimalPlaces.FLOWS)}
            for (sender, receiver), value in sorted(flows.items())
        ],
        ["sender", "receiver", "flow"],
        path,
    )


# ===========================================
# IMPACT ARTIFACTS
# ===========================================


def indicator_cells(indicators: CitationIndicators) -> Dict[str, object]:
    return {
        "paper_count": indicators.paper_count,
        "total_citations": indicators.total_citations,
        "mean_citations": fixed(indicators.mean_citations, DecimalPlaces.INDICATORS),
        "mncs": fixed(indicators.mncs, DecimalPlaces.INDICATORS),
        "pp_top10": fixed(indicators.pp_top10, DecimalPlaces.INDICATORS),
    }


def write_indicators(
    by_label: Mapping[MobilityLabel, CitationIndicators],
    corpus: Optional[CitationIndicators],
    path: PathLike,
    unclassified: Optional[CitationIndicators] = None,
) -> int:
    """One row per non-empty label stratum, an ``UNCLASSIFIED`` row when any pairs
    precede their author's first classified year, then the corpus-wide ``ALL`` row."""
    rows = [
        {"label": label.value, **indicator_cells(by_label[label])} for label in MobilityLabel if label in by_label
    ]
    if unclassified is not None:
        rows.append({"label": "UNCLASSIFIED", **indicator_cells(unclassified)})
    if corpus is not None:
        rows.append({"label": "ALL", **indicator_cells(corpus)})
    return write_table(rows, ["label"] + INDICATOR_COLUMNS, path)


def write_author_impact(by_author: Mapping[str, CitationIndicators], path: PathLike) -> int:
    rows = [{"author_id": author_id, **indicator_cells(value)} for author_id, value in sorted(by_author.items())]
    return write_table(rows, ["author_id"] + INDICATOR_COLUMNS, path)


# ===========================================
# SYNTHETIC CORPUS ARTIFACTS
# ===========================================


def write_verification(report, path: PathLike) -> int:
    return write_table(report.mismatches, ["kind", "key", "expected", "observed"], path)
