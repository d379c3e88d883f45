"""Command-line entry point.

Subcommands: ``build`` runs the full ingestion pipeline and writes the
canonical graph file; ``metrics`` computes one named metric from a graph
file as CSV (default) or JSON; ``place`` solves the placement problems
and prints JSON; ``export`` re-emits a graph as edgelist or JSON.

Exit codes: 0 success, 1 domain error (bad data, unknown metric,
uncoverable instance), 2 command-line usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import re
import sys
from typing import Callable, NamedTuple

from . import ingest, metrics, placement, projection, serialization
from .errors import InsufficientData, IxpGraphError
from .model import AsType, BipartiteGraph, NodeClass

_CLASS = {"ixp": NodeClass.IXP, "as": NodeClass.AS}
_TYPE = {"content": AsType.CONTENT, "enterprise": AsType.ENTERPRISE, "isp": AsType.ISP}


class MetricOutput(NamedTuple):
    columns: tuple[str, ...]
    rows: list[tuple]
    # CSV prints these columns with 1 decimal, like the tables they mirror;
    # JSON always carries full precision.
    percent_columns: frozenset = frozenset()


def _require_types(graph: BipartiteGraph) -> None:
    if all(node.as_type is AsType.UNKNOWN for node in graph.ases.values()):
        raise InsufficientData(
            "metric needs AS types, but no AS in the graph has one attached"
        )


def _metric_degree_cdf(graph, args) -> MetricOutput:
    dist = metrics.degree_distribution(graph, _CLASS[args.node_class])
    cdf = dict(dist.cdf())
    rows = [(value, count, cdf[value]) for value, count in dist.values]
    return MetricOutput(("degree", "count", "cdf"), rows)


def _metric_member_types(graph, args) -> MetricOutput:
    _require_types(graph)
    fractions = metrics.member_type_fractions(graph)
    rows = [
        (ixp_id, f.content, f.enterprise, f.isp)
        for ixp_id, f in sorted(fractions.items())
    ]
    return MetricOutput(("ixp_id", "content", "enterprise", "isp"), rows)


def _metric_member_types_cdf(graph, args) -> MetricOutput:
    _require_types(graph)
    dist = metrics.type_fraction_distribution(graph, _TYPE[args.as_type])
    cdf = dict(dist.cdf())
    rows = [(value, count, cdf[value]) for value, count in dist.values]
    return MetricOutput(("fraction", "count", "cdf"), rows)


def _metric_table1(graph, args) -> MetricOutput:
    _require_types(graph)
    thresholds = [int(t) for t in args.thresholds.split(",") if t.strip()]
    table = metrics.type_share_by_degree(graph, thresholds)
    rows = [
        (row.label, 100 * row.content, 100 * row.enterprise, 100 * row.isp)
        for row in table.rows
    ]
    return MetricOutput(
        ("subset", "content", "enterprise", "isp"),
        rows,
        percent_columns=frozenset({"content", "enterprise", "isp"}),
    )


def _metric_table2(graph, args) -> MetricOutput:
    dist = metrics.shortest_path_ixp_counts(
        graph,
        sample_size=args.sample,
        seed=args.seed,
        threads=_resolve_threads(args.threads),
    )
    rows = [
        (value, count, 100 * count / dist.total) for value, count in dist.values
    ]
    return MetricOutput(
        ("ixps_crossed", "count", "percent"), rows, percent_columns=frozenset({"percent"})
    )


def _metric_table3(graph, args) -> MetricOutput:
    mg = projection.project(graph, _CLASS[args.node_class])
    dist = metrics.multiplicity_distribution(mg)
    rows = [
        (label, count, 100 * count / dist.total)
        for label, count in dist.bucket_tail(args.tail)
    ]
    return MetricOutput(
        ("multiplicity", "count", "percent"), rows, percent_columns=frozenset({"percent"})
    )


def _metric_gain_cdf(graph, args) -> MetricOutput:
    dist = metrics.remote_peering_gain_cdf(graph)
    cdf = dict(dist.cdf())
    rows = [(value, count, cdf[value]) for value, count in dist.values]
    return MetricOutput(("gain", "count", "cdf"), rows)


def _metric_correlation(graph, args) -> MetricOutput:
    return MetricOutput(("correlation",), [(metrics.degree_prefix_correlation(graph),)])


def _metric_betweenness(graph, args) -> MetricOutput:
    mg = projection.project(graph, _CLASS[args.node_class])
    values = metrics.betweenness_centrality(mg)
    return MetricOutput(("node", "value"), [(n, values[n]) for n in sorted(values)])


def _metric_clustering(graph, args) -> MetricOutput:
    mg = projection.project(graph, _CLASS[args.node_class])
    values = metrics.clustering_coefficient(mg)
    return MetricOutput(("node", "value"), [(n, values[n]) for n in sorted(values)])


_METRICS: dict[str, tuple[str, Callable]] = {
    "degree-cdf": ("degree histogram and CDF for one vertex class", _metric_degree_cdf),
    "member-types": ("per-IXP member fractions by AS type", _metric_member_types),
    "member-types-cdf": ("distribution of one type's member fraction over IXPs", _metric_member_types_cdf),
    "table1": ("AS-type shares by degree threshold", _metric_table1),
    "table2": ("IXPs crossed by AS-to-AS shortest paths", _metric_table2),
    "table3": ("edge-multiplicity shares over node pairs of one class", _metric_table3),
    "gain-cdf": ("remote-peering gain distribution over co-located AS pairs", _metric_gain_cdf),
    "correlation": ("Pearson correlation of AS degree vs announced prefixes", _metric_correlation),
    "betweenness": ("betweenness centrality on a projection", _metric_betweenness),
    "clustering": ("clustering coefficient on a projection", _metric_clustering),
}


def _resolve_threads(flag_value: int | None) -> int:
    """--threads flag wins, then IXPGRAPH_THREADS, then the machine's
    available parallelism."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get("IXPGRAPH_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _parse_asn_token(token: str) -> int:
    match = re.fullmatch(r"(?:AS|A)?(\d+)", token.strip(), re.IGNORECASE)
    if match is None:
        raise ValueError(f"not an AS number: {token!r}")
    return int(match.group(1))


def _parse_targets(spec: str, graph: BipartiteGraph) -> list[int]:
    """Target list from a flag value: "all", a comma list of AS numbers
    (optionally A/AS-prefixed), or @file with one entry per line."""
    if spec.strip().lower() == "all":
        return sorted(graph.ases)
    if spec.startswith("@"):
        with open(spec[1:], encoding="utf-8") as fh:
            tokens = fh.read().split()
    else:
        tokens = [t for t in spec.split(",") if t.strip()]
    if not tokens:
        raise ValueError("empty target list")
    return [_parse_asn_token(t) for t in tokens]


def _read_map_file(path, expected_header, key_parse, value_parse) -> dict:
    out = {}
    for row in ingest._read_csv(path, expected_header):
        if not any(f.strip() for f in row):
            continue
        if len(row) != 2:
            raise ValueError(f"{path}: expected 2 columns, got {len(row)}")
        out[key_parse(row[0].strip())] = value_parse(row[1].strip())
    return out


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _print_metric(output: MetricOutput, as_json: bool) -> None:
    if as_json:
        _print_json([dict(zip(output.columns, row)) for row in output.rows])
        return
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(output.columns)
    for row in output.rows:
        writer.writerow(
            [
                f"{value:.1f}" if column in output.percent_columns else value
                for column, value in zip(output.columns, row)
            ]
        )


def cmd_build(args) -> int:
    result = ingest.build_from_files(
        args.pdb, args.pch, args.as_types, args.locations
    )
    serialization.write_graph(result.graph, args.out_graph)
    report = result.report.to_dict()
    if args.json:
        _print_json(
            {
                "graph_file": str(args.out_graph),
                "ixps": len(result.graph.ixps),
                "ases": len(result.graph.ases),
                "edges": result.graph.num_edges,
                "report": report,
                "attribute_warnings": result.attribute_warnings,
            }
        )
        return 0
    graph = result.graph
    print(f"graph: {len(graph.ixps)} IXPs, {len(graph.ases)} ASes, "
          f"{graph.num_edges} edges -> {args.out_graph}")
    print(f"discarded: {report['nodes_discarded']} of {report['nodes_total_pre']} nodes, "
          f"{report['edges_discarded']} of {report['edges_total_pre']} edges")
    for reason, tally in report["reasons"].items():
        print(f"  {reason}: {tally['nodes']} nodes, {tally['edges']} edges")
    if result.attribute_warnings:
        print(f"attribute warnings: {result.attribute_warnings}")
    return 0


def cmd_metrics(args, parser: argparse.ArgumentParser) -> int:
    entry = _METRICS.get(args.which)
    if entry is None:
        parser.print_usage(sys.stderr)
        known = "\n".join(f"  {name}: {help_}" for name, (help_, _) in sorted(_METRICS.items()))
        print(f"error: unknown metric {args.which!r}; available metrics:\n{known}",
              file=sys.stderr)
        return 1
    graph = serialization.read_graph(args.graph)
    _print_metric(entry[1](graph, args), args.json)
    return 0


def cmd_place(args) -> int:
    graph = serialization.read_graph(args.graph)
    if args.problem == "tunnels":
        ranked = placement.rank_tunnels(graph, _parse_asn_token(args.asn))
        _print_json([{"asn": b, "gain": gain} for b, gain in ranked])
        return 0
    if args.problem == "site":
        score = placement.site_selection_score(graph, (args.country, args.city))
        _print_json({"country": args.country, "city": args.city, "score": score})
        return 0

    targets = _parse_targets(args.targets, graph)
    costs = weights = None
    if args.costs:
        costs = _read_map_file(args.costs, ["ixp_id", "cost"], str, float)
    if args.weights:
        weights = _read_map_file(args.weights, ["asn", "weight"], _parse_asn_token, float)
    instance = placement.build_instance(graph, targets, costs, weights)
    if args.problem == "cover":
        solution = placement.greedy_set_cover(instance)
    else:
        solution = placement.budgeted_max_coverage(instance, args.budget)
    _print_json(
        {
            "chosen": list(solution.chosen),
            "covered": sorted(solution.covered),
            "total_cost": solution.total_cost,
            "total_weight": solution.total_weight,
        }
    )
    return 0


def cmd_export(args, parser: argparse.ArgumentParser) -> int:
    if args.format not in ("edgelist", "json"):
        parser.print_usage(sys.stderr)
        shown = repr(args.format) if args.format else "missing"
        print(f"error: --format must be 'edgelist' or 'json' ({shown})", file=sys.stderr)
        return 1
    graph = serialization.read_graph(args.graph)
    if args.format == "edgelist":
        sys.stdout.write(serialization.membership_edgelist(graph))
    else:
        sys.stdout.write(serialization.dumps_graph(graph))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ixpgraph",
        description="Build and analyze the IXP-AS bipartite graph of the Internet.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_build = sub.add_parser("build", help="ingest datasets and write a graph file")
    p_build.add_argument("pdb", help="PeeringDB-style membership CSV")
    p_build.add_argument("pch", help="PCH-style membership CSV")
    p_build.add_argument("out_graph", help="output graph JSON path")
    p_build.add_argument("--as-types", dest="as_types", help="asn,as_type CSV")
    p_build.add_argument("--locations", help="ixp_id,country,city,lat,lon CSV")
    p_build.add_argument("--json", action="store_true", help="machine-readable report")
    p_build.set_defaults(func=cmd_build)

    p_metrics = sub.add_parser("metrics", help="compute one metric from a graph file")
    p_metrics.add_argument("graph", help="graph JSON path")
    p_metrics.add_argument("which", help="metric name (see list on error)")
    p_metrics.add_argument("--class", dest="node_class", choices=("ixp", "as"),
                           default="ixp", help="vertex class for class-based metrics")
    p_metrics.add_argument("--type", dest="as_type",
                           choices=("content", "enterprise", "isp"), default="content",
                           help="AS type for member-types-cdf")
    p_metrics.add_argument("--thresholds", default="0,20,30",
                           help="comma list of degree thresholds for table1")
    p_metrics.add_argument("--tail", type=int, default=5,
                           help="table3 bucket: collapse multiplicities >= this value")
    p_metrics.add_argument("--sample", type=int, help="sample size of source ASes for table2")
    p_metrics.add_argument("--seed", type=int, default=42, help="sampling seed")
    p_metrics.add_argument("--threads", type=int,
                           help="worker processes for table2 (default: IXPGRAPH_THREADS or all cores)")
    p_metrics.add_argument("--json", action="store_true", help="JSON instead of CSV")
    p_metrics.set_defaults(func=lambda args: cmd_metrics(args, p_metrics))

    p_place = sub.add_parser("place", help="solve a placement problem")
    p_place.add_argument("graph", help="graph JSON path")
    place_sub = p_place.add_subparsers(dest="problem", required=True)

    p_cover = place_sub.add_parser("cover", help="minimum-cost full coverage")
    p_budget = place_sub.add_parser("budget", help="maximum coverage within a budget")
    for p in (p_cover, p_budget):
        p.add_argument("--targets", required=True,
                       help='"all", comma list of AS numbers, or @file')
        p.add_argument("--costs", help="ixp_id,cost CSV (default: all 1.0)")
        p.add_argument("--weights", help="asn,weight CSV (default: all 1.0)")
    p_budget.add_argument("--budget", type=float, required=True, help="total cost budget")

    p_tunnels = place_sub.add_parser("tunnels", help="rank remote-peering resellers")
    p_tunnels.add_argument("--as", dest="asn", required=True, help="AS to rank tunnels for")

    p_site = place_sub.add_parser("site", help="score a location for a new site")
    p_site.add_argument("--country", required=True, help="country code")
    p_site.add_argument("--city", required=True, help="city name")
    p_place.set_defaults(func=cmd_place)

    p_export = sub.add_parser("export", help="re-emit a graph file")
    p_export.add_argument("graph", help="graph JSON path")
    p_export.add_argument("--format", default="", help="edgelist or json")
    p_export.set_defaults(func=lambda args: cmd_export(args, p_export))

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IxpGraphError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
