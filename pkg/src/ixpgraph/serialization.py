"""Canonical on-disk formats: versioned graph JSON and edgelist export.

The JSON writer is deterministic byte for byte: keys are sorted, arrays
are emitted in a fixed order (IXPs by id, ASes by number, edges by
(ixp_id, asn)), and the file ends with a single newline. Writing the
same graph twice produces identical files, which makes snapshots
diffable.
"""

from __future__ import annotations

import json

from .errors import FormatError, UnknownEndpoint
from .model import (
    AsNode,
    AsType,
    BipartiteGraph,
    IxpNode,
    IxpStatus,
    Location,
    MembershipEdge,
    Multigraph,
    Source,
)

FORMAT_VERSION = 1


def _location_to_dict(location: Location | None):
    if location is None:
        return None
    return {
        "country": location.country,
        "city": location.city,
        "lat": location.lat,
        "lon": location.lon,
    }


def graph_to_dict(graph: BipartiteGraph) -> dict:
    return {
        "version": FORMAT_VERSION,
        "ixps": [
            {
                "ixp_id": node.ixp_id,
                "names": list(node.names),
                "peering_prefixes": list(node.peering_prefixes),
                "status": node.status.value,
                "location": _location_to_dict(node.location),
            }
            for _, node in sorted(graph.ixps.items())
        ],
        "ases": [
            {
                "asn": node.asn,
                "as_type": node.as_type.value,
                "prefix_count": node.prefix_count,
            }
            for _, node in sorted(graph.ases.items())
        ],
        "edges": [
            {
                "ixp_id": edge.ixp_id,
                "asn": edge.asn,
                "member_ip": edge.member_ip,
                "sources": sorted(s.value for s in edge.sources),
            }
            for _, edge in sorted(graph.edges.items())
        ],
    }


def graph_from_dict(data: dict) -> BipartiteGraph:
    if not isinstance(data, dict):
        raise FormatError("graph document must be a JSON object")
    version = data.get("version")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported graph format version {version!r}")
    for key in ("ixps", "ases", "edges"):
        if not isinstance(data.get(key), list):
            raise FormatError(f"graph document missing array {key!r}")
    try:
        ixps = {}
        for item in data["ixps"]:
            loc = item.get("location")
            ixps[item["ixp_id"]] = IxpNode(
                ixp_id=item["ixp_id"],
                names=list(item["names"]),
                peering_prefixes=list(item.get("peering_prefixes", [])),
                status=IxpStatus(item.get("status", "Active")),
                location=None if loc is None else Location(
                    country=loc["country"],
                    city=loc["city"],
                    lat=loc.get("lat"),
                    lon=loc.get("lon"),
                ),
            )
        ases = {}
        for item in data["ases"]:
            ases[item["asn"]] = AsNode(
                asn=item["asn"],
                as_type=AsType(item.get("as_type", "Unknown")),
                prefix_count=item.get("prefix_count"),
            )
        edges = {}
        for item in data["edges"]:
            edge = MembershipEdge(
                ixp_id=item["ixp_id"],
                asn=item["asn"],
                member_ip=item.get("member_ip"),
                sources=frozenset(Source(s) for s in item.get("sources", ["Other"])),
            )
            edges[(edge.ixp_id, edge.asn)] = edge
        return BipartiteGraph(ixps=ixps, ases=ases, edges=edges)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, UnknownEndpoint) as exc:
        raise FormatError(f"malformed graph document: {exc}") from exc


def dumps_graph(graph: BipartiteGraph) -> str:
    return json.dumps(graph_to_dict(graph), sort_keys=True, indent=2) + "\n"


def write_graph(graph: BipartiteGraph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_graph(graph))


def read_graph(path) -> BipartiteGraph:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not valid JSON: {exc}") from exc
    return graph_from_dict(data)


def membership_edgelist(graph: BipartiteGraph) -> str:
    """Bipartite edges as TSV lines "ixp_id<TAB>asn", sorted."""
    lines = [f"{ixp_id}\t{asn}" for ixp_id, asn in sorted(graph.edges)]
    return "\n".join(lines) + ("\n" if lines else "")


def projection_edgelist(mg: Multigraph) -> str:
    """Projection edges as TSV lines "u<TAB>v<TAB>multiplicity", sorted."""
    lines = [f"{u}\t{v}\t{len(vias)}" for (u, v), vias in sorted(mg.edges.items())]
    return "\n".join(lines) + ("\n" if lines else "")
