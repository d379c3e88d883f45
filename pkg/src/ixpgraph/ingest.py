"""Dataset parsing, IXP identity merging, and graph sanitization.

Input files are UTF-8 CSV exports of IXP membership data, one per source
(PeeringDB-style and PCH-style), sharing the header::

    source,ixp_key,ixp_name,ixp_prefixes,asn,member_ip,status,as_type,as_prefix_count

``ixp_prefixes`` is a ';'-separated CIDR list; member_ip, as_type and
as_prefix_count may be empty. Attribute files are ``asn,as_type`` and
``ixp_id,country,city,lat,lon``.

The cleaning pipeline runs in a fixed order: inactive-IXP removal, then
IP-consistency filtering, then cross-source duplicate collapsing, then
giant-component extraction. The order is part of the contract; running
the giant-component step earlier can change the result.
"""

from __future__ import annotations

import csv
import ipaddress
import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from . import model
from .errors import EmptyGraph, FormatError
from .model import (
    AsNode,
    AsType,
    BipartiteGraph,
    IxpNode,
    IxpStatus,
    Location,
    MembershipEdge,
    Source,
)

DATASET_HEADER = [
    "source",
    "ixp_key",
    "ixp_name",
    "ixp_prefixes",
    "asn",
    "member_ip",
    "status",
    "as_type",
    "as_prefix_count",
]
AS_TYPES_HEADER = ["asn", "as_type"]
LOCATIONS_HEADER = ["ixp_id", "country", "city", "lat", "lon"]

_STATUS_SEVERITY = {IxpStatus.ACTIVE: 0, IxpStatus.NOT_APPROVED: 1, IxpStatus.INACTIVE: 2}


class DiscardReason(str, Enum):
    INACTIVE_IXP = "InactiveIxp"
    IP_INCONSISTENT = "IpInconsistent"
    NOT_IN_GIANT_COMPONENT = "NotInGiantComponent"
    DUPLICATE_COLLAPSED = "DuplicateCollapsed"
    PARSE_ERROR = "ParseError"


class ReasonTally(NamedTuple):
    nodes: int
    edges: int


@dataclass
class DiscardReport:
    """What the sanitization pipeline threw away, tallied per reason."""

    nodes_total_pre: int
    edges_total_pre: int
    reasons: dict[DiscardReason, ReasonTally] = field(default_factory=dict)

    @property
    def nodes_discarded(self) -> int:
        return sum(t.nodes for t in self.reasons.values())

    @property
    def edges_discarded(self) -> int:
        return sum(t.edges for t in self.reasons.values())

    def to_dict(self) -> dict:
        return {
            "nodes_total_pre": self.nodes_total_pre,
            "edges_total_pre": self.edges_total_pre,
            "nodes_discarded": self.nodes_discarded,
            "edges_discarded": self.edges_discarded,
            "reasons": {
                reason.value: {"nodes": tally.nodes, "edges": tally.edges}
                for reason, tally in sorted(self.reasons.items(), key=lambda kv: kv[0].value)
            },
        }


@dataclass
class MembershipRecord:
    """One validated row of a membership dataset."""

    source: Source
    ixp_key: str
    ixp_name: str
    ixp_prefixes: list[str]
    asn: int
    member_ip: str | None
    status: IxpStatus
    as_type: AsType | None = None
    as_prefix_count: int | None = None


@dataclass
class ParseResult:
    records: list[MembershipRecord]
    parse_errors: int


@dataclass(frozen=True)
class IxpIdentity:
    """An IXP unified across sources, with merged attributes."""

    ixp_id: str
    source_keys: frozenset[tuple[Source, str]]
    names: tuple[str, ...]
    peering_prefixes: tuple[str, ...]
    status: IxpStatus


def _parse_prefixes(raw: str) -> list[str]:
    prefixes = []
    for part in raw.split(";"):
        part = part.strip()
        if part:
            prefixes.append(str(ipaddress.ip_network(part, strict=False)))
    return prefixes


def _parse_row(row: list[str], expected_source: Source) -> MembershipRecord:
    if len(row) != len(DATASET_HEADER):
        raise ValueError(f"expected {len(DATASET_HEADER)} fields, got {len(row)}")
    (source_raw, ixp_key, ixp_name, prefixes_raw, asn_raw,
     ip_raw, status_raw, type_raw, pfx_count_raw) = (f.strip() for f in row)

    source = Source(source_raw)
    if source is not expected_source:
        raise ValueError(f"row source {source_raw!r} in a {expected_source.value} file")
    if not ixp_key or not ixp_name:
        raise ValueError("ixp_key and ixp_name must be non-empty")
    asn = int(asn_raw)
    if asn <= 0:
        raise ValueError(f"asn must be positive, got {asn}")
    pfx_count = None
    if pfx_count_raw:
        pfx_count = int(pfx_count_raw)
        if pfx_count < 0:
            raise ValueError("as_prefix_count must be non-negative")
    return MembershipRecord(
        source=source,
        ixp_key=ixp_key,
        ixp_name=ixp_name,
        ixp_prefixes=_parse_prefixes(prefixes_raw),
        asn=asn,
        member_ip=str(ipaddress.ip_address(ip_raw)) if ip_raw else None,
        status=IxpStatus(status_raw),
        as_type=AsType(type_raw) if type_raw else None,
        as_prefix_count=pfx_count,
    )


def _read_csv(path, expected_header: list[str]) -> Iterable[list[str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file, expected header {','.join(expected_header)}")
        if [h.strip().lower() for h in header] != expected_header:
            raise FormatError(f"{path}: unrecognized header {','.join(header)!r}")
        yield from reader


def parse_dataset(path, source: Source) -> ParseResult:
    """Parse one membership CSV; malformed rows are counted, not fatal."""
    records = []
    errors = 0
    for row in _read_csv(path, DATASET_HEADER):
        if not any(f.strip() for f in row):
            continue
        try:
            records.append(_parse_row(row, source))
        except ValueError:
            errors += 1
    return ParseResult(records=records, parse_errors=errors)


def normalize_ixp_name(name: str) -> str:
    """Lowercase and collapse whitespace/punctuation runs, so e.g.
    "DE-CIX Frankfurt" and "de cix  frankfurt" compare equal."""
    return re.sub(r"[\s\-_.,]+", " ", name.lower()).strip()


def _source_key_str(key: tuple[Source, str]) -> str:
    return f"{key[0].value}:{key[1]}"


class _UnionFind:
    def __init__(self, items):
        self.parent = {item: item for item in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _prefixes_overlap(nets_a, nets_b) -> bool:
    for pa in nets_a:
        for pb in nets_b:
            if pa.version != pb.version:
                continue
            if pa == pb or pa.subnet_of(pb) or pb.subnet_of(pa):
                return True
    return False


def merge_ixp_lists(
    pdb: Sequence[MembershipRecord], pch: Sequence[MembershipRecord]
) -> dict[str, IxpIdentity]:
    """Unify source-local IXPs across the two datasets.

    Two IXPs become one node when a peering prefix is identical or nested,
    or when their normalized names match; unification is the transitive
    closure of those matches. Unified ids are "IXP" plus a zero-padded
    sequence number, assigned in lexicographic order of each group's
    smallest source key, so the numbering is reproducible.
    """
    names: dict[tuple[Source, str], set[str]] = {}
    prefixes: dict[tuple[Source, str], set] = {}
    statuses: dict[tuple[Source, str], IxpStatus] = {}
    for record in list(pdb) + list(pch):
        key = (record.source, record.ixp_key)
        names.setdefault(key, set()).add(record.ixp_name)
        prefixes.setdefault(key, set()).update(
            ipaddress.ip_network(p) for p in record.ixp_prefixes
        )
        if key not in statuses or _STATUS_SEVERITY[record.status] > _STATUS_SEVERITY[statuses[key]]:
            statuses[key] = record.status

    keys = sorted(names, key=_source_key_str)
    uf = _UnionFind(keys)

    by_norm_name: dict[str, list] = {}
    for key in keys:
        for name in names[key]:
            by_norm_name.setdefault(normalize_ixp_name(name), []).append(key)
    for group in by_norm_name.values():
        for other in group[1:]:
            uf.union(group[0], other)

    for i, ka in enumerate(keys):
        if not prefixes[ka]:
            continue
        for kb in keys[i + 1:]:
            if uf.find(ka) == uf.find(kb):
                continue
            if _prefixes_overlap(prefixes[ka], prefixes[kb]):
                uf.union(ka, kb)

    groups: dict = {}
    for key in keys:
        groups.setdefault(uf.find(key), []).append(key)
    ordered = sorted(groups.values(), key=lambda g: _source_key_str(g[0]))

    width = max(4, len(str(len(ordered))))
    identities = {}
    for seq, group in enumerate(ordered, start=1):
        ixp_id = f"IXP{seq:0{width}d}"
        group_names = sorted(set().union(*(names[k] for k in group)))
        group_nets = sorted(
            set().union(*(prefixes[k] for k in group)),
            key=lambda n: (n.version, int(n.network_address), n.prefixlen),
        )
        status = max((statuses[k] for k in group), key=_STATUS_SEVERITY.get)
        identities[ixp_id] = IxpIdentity(
            ixp_id=ixp_id,
            source_keys=frozenset(group),
            names=tuple(group_names),
            peering_prefixes=tuple(str(n) for n in group_nets),
            status=status,
        )
    return identities


def _record_priority(record: MembershipRecord) -> tuple:
    # PDB data wins over PCH when collapsing duplicates.
    return (0 if record.source is Source.PDB else 1, record.member_ip or "")


def sanitize(
    records: Sequence[MembershipRecord],
    identities: dict[str, IxpIdentity],
    parse_errors: int = 0,
) -> tuple[BipartiteGraph, DiscardReport]:
    """Run the fixed cleaning pipeline and build the final graph.

    Steps, in order: (1) drop IXPs flagged Inactive or NotApproved by any
    source, with their edges; (2) drop edges whose member_ip falls outside
    every peering prefix of the unified IXP; (3) collapse duplicate
    (ixp, asn) edges across sources, merging their sources sets; (4) keep
    only the giant component. Every step is tallied in the report.
    """
    key_to_uid = {}
    for uid, ident in identities.items():
        for key in ident.source_keys:
            key_to_uid[key] = uid
    for record in records:
        if (record.source, record.ixp_key) not in key_to_uid:
            raise ValueError(f"record references unmerged IXP key {record.ixp_key!r}")

    all_asns = {r.asn for r in records}
    report = DiscardReport(
        nodes_total_pre=len(identities) + len(all_asns),
        edges_total_pre=len(records) + parse_errors,
    )
    if parse_errors:
        report.reasons[DiscardReason.PARSE_ERROR] = ReasonTally(nodes=0, edges=parse_errors)

    # (1) inactive / not-approved IXPs
    bad_uids = {uid for uid, ident in identities.items() if ident.status is not IxpStatus.ACTIVE}
    stage1 = [r for r in records if key_to_uid[(r.source, r.ixp_key)] not in bad_uids]
    if bad_uids:
        report.reasons[DiscardReason.INACTIVE_IXP] = ReasonTally(
            nodes=len(bad_uids), edges=len(records) - len(stage1)
        )

    # (2) member IPs outside the unified IXP's peering LAN
    nets = {
        uid: [ipaddress.ip_network(p) for p in ident.peering_prefixes]
        for uid, ident in identities.items()
    }

    def ip_consistent(record: MembershipRecord) -> bool:
        if record.member_ip is None:
            return True
        ip = ipaddress.ip_address(record.member_ip)
        uid = key_to_uid[(record.source, record.ixp_key)]
        return any(ip.version == net.version and ip in net for net in nets[uid])

    stage2 = [r for r in stage1 if ip_consistent(r)]
    if len(stage2) < len(stage1):
        report.reasons[DiscardReason.IP_INCONSISTENT] = ReasonTally(
            nodes=0, edges=len(stage1) - len(stage2)
        )

    # (3) duplicate collapse across sources
    grouped: dict[tuple[str, int], list[MembershipRecord]] = {}
    for record in stage2:
        grouped.setdefault((key_to_uid[(record.source, record.ixp_key)], record.asn), []).append(record)
    duplicates = sum(len(g) - 1 for g in grouped.values())
    if duplicates:
        report.reasons[DiscardReason.DUPLICATE_COLLAPSED] = ReasonTally(nodes=0, edges=duplicates)

    edges = {}
    for (uid, asn), group in sorted(grouped.items()):
        group = sorted(group, key=_record_priority)
        member_ip = next((r.member_ip for r in group if r.member_ip is not None), None)
        edges[(uid, asn)] = MembershipEdge(
            ixp_id=uid,
            asn=asn,
            member_ip=member_ip,
            sources=frozenset(r.source for r in group),
        )
    if not edges:
        raise EmptyGraph("no membership edges survive sanitization")

    # AS attributes come from any record mentioning the AS, best source first.
    as_nodes = {}
    by_asn: dict[int, list[MembershipRecord]] = {}
    for record in records:
        by_asn.setdefault(record.asn, []).append(record)
    for asn, group in by_asn.items():
        group = sorted(group, key=_record_priority)
        as_type = next((r.as_type for r in group if r.as_type is not None), None)
        pfx_count = next((r.as_prefix_count for r in group if r.as_prefix_count is not None), None)
        as_nodes[asn] = AsNode(
            asn=asn,
            as_type=as_type if as_type is not None else AsType.UNKNOWN,
            prefix_count=pfx_count,
        )

    ixp_nodes = {
        uid: IxpNode(
            ixp_id=uid,
            names=list(ident.names),
            peering_prefixes=list(ident.peering_prefixes),
            status=ident.status,
        )
        for uid, ident in identities.items()
        if uid not in bad_uids
    }

    graph = BipartiteGraph(ixps=ixp_nodes, ases=as_nodes, edges=edges)

    # (4) giant component
    giant = model.giant_component(graph)
    if giant.discarded_nodes or giant.discarded_edges:
        report.reasons[DiscardReason.NOT_IN_GIANT_COMPONENT] = ReasonTally(
            nodes=giant.discarded_nodes, edges=giant.discarded_edges
        )
    return giant.graph, report


def attach_attributes(
    graph: BipartiteGraph,
    as_types_path=None,
    locations_path=None,
) -> tuple[BipartiteGraph, int]:
    """Attach AS types and IXP locations from attribute CSVs.

    Rows naming an ASN or IXP id that is not in the graph are skipped;
    the returned count says how many rows were ignored (including
    malformed ones). Passing no files returns the graph unchanged.
    """
    warnings = 0
    ases = dict(graph.ases)
    ixps = dict(graph.ixps)

    if as_types_path is not None:
        for row in _read_csv(as_types_path, AS_TYPES_HEADER):
            if not any(f.strip() for f in row):
                continue
            try:
                asn = int(row[0].strip())
                as_type = AsType(row[1].strip())
            except (ValueError, IndexError):
                warnings += 1
                continue
            if asn not in ases:
                warnings += 1
                continue
            ases[asn] = replace(ases[asn], as_type=as_type)

    if locations_path is not None:
        for row in _read_csv(locations_path, LOCATIONS_HEADER):
            if not any(f.strip() for f in row):
                continue
            try:
                ixp_id, country, city, lat_raw, lon_raw = (f.strip() for f in row)
                location = Location(
                    country=country,
                    city=city,
                    lat=float(lat_raw) if lat_raw else None,
                    lon=float(lon_raw) if lon_raw else None,
                )
            except ValueError:
                warnings += 1
                continue
            if ixp_id not in ixps:
                warnings += 1
                continue
            ixps[ixp_id] = replace(ixps[ixp_id], location=location)

    return BipartiteGraph(ixps=ixps, ases=ases, edges=dict(graph.edges)), warnings


@dataclass
class BuildResult:
    graph: BipartiteGraph
    report: DiscardReport
    attribute_warnings: int


def build_from_files(
    pdb_path,
    pch_path,
    as_types_path=None,
    locations_path=None,
) -> BuildResult:
    """Full pipeline: parse both datasets, merge IXP identities, sanitize,
    and optionally attach attributes."""
    pdb = parse_dataset(pdb_path, Source.PDB)
    pch = parse_dataset(pch_path, Source.PCH)
    identities = merge_ixp_lists(pdb.records, pch.records)
    graph, report = sanitize(
        pdb.records + pch.records,
        identities,
        parse_errors=pdb.parse_errors + pch.parse_errors,
    )
    graph, warnings = attach_attributes(graph, as_types_path, locations_path)
    return BuildResult(graph=graph, report=report, attribute_warnings=warnings)
