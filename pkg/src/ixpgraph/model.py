"""Attributed graph types for the IXP-membership view of the Internet.

The central structure is the :class:`BipartiteGraph`: IXP vertices on one
side, AS vertices on the other, and membership edges only. Projections of
it onto a single vertex class are :class:`Multigraph` instances, with one
parallel edge per shared neighbor.

Graphs are treated as immutable once construction finishes; concurrent
readers are safe, construction is single-writer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Union

from .errors import EmptyGraph, UnknownEndpoint, UnknownNode

NodeId = Union[str, int]


class AsType(str, Enum):
    CONTENT = "Content"
    ENTERPRISE = "Enterprise"
    ISP = "ISP"
    UNKNOWN = "Unknown"


class IxpStatus(str, Enum):
    ACTIVE = "Active"
    INACTIVE = "Inactive"
    NOT_APPROVED = "NotApproved"


class Source(str, Enum):
    PDB = "PDB"
    PCH = "PCH"
    OTHER = "Other"


class NodeClass(str, Enum):
    IXP = "IXP"
    AS = "AS"


class PeeringRelation(str, Enum):
    PEER_TO_PEER = "PeerToPeer"
    CUSTOMER_TO_PROVIDER = "CustomerToProvider"
    PROVIDER_TO_CUSTOMER = "ProviderToCustomer"
    UNKNOWN = "Unknown"


class Location(NamedTuple):
    country: str
    city: str
    lat: float | None = None
    lon: float | None = None


@dataclass
class AsNode:
    """An autonomous system vertex.

    ``prefix_count`` is the total number of announced IP prefixes; ``None``
    means unknown. When the explicit ``prefixes`` list is given the count is
    derived from it, and a conflicting explicit count is rejected.
    """

    asn: int
    as_type: AsType = AsType.UNKNOWN
    prefix_count: int | None = None
    prefixes: list[str] | None = None

    def __post_init__(self):
        if self.asn <= 0:
            raise ValueError(f"asn must be positive, got {self.asn}")
        if self.prefix_count is not None and self.prefix_count < 0:
            raise ValueError("prefix_count must be non-negative")
        if self.prefixes is not None:
            if self.prefix_count is None:
                self.prefix_count = len(self.prefixes)
            elif self.prefix_count != len(self.prefixes):
                raise ValueError(
                    f"prefix_count {self.prefix_count} != len(prefixes) {len(self.prefixes)}"
                )


@dataclass
class IxpNode:
    """An Internet eXchange Point vertex.

    ``names`` holds one display name per source dataset (at least one).
    ``peering_prefixes`` are the CIDR blocks of the IXP's peering LAN.
    """

    ixp_id: str
    names: list[str]
    peering_prefixes: list[str] = field(default_factory=list)
    location: Location | None = None
    status: IxpStatus = IxpStatus.ACTIVE

    def __post_init__(self):
        if not self.names:
            raise ValueError(f"IXP {self.ixp_id!r} needs at least one name")
        if len(set(self.peering_prefixes)) != len(self.peering_prefixes):
            raise ValueError(f"IXP {self.ixp_id!r} has duplicate peering prefixes")


@dataclass
class MembershipEdge:
    """One IXP-AS membership. Parallel edges per (ixp_id, asn) are forbidden;
    the same membership seen in several datasets merges its ``sources`` set."""

    ixp_id: str
    asn: int
    member_ip: str | None = None
    sources: frozenset[Source] = frozenset({Source.OTHER})

    def __post_init__(self):
        self.sources = frozenset(self.sources)
        if not self.sources:
            raise ValueError("membership edge needs a non-empty sources set")


@dataclass
class BipartiteGraph:
    """The IXP-AS membership graph.

    Vertex classes live in disjoint key spaces (string ixp_id vs integer
    asn), so AS-AS or IXP-IXP edges cannot even be represented. Edges are
    keyed by (ixp_id, asn), which enforces membership-level uniqueness.
    """

    ixps: dict[str, IxpNode] = field(default_factory=dict)
    ases: dict[int, AsNode] = field(default_factory=dict)
    edges: dict[tuple[str, int], MembershipEdge] = field(default_factory=dict)

    # Adjacency caches, derived from edges.
    _ixp_members: dict[str, set[int]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )
    _as_memberships: dict[int, set[str]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self):
        self._ixp_members = {ixp_id: set() for ixp_id in self.ixps}
        self._as_memberships = {asn: set() for asn in self.ases}
        for (ixp_id, asn), edge in self.edges.items():
            if ixp_id not in self.ixps or asn not in self.ases:
                raise UnknownEndpoint(f"edge ({ixp_id!r}, {asn}) references a missing vertex")
            if (edge.ixp_id, edge.asn) != (ixp_id, asn):
                raise ValueError(f"edge keyed ({ixp_id!r}, {asn}) disagrees with its fields")
            self._ixp_members[ixp_id].add(asn)
            self._as_memberships[asn].add(ixp_id)

    @property
    def num_nodes(self) -> int:
        return len(self.ixps) + len(self.ases)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def members(self, ixp_id: str) -> set[int]:
        """ASNs with a membership at the given IXP."""
        try:
            return self._ixp_members[ixp_id]
        except KeyError:
            raise UnknownNode(f"unknown IXP {ixp_id!r}") from None

    def memberships(self, asn: int) -> set[str]:
        """IXP ids the given AS is a member of."""
        try:
            return self._as_memberships[asn]
        except KeyError:
            raise UnknownNode(f"unknown AS {asn}") from None


@dataclass
class Multigraph:
    """Projection of a BipartiteGraph onto one vertex class.

    ``edges`` maps a canonically ordered node pair (u < v) to the set of
    shared-neighbor ids from the opposite class; the pair's multiplicity is
    the size of that set.
    """

    node_class: NodeClass
    nodes: set = field(default_factory=set)
    edges: dict[tuple, frozenset] = field(default_factory=dict)

    @property
    def num_parallel_edges(self) -> int:
        """Total edge count with parallel edges counted individually."""
        return sum(len(vias) for vias in self.edges.values())


def policy_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass
class PolicyLayer:
    """Peering-relation annotations over unordered AS pairs.

    Each relation is stored once per pair under the (min, max) key;
    directionality is carried by the enum value relative to that order.
    """

    relations: dict[tuple[int, int], PeeringRelation] = field(default_factory=dict)

    def __post_init__(self):
        normalized = {}
        for (a, b), rel in self.relations.items():
            if a == b:
                raise ValueError(f"policy pair ({a}, {b}) is not a pair")
            key = policy_key(a, b)
            if key != (a, b):
                # Flip the asymmetric relations along with the key order.
                if rel is PeeringRelation.CUSTOMER_TO_PROVIDER:
                    rel = PeeringRelation.PROVIDER_TO_CUSTOMER
                elif rel is PeeringRelation.PROVIDER_TO_CUSTOMER:
                    rel = PeeringRelation.CUSTOMER_TO_PROVIDER
            if key in normalized and normalized[key] != rel:
                raise ValueError(f"conflicting relations for pair {key}")
            normalized[key] = rel
        self.relations = normalized

    def relation(self, a: int, b: int) -> PeeringRelation | None:
        return self.relations.get(policy_key(a, b))


def node_label(node_id: NodeId) -> str:
    """Canonical string label of a vertex (ixp_id as-is, asn in decimal)."""
    return node_id if isinstance(node_id, str) else str(node_id)


def add_membership(graph: BipartiteGraph, edge: MembershipEdge) -> BipartiteGraph:
    """Add a membership edge; re-adding an existing (ixp_id, asn) pair merges
    the sources sets instead of duplicating.

    Raises UnknownEndpoint if either vertex is absent. When merging, an
    already recorded member_ip wins over the incoming one.
    """
    if edge.ixp_id not in graph.ixps:
        raise UnknownEndpoint(f"unknown IXP {edge.ixp_id!r}")
    if edge.asn not in graph.ases:
        raise UnknownEndpoint(f"unknown AS {edge.asn}")
    key = (edge.ixp_id, edge.asn)
    existing = graph.edges.get(key)
    if existing is None:
        graph.edges[key] = edge
        graph._ixp_members[edge.ixp_id].add(edge.asn)
        graph._as_memberships[edge.asn].add(edge.ixp_id)
    else:
        existing.sources = existing.sources | edge.sources
        if existing.member_ip is None:
            existing.member_ip = edge.member_ip
    return graph


def degree(graph: BipartiteGraph, node_id: NodeId) -> int:
    """Number of incident membership edges: AS-member count for an IXP node,
    IXP-membership count for an AS node."""
    if isinstance(node_id, str):
        return len(graph.members(node_id))
    return len(graph.memberships(node_id))


def _connected_components(graph: BipartiteGraph) -> list[set[NodeId]]:
    unvisited: set[NodeId] = set(graph.ixps) | set(graph.ases)
    components = []
    while unvisited:
        start = next(iter(unvisited))
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for v in frontier:
                neighbors = graph.members(v) if isinstance(v, str) else graph.memberships(v)
                for w in neighbors:
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        components.append(seen)
        unvisited -= seen
    return components


class GiantComponent(NamedTuple):
    graph: BipartiteGraph
    discarded_nodes: int
    discarded_edges: int


def giant_component(graph: BipartiteGraph) -> GiantComponent:
    """Induced subgraph on the largest connected component.

    Largest by vertex count; ties broken by larger edge count, then by the
    lexicographically smallest contained node label, so the result is
    deterministic. Also reports how many nodes and edges were discarded.
    """
    if graph.num_nodes == 0:
        raise EmptyGraph("graph has no vertices")

    def edge_count(nodes: set[NodeId]) -> int:
        return sum(
            len(graph.members(v)) for v in nodes if isinstance(v, str)
        )

    best = min(
        _connected_components(graph),
        key=lambda c: (-len(c), -edge_count(c), min(node_label(v) for v in c)),
    )
    kept_ixps = {i: n for i, n in graph.ixps.items() if i in best}
    kept_ases = {a: n for a, n in graph.ases.items() if a in best}
    kept_edges = {
        key: e for key, e in graph.edges.items() if key[0] in best and key[1] in best
    }
    sub = BipartiteGraph(ixps=kept_ixps, ases=kept_ases, edges=kept_edges)
    return GiantComponent(
        graph=sub,
        discarded_nodes=graph.num_nodes - sub.num_nodes,
        discarded_edges=graph.num_edges - sub.num_edges,
    )


def build_graph(
    ixps: Iterable[IxpNode],
    ases: Iterable[AsNode],
    memberships: Iterable[MembershipEdge],
) -> BipartiteGraph:
    """Convenience constructor from node and edge iterables."""
    graph = BipartiteGraph(
        ixps={n.ixp_id: n for n in ixps},
        ases={n.asn: n for n in ases},
    )
    for edge in memberships:
        add_membership(graph, edge)
    return graph
