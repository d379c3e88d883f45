"""Projections of the bipartite graph onto a single vertex class."""

from __future__ import annotations

from itertools import combinations

from .errors import EmptyGraph, UnknownNode, WrongNodeClass
from .model import BipartiteGraph, Multigraph, NodeClass, PeeringRelation, PolicyLayer


def project(graph: BipartiteGraph, node_class: NodeClass) -> Multigraph:
    """Project the bipartite graph onto the chosen vertex class.

    For the IXP class, IXPs i and j get one parallel edge per AS that is a
    member of both; the AS class swaps the roles. Nodes of the class appear
    even when isolated in the projection, so pair-based statistics keep the
    full denominator.
    """
    if graph.num_nodes == 0:
        raise EmptyGraph("cannot project an empty graph")
    if node_class is NodeClass.IXP:
        nodes = set(graph.ixps)
        via_neighbors = [(asn, graph.memberships(asn)) for asn in graph.ases]
    else:
        nodes = set(graph.ases)
        via_neighbors = [(ixp_id, graph.members(ixp_id)) for ixp_id in graph.ixps]

    edges: dict[tuple, set] = {}
    for via, shared in via_neighbors:
        for u, v in combinations(sorted(shared), 2):
            edges.setdefault((u, v), set()).add(via)
    return Multigraph(
        node_class=node_class,
        nodes=nodes,
        edges={pair: frozenset(vias) for pair, vias in edges.items()},
    )


def multiplicity(mg: Multigraph, u, v) -> int:
    """Number of parallel edges between u and v; 0 if unconnected, and 0 for
    (u, u) since projections have no self-loops."""
    if u not in mg.nodes:
        raise UnknownNode(f"unknown node {u!r}")
    if v not in mg.nodes:
        raise UnknownNode(f"unknown node {v!r}")
    if u == v:
        return 0
    pair = (u, v) if u < v else (v, u)
    return len(mg.edges.get(pair, ()))


def apply_policy(
    mg: Multigraph, policy: PolicyLayer, keep_unknown: bool = False
) -> tuple[Multigraph, int]:
    """Filter an AS multigraph down to pairs with a peering relation.

    By default only pairs with a confirmed relation (peer-to-peer or either
    transit direction) survive; pairs that are absent from the layer or
    explicitly Unknown are dropped. With ``keep_unknown`` those pairs are
    retained as well. Returns the filtered multigraph and the number of
    parallel edges dropped.
    """
    if mg.node_class is not NodeClass.AS:
        raise WrongNodeClass("policy filtering applies to AS multigraphs only")
    kept = {}
    dropped = 0
    for (a, b), vias in mg.edges.items():
        rel = policy.relation(a, b)
        confirmed = rel is not None and rel is not PeeringRelation.UNKNOWN
        if confirmed or keep_unknown:
            kept[(a, b)] = vias
        else:
            dropped += len(vias)
    return Multigraph(node_class=NodeClass.AS, nodes=set(mg.nodes), edges=kept), dropped
