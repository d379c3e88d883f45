"""Model types: validation, adjacency, degrees, giant component, policy."""

import pytest

from ixpgraph.errors import EmptyGraph, UnknownEndpoint, UnknownNode
from ixpgraph.model import (
    AsNode,
    AsType,
    BipartiteGraph,
    IxpNode,
    Location,
    MembershipEdge,
    PeeringRelation,
    PolicyLayer,
    Source,
    add_membership,
    build_graph,
    degree,
    giant_component,
    node_label,
)

from conftest import make_g0
from oracles import bf_degree


def pair_graph(*pairs):
    ixps = {x for x, _ in pairs}
    ases = {a for _, a in pairs}
    return build_graph(
        [IxpNode(x, [x]) for x in sorted(ixps)],
        [AsNode(a) for a in sorted(ases)],
        [MembershipEdge(x, a) for x, a in pairs],
    )


class TestNodeValidation:
    def test_asn_must_be_positive(self):
        with pytest.raises(ValueError):
            AsNode(0)
        with pytest.raises(ValueError):
            AsNode(-7)

    def test_prefix_count_derived_from_prefixes(self):
        node = AsNode(1, prefixes=["10.0.0.0/8", "192.0.2.0/24"])
        assert node.prefix_count == 2

    def test_prefix_count_conflict_rejected(self):
        with pytest.raises(ValueError):
            AsNode(1, prefix_count=3, prefixes=["10.0.0.0/8"])

    def test_negative_prefix_count_rejected(self):
        with pytest.raises(ValueError):
            AsNode(1, prefix_count=-1)

    def test_ixp_needs_a_name(self):
        with pytest.raises(ValueError):
            IxpNode("X1", names=[])

    def test_duplicate_peering_prefixes_rejected(self):
        with pytest.raises(ValueError):
            IxpNode("X1", ["X1"], peering_prefixes=["10.0.0.0/8", "10.0.0.0/8"])

    def test_edge_needs_sources(self):
        with pytest.raises(ValueError):
            MembershipEdge("X1", 1, sources=frozenset())

    def test_edge_sources_coerced_to_frozenset(self):
        edge = MembershipEdge("X1", 1, sources={Source.PDB})
        assert isinstance(edge.sources, frozenset)

    def test_location_defaults(self):
        loc = Location("DE", "Frankfurt")
        assert loc.lat is None and loc.lon is None


class TestBipartiteGraph:
    def test_edge_with_missing_endpoint_rejected(self):
        with pytest.raises(UnknownEndpoint):
            BipartiteGraph(
                ixps={"X1": IxpNode("X1", ["X1"])},
                ases={},
                edges={("X1", 1): MembershipEdge("X1", 1)},
            )

    def test_edge_key_field_mismatch_rejected(self):
        with pytest.raises(ValueError):
            BipartiteGraph(
                ixps={"X1": IxpNode("X1", ["X1"])},
                ases={1: AsNode(1)},
                edges={("X1", 1): MembershipEdge("X1", 2)},
            )

    def test_members_and_memberships(self, g0):
        assert g0.members("X1") == {1, 2, 3}
        assert g0.memberships(1) == {"X1", "X3"}
        with pytest.raises(UnknownNode):
            g0.members("X9")
        with pytest.raises(UnknownNode):
            g0.memberships(99)

    def test_counts(self, g0):
        assert g0.num_nodes == 7
        assert g0.num_edges == 7

    def test_bipartiteness_scan(self, g0):
        for (ixp_id, asn) in g0.edges:
            assert isinstance(ixp_id, str) and ixp_id in g0.ixps
            assert isinstance(asn, int) and asn in g0.ases


class TestAddMembership:
    def test_single_edge(self):
        graph = BipartiteGraph(ixps={"X1": IxpNode("X1", ["X1"])}, ases={1: AsNode(1)})
        add_membership(graph, MembershipEdge("X1", 1))
        assert graph.num_edges == 1

    def test_readd_merges_sources(self):
        graph = BipartiteGraph(ixps={"X1": IxpNode("X1", ["X1"])}, ases={1: AsNode(1)})
        add_membership(graph, MembershipEdge("X1", 1, sources={Source.PDB}))
        add_membership(graph, MembershipEdge("X1", 1, sources={Source.PCH}))
        assert graph.num_edges == 1
        assert graph.edges[("X1", 1)].sources == {Source.PDB, Source.PCH}

    def test_existing_member_ip_wins(self):
        graph = BipartiteGraph(ixps={"X1": IxpNode("X1", ["X1"])}, ases={1: AsNode(1)})
        add_membership(graph, MembershipEdge("X1", 1, member_ip="192.0.2.1"))
        add_membership(graph, MembershipEdge("X1", 1, member_ip="192.0.2.2"))
        assert graph.edges[("X1", 1)].member_ip == "192.0.2.1"

    def test_unknown_endpoint(self, g0):
        with pytest.raises(UnknownEndpoint):
            add_membership(g0, MembershipEdge("X9", 1))
        with pytest.raises(UnknownEndpoint):
            add_membership(g0, MembershipEdge("X1", 99))

    def test_adjacency_updated(self):
        graph = BipartiteGraph(
            ixps={"X1": IxpNode("X1", ["X1"])}, ases={1: AsNode(1), 2: AsNode(2)}
        )
        add_membership(graph, MembershipEdge("X1", 2))
        assert graph.members("X1") == {2}
        assert graph.memberships(2) == {"X1"}


class TestDegree:
    def test_g0_values(self, g0):
        assert degree(g0, "X1") == 3
        assert degree(g0, 1) == 2

    def test_isolated_vertex(self):
        graph = BipartiteGraph(ixps={"X1": IxpNode("X1", ["X1"])}, ases={1: AsNode(1)})
        assert degree(graph, "X1") == 0
        assert degree(graph, 1) == 0

    def test_unknown_node(self, g0):
        with pytest.raises(UnknownNode):
            degree(g0, "X9")

    def test_degree_sum_identity(self, g0):
        ixp_sum = sum(degree(g0, x) for x in g0.ixps)
        as_sum = sum(degree(g0, a) for a in g0.ases)
        assert ixp_sum == as_sum == g0.num_edges

    def test_matches_edge_scan_oracle(self, g0):
        for node in list(g0.ixps) + list(g0.ases):
            assert degree(g0, node) == bf_degree(g0, node)


class TestGiantComponent:
    def test_disconnected_pair_discarded(self):
        graph = make_g0()
        graph.ixps["X9"] = IxpNode("X9", ["X9"])
        graph.ases[9] = AsNode(9)
        graph = BipartiteGraph(ixps=graph.ixps, ases=graph.ases, edges=graph.edges)
        add_membership(graph, MembershipEdge("X9", 9))
        result = giant_component(graph)
        assert result.discarded_nodes == 2
        assert result.discarded_edges == 1
        assert set(result.graph.ixps) == {"X1", "X2", "X3"}
        assert set(result.graph.ases) == {1, 2, 3, 4}

    def test_connected_graph_unchanged(self, g0):
        result = giant_component(g0)
        assert (result.discarded_nodes, result.discarded_edges) == (0, 0)
        assert result.graph.num_edges == g0.num_edges

    def test_edge_count_tie_break(self):
        # Two 4-node components; the second carries 4 edges vs 3 and wins.
        graph = pair_graph(
            ("X1", 1), ("X1", 2), ("X2", 1),
            ("Y1", 11), ("Y1", 12), ("Y2", 11), ("Y2", 12),
        )
        result = giant_component(graph)
        assert set(result.graph.ixps) == {"Y1", "Y2"}
        assert result.discarded_nodes == 4
        assert result.discarded_edges == 3

    def test_label_tie_break(self):
        # Equal nodes and edges: the component containing the smallest
        # label ("5" sorts before "6" and either X id) is kept.
        graph = pair_graph(("X1", 5), ("X2", 6))
        result = giant_component(graph)
        assert set(result.graph.ases) == {5}

    def test_result_is_connected_and_maximal(self):
        graph = pair_graph(("X1", 1), ("X2", 1), ("X3", 3), ("X4", 4))
        result = giant_component(graph)
        kept = set(result.graph.ixps) | set(result.graph.ases)
        assert kept == {"X1", "X2", 1}
        # Maximality: no discarded node is adjacent to a kept one.
        for (x, a) in graph.edges:
            assert ((x in kept) == (a in kept))

    def test_empty_graph(self):
        with pytest.raises(EmptyGraph):
            giant_component(BipartiteGraph())


class TestPolicyLayer:
    def test_key_normalization_flips_direction(self):
        layer = PolicyLayer({(2, 1): PeeringRelation.CUSTOMER_TO_PROVIDER})
        assert layer.relation(1, 2) == PeeringRelation.PROVIDER_TO_CUSTOMER
        assert layer.relation(2, 1) == PeeringRelation.PROVIDER_TO_CUSTOMER

    def test_symmetric_relation_unchanged(self):
        layer = PolicyLayer({(3, 1): PeeringRelation.PEER_TO_PEER})
        assert layer.relations == {(1, 3): PeeringRelation.PEER_TO_PEER}

    def test_conflicting_relations_rejected(self):
        with pytest.raises(ValueError):
            PolicyLayer({
                (1, 2): PeeringRelation.PEER_TO_PEER,
                (2, 1): PeeringRelation.CUSTOMER_TO_PROVIDER,
            })

    def test_self_pair_rejected(self):
        with pytest.raises(ValueError):
            PolicyLayer({(1, 1): PeeringRelation.PEER_TO_PEER})

    def test_absent_pair_is_none(self):
        assert PolicyLayer().relation(1, 2) is None


def test_node_label():
    assert node_label("X1") == "X1"
    assert node_label(42) == "42"


def test_enum_values_are_strings():
    assert AsType.CONTENT.value == "Content"
    assert Source.PDB.value == "PDB"
