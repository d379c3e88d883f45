"""Shared fixtures: the G0 toy graph, random graph generators, CSV dataset
fixtures, and a paper-scale synthetic graph."""

from __future__ import annotations

import random

import pytest

from ixpgraph import serialization

from ixpgraph.model import (
    AsNode,
    AsType,
    BipartiteGraph,
    IxpNode,
    MembershipEdge,
    build_graph,
    giant_component,
)

# G0: the hand-checked toy fixture. IXPs X1..X3, ASes 1..4; A1 is at X1 and
# X3, A2 and A3 at X1 and X2, A4 at X2 only.
G0_MEMBERSHIPS = {1: ("X1", "X3"), 2: ("X1", "X2"), 3: ("X1", "X2"), 4: ("X2",)}


def make_g0(as_types: dict[int, AsType] | None = None,
            prefix_counts: dict[int, int] | None = None) -> BipartiteGraph:
    as_types = as_types or {}
    prefix_counts = prefix_counts or {}
    return build_graph(
        [IxpNode(f"X{i}", [f"Exchange {i}"]) for i in (1, 2, 3)],
        [
            AsNode(a, as_type=as_types.get(a, AsType.UNKNOWN),
                   prefix_count=prefix_counts.get(a))
            for a in (1, 2, 3, 4)
        ],
        [
            MembershipEdge(x, a)
            for a, ixps in G0_MEMBERSHIPS.items()
            for x in ixps
        ],
    )


G0_TYPES = {1: AsType.CONTENT, 2: AsType.ISP, 3: AsType.ISP, 4: AsType.ENTERPRISE}


@pytest.fixture
def g0() -> BipartiteGraph:
    return make_g0()


@pytest.fixture
def g0_typed() -> BipartiteGraph:
    return make_g0(as_types=G0_TYPES)


def random_bipartite(rng: random.Random, max_ixps: int = 50,
                     max_ases: int = 300) -> BipartiteGraph:
    """A random membership graph; may be disconnected and contain isolated
    vertices of either class."""
    n_ixp = rng.randint(1, max_ixps)
    n_as = rng.randint(1, max_ases)
    ixp_ids = [f"X{i}" for i in range(1, n_ixp + 1)]
    edges = set()
    for asn in range(1, n_as + 1):
        for ixp_id in rng.sample(ixp_ids, rng.randint(0, min(5, n_ixp))):
            edges.add((ixp_id, asn))
    return build_graph(
        [IxpNode(x, [x]) for x in ixp_ids],
        [AsNode(a) for a in range(1, n_as + 1)],
        [MembershipEdge(x, a) for x, a in sorted(edges)],
    )


@pytest.fixture
def g0_file(tmp_path):
    """G0 written as a canonical graph file, for CLI-level tests."""
    path = tmp_path / "g0.json"
    serialization.write_graph(make_g0(), path)
    return path


DATASET_HEADER = ("source,ixp_key,ixp_name,ixp_prefixes,asn,"
                  "member_ip,status,as_type,as_prefix_count")


def write_membership_csv(path, rows):
    path.write_text("\n".join([DATASET_HEADER, *rows]) + "\n", encoding="utf-8")
    return path


def sanitize_fixture_files(dirpath):
    """Dataset pair exercising every sanitization stage exactly once.

    Metro One appears in both sources (merged by prefix containment and by
    normalized name) with one IP-inconsistent edge and one cross-source
    duplicate; Bad Exchange is inactive; Lone Exchange hangs off the giant
    component as an isolated 2-node pair.
    """
    pdb = write_membership_csv(dirpath / "pdb.csv", [
        "PDB,m1,Metro One,192.0.2.0/24,65001,192.0.2.10,Active,ISP,120",
        "PDB,m1,Metro One,192.0.2.0/24,65002,192.0.2.11,Active,Content,300",
        "PDB,m1,Metro One,192.0.2.0/24,65003,10.0.0.5,Active,,",
        "PDB,m2,Metro Two,198.51.100.0/24,65003,198.51.100.3,Active,Enterprise,12",
        "PDB,m2,Metro Two,198.51.100.0/24,65001,,Active,ISP,120",
        "PDB,x9,Lone Exchange,203.0.113.0/24,65009,203.0.113.9,Active,,",
    ])
    pch = write_membership_csv(dirpath / "pch.csv", [
        "PCH,77,METRO-ONE,192.0.2.0/25,65002,192.0.2.11,Active,,",
        "PCH,88,Bad Exchange,192.0.113.0/24,65001,192.0.113.2,Inactive,,",
    ])
    return pdb, pch


def paper_scale_graph(seed: int = 42, n_ixp: int = 500,
                      n_as: int = 4700) -> BipartiteGraph:
    """Synthetic graph matched to the published dataset's scale: about 500
    IXPs, 4,700 ASes, 15,000 membership edges, with roughly 43% of ASes at
    degree 1 and a heavy-tailed remainder."""
    rng = random.Random(seed)
    degrees = []
    for _ in range(n_as):
        if rng.random() < 0.43:
            degrees.append(1)
        else:
            degrees.append(min(2 + int(rng.paretovariate(1.35)), 350))
    # Zipf-ish popularity so a few IXPs are very large, as in the data.
    weights = [1.0 / (i + 1) ** 0.8 for i in range(n_ixp)]
    ixp_ids = [f"IXP{i:04d}" for i in range(1, n_ixp + 1)]
    edges = set()
    for asn, deg in enumerate(degrees, start=1):
        chosen: set[int] = set()
        deg = min(deg, n_ixp)
        while len(chosen) < deg:
            chosen.update(rng.choices(range(n_ixp), weights=weights, k=deg - len(chosen)))
        for i in chosen:
            edges.add((ixp_ids[i], asn))
    graph = build_graph(
        [IxpNode(x, [x]) for x in ixp_ids],
        [AsNode(a) for a in range(1, n_as + 1)],
        [MembershipEdge(x, a) for x, a in sorted(edges)],
    )
    return giant_component(graph).graph
