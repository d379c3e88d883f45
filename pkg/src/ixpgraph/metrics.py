"""Topological metrics over the bipartite graph and its projections.

Covers degree distributions, per-IXP member-type composition, AS-type
shares by degree threshold, IXPs crossed by AS-to-AS shortest paths,
projection edge-multiplicity histograms, remote-peering gains, the
degree-vs-prefix correlation, and generic centrality/clustering metrics.
"""

from __future__ import annotations

import multiprocessing
import random
import statistics
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import networkx as nx

from .errors import Disconnected, EmptyGraph, InsufficientData, NotColocated
from .model import AsType, BipartiteGraph, Multigraph, NodeClass


@dataclass(frozen=True)
class Distribution:
    """A histogram: sorted (value, count) pairs plus the population total."""

    values: tuple[tuple[float, int], ...]
    total: int

    def __post_init__(self):
        if sum(c for _, c in self.values) != self.total:
            raise ValueError("distribution counts do not sum to total")
        vs = [v for v, _ in self.values]
        if any(a >= b for a, b in zip(vs, vs[1:])):
            raise ValueError("distribution values must be strictly increasing")

    @classmethod
    def from_counts(cls, counts: dict) -> "Distribution":
        items = tuple(sorted((v, c) for v, c in counts.items() if c))
        return cls(values=items, total=sum(c for _, c in items))

    def fraction(self, value) -> float:
        for v, c in self.values:
            if v == value:
                return c / self.total if self.total else 0.0
        return 0.0

    def cdf(self) -> list[tuple[float, float]]:
        """Running cumulative fractions, one entry per distinct value."""
        out = []
        acc = 0
        for v, c in self.values:
            acc += c
            out.append((v, acc / self.total))
        return out

    def bucket_tail(self, tail_min: int) -> list[tuple[str, int]]:
        """Collapse all values >= tail_min into one presentation bucket."""
        head = [(str(v), c) for v, c in self.values if v < tail_min]
        tail = sum(c for v, c in self.values if v >= tail_min)
        if tail:
            head.append((f">={tail_min}", tail))
        return head


class TypeFractions(NamedTuple):
    content: float
    enterprise: float
    isp: float


@dataclass(frozen=True)
class TypeShareRow:
    label: str
    content: float
    enterprise: float
    isp: float


@dataclass(frozen=True)
class TypeShareTable:
    rows: tuple[TypeShareRow, ...]


def degree_distribution(graph: BipartiteGraph, node_class: NodeClass) -> Distribution:
    """Degree histogram over one vertex class of the bipartite graph."""
    if graph.num_nodes == 0:
        raise EmptyGraph("graph has no vertices")
    if node_class is NodeClass.IXP:
        degrees = [len(graph.members(i)) for i in graph.ixps]
    else:
        degrees = [len(graph.memberships(a)) for a in graph.ases]
    return Distribution.from_counts(Counter(degrees))


def member_type_fractions(graph: BipartiteGraph) -> dict[str, TypeFractions]:
    """Per-IXP fractions of members that are content, enterprise, or ISP ASes.

    Unknown-typed members count toward the denominator only, so the three
    fractions may sum to less than one.
    """
    if graph.num_nodes == 0:
        raise EmptyGraph("graph has no vertices")
    out = {}
    for ixp_id in graph.ixps:
        members = graph.members(ixp_id)
        total = len(members)
        if total == 0:
            out[ixp_id] = TypeFractions(0.0, 0.0, 0.0)
            continue
        counts = Counter(graph.ases[a].as_type for a in members)
        out[ixp_id] = TypeFractions(
            content=counts[AsType.CONTENT] / total,
            enterprise=counts[AsType.ENTERPRISE] / total,
            isp=counts[AsType.ISP] / total,
        )
    return out


def type_fraction_distribution(graph: BipartiteGraph, as_type: AsType) -> Distribution:
    """Distribution over IXPs of the member fraction of one AS type."""
    fractions = member_type_fractions(graph)
    index = {AsType.CONTENT: 0, AsType.ENTERPRISE: 1, AsType.ISP: 2}[as_type]
    return Distribution.from_counts(Counter(f[index] for f in fractions.values()))


def type_share_by_degree(graph: BipartiteGraph, thresholds: Iterable[int]) -> TypeShareTable:
    """AS-type shares among ASes above each degree threshold.

    Threshold 0 is the "All ASes" row and uses every AS regardless of
    degree; threshold t > 0 restricts to ASes with degree > t. Shares are
    typed-count / subset size, with Unknown excluded from numerators.
    """
    if graph.num_nodes == 0:
        raise EmptyGraph("graph has no vertices")
    rows = []
    for t in thresholds:
        if t == 0:
            subset = list(graph.ases)
            label = "All ASes"
        else:
            subset = [a for a in graph.ases if len(graph.memberships(a)) > t]
            label = f"ASes with degree >{t}"
        total = len(subset)
        counts = Counter(graph.ases[a].as_type for a in subset)
        rows.append(
            TypeShareRow(
                label=label,
                content=counts[AsType.CONTENT] / total if total else 0.0,
                enterprise=counts[AsType.ENTERPRISE] / total if total else 0.0,
                isp=counts[AsType.ISP] / total if total else 0.0,
            )
        )
    return TypeShareTable(rows=tuple(rows))


def _indexed_adjacency(graph: BipartiteGraph) -> tuple[list[set[int]], int]:
    """Adjacency over integer node ids with ASes first (0..n_as-1), IXPs after.

    The AS block is sorted by asn and the IXP block by ixp_id, so the
    indexing is deterministic.
    """
    asns = sorted(graph.ases)
    ixp_ids = sorted(graph.ixps)
    as_index = {a: i for i, a in enumerate(asns)}
    n_as = len(asns)
    ixp_index = {x: n_as + i for i, x in enumerate(ixp_ids)}
    adj: list[set[int]] = [set() for _ in range(n_as + len(ixp_ids))]
    for ixp_id, asn in graph.edges:
        ai, xi = as_index[asn], ixp_index[ixp_id]
        adj[ai].add(xi)
        adj[xi].add(ai)
    return adj, n_as


def _ixp_count_tally(adj: list[set[int]], n_as: int, source: int,
                     counted: list[bool] | None) -> Counter:
    """Level-synchronous BFS from one AS; tallies IXPs crossed per AS target.

    In the bipartite graph every AS sits at an even distance and every IXP
    at an odd one, so IXPs crossed is distance // 2. Each unordered pair is
    tallied once: all targets when ``counted`` is None (full enumeration,
    restricted to target > source), otherwise targets that are either not
    in the counted source set or have a larger index.

    Raises Disconnected if some AS is unreachable from the source.
    """
    tally: Counter = Counter()
    seen = {source}
    frontier = {source}
    reached_as = 1
    dist = 0
    while frontier:
        dist += 1
        nxt = set().union(*(adj[v] for v in frontier))
        nxt -= seen
        seen |= nxt
        frontier = nxt
        if dist % 2 == 0 and nxt:
            crossed = dist // 2
            hits = 0
            for t in nxt:
                if t < n_as:
                    reached_as += 1
                    if counted is None:
                        if t > source:
                            hits += 1
                    elif not counted[t] or t > source:
                        hits += 1
            if hits:
                tally[crossed] += hits
    if reached_as < n_as:
        raise Disconnected(
            f"{n_as - reached_as} AS nodes unreachable from source index {source}"
        )
    return tally


_POOL_ADJ: list[set[int]] | None = None
_POOL_ARGS: tuple[int, list[bool] | None] | None = None


def _pool_init(adj, n_as, counted):
    global _POOL_ADJ, _POOL_ARGS
    _POOL_ADJ = adj
    _POOL_ARGS = (n_as, counted)


def _pool_tally(source: int) -> Counter:
    n_as, counted = _POOL_ARGS
    return _ixp_count_tally(_POOL_ADJ, n_as, source, counted)


def shortest_path_ixp_counts(
    graph: BipartiteGraph,
    sample_size: int | None = None,
    seed: int = 42,
    threads: int | None = None,
) -> Distribution:
    """Distribution of the number of IXPs crossed by AS-to-AS shortest paths.

    By default every unordered AS pair is enumerated exactly. With
    ``sample_size`` set, BFS runs only from a seeded uniform sample of
    source ASes and tallies each unordered pair touching the sample once;
    a sample covering all ASes reproduces the full enumeration exactly.

    ``threads`` > 1 distributes the per-source searches over worker
    processes; the aggregate is order-independent, so the result does not
    depend on the worker count.
    """
    if graph.num_nodes == 0:
        raise EmptyGraph("graph has no vertices")
    adj, n_as = _indexed_adjacency(graph)
    if n_as < 2:
        return Distribution.from_counts({})

    if sample_size is None or sample_size >= n_as:
        sources = list(range(n_as))
        counted = None
    else:
        if sample_size <= 0:
            raise ValueError("sample_size must be positive")
        rng = random.Random(seed)
        sources = sorted(rng.sample(range(n_as), sample_size))
        counted = [False] * n_as
        for s in sources:
            counted[s] = True

    tally: Counter = Counter()
    if threads is not None and threads > 1 and len(sources) > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(
            processes=min(threads, len(sources)),
            initializer=_pool_init,
            initargs=(adj, n_as, counted),
        ) as pool:
            chunk = max(1, len(sources) // (4 * threads))
            for part in pool.imap_unordered(_pool_tally, sources, chunksize=chunk):
                tally.update(part)
    else:
        for s in sources:
            tally.update(_ixp_count_tally(adj, n_as, s, counted))
    return Distribution.from_counts(tally)


def multiplicity_distribution(mg: Multigraph) -> Distribution:
    """Edge-multiplicity histogram over all unordered node pairs of the
    class, multiplicity-0 pairs included."""
    n = len(mg.nodes)
    total_pairs = n * (n - 1) // 2
    counts = Counter(len(vias) for vias in mg.edges.values())
    zero = total_pairs - sum(counts.values())
    if zero:
        counts[0] = zero
    return Distribution.from_counts(counts)


def _reach(graph: BipartiteGraph, asn: int) -> set[int]:
    """All ASes present at any of the given AS's IXPs (itself included)."""
    out: set[int] = set()
    for ixp_id in graph.memberships(asn):
        out |= graph.members(ixp_id)
    return out


def remote_peering_gain(graph: BipartiteGraph, a: int, b: int) -> int:
    """New neighbors AS ``a`` gains by tunneling through co-located AS ``b``.

    Counts the ASes present at b's IXPs that a cannot already reach at its
    own IXPs, excluding a and b themselves. Asymmetric in (a, b).
    """
    if a == b:
        raise ValueError("remote peering needs two distinct ASes")
    if not (graph.memberships(a) & graph.memberships(b)):
        raise NotColocated(f"ASes {a} and {b} share no IXP")
    gained = _reach(graph, b) - _reach(graph, a)
    gained.discard(a)
    gained.discard(b)
    return len(gained)


def remote_peering_gain_cdf(graph: BipartiteGraph) -> Distribution:
    """Gain distribution over all ordered co-located AS pairs."""
    reach = {asn: _reach(graph, asn) for asn in graph.ases}
    tally: Counter = Counter()
    for a in graph.ases:
        for b in reach[a]:
            if b == a:
                continue
            gained = reach[b] - reach[a]
            gained.discard(a)
            gained.discard(b)
            tally[len(gained)] += 1
    return Distribution.from_counts(tally)


def degree_prefix_correlation(graph: BipartiteGraph) -> float:
    """Pearson correlation between AS degree and announced-prefix count,
    over the ASes whose prefix count is known."""
    points = [
        (len(graph.memberships(a)), node.prefix_count)
        for a, node in graph.ases.items()
        if node.prefix_count is not None
    ]
    if len(points) < 2:
        raise InsufficientData(f"need at least 2 ASes with prefix data, have {len(points)}")
    xs = [float(x) for x, _ in points]
    ys = [float(y) for _, y in points]
    try:
        return statistics.correlation(xs, ys)
    except statistics.StatisticsError as exc:
        raise InsufficientData(str(exc)) from None


def _simple_graph(mg: Multigraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(mg.nodes)
    g.add_edges_from(mg.edges)
    return g


def betweenness_centrality(mg: Multigraph) -> dict:
    """Normalized betweenness centrality on the multigraph collapsed to
    simple edges (normalization (n-1)(n-2)/2 for undirected graphs)."""
    if not mg.nodes:
        raise EmptyGraph("multigraph has no nodes")
    return dict(nx.betweenness_centrality(_simple_graph(mg), normalized=True))


def clustering_coefficient(mg: Multigraph) -> dict:
    """Local clustering coefficient on the multigraph collapsed to simple
    edges."""
    if not mg.nodes:
        raise EmptyGraph("multigraph has no nodes")
    return dict(nx.clustering(_simple_graph(mg)))


__all__ = [
    "Distribution",
    "TypeFractions",
    "TypeShareRow",
    "TypeShareTable",
    "degree_distribution",
    "member_type_fractions",
    "type_fraction_distribution",
    "type_share_by_degree",
    "shortest_path_ixp_counts",
    "multiplicity_distribution",
    "remote_peering_gain",
    "remote_peering_gain_cdf",
    "degree_prefix_correlation",
    "betweenness_centrality",
    "clustering_coefficient",
]
