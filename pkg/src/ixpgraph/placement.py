"""IXP selection and placement as coverage optimization.

Middlebox deployment, remote-peering reseller choice, and new-site
selection all reduce to picking IXPs that cover target ASes. The solvers
here are the classic deterministic greedy approximations plus an
exhaustive oracle for small instances, so solution quality is checkable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping

from . import metrics
from .errors import NoLocationData, TooLarge, Uncoverable, UnknownNode, UnknownTarget
from .model import BipartiteGraph

EXHAUSTIVE_CANDIDATE_LIMIT = 20


@dataclass(frozen=True)
class CoverageInstance:
    """A coverage problem: target ASes, candidate IXPs with the subset each
    covers, per-IXP deployment costs, and per-AS customer weights."""

    universe: frozenset[int]
    candidates: dict[str, frozenset[int]] = field(default_factory=dict)
    cost: dict[str, float] = field(default_factory=dict)
    weight: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        for ixp_id, subset in self.candidates.items():
            if not subset <= self.universe:
                raise ValueError(f"candidate {ixp_id!r} covers non-universe elements")
            if ixp_id not in self.cost:
                raise ValueError(f"candidate {ixp_id!r} has no cost")
        for asn in self.universe:
            if asn not in self.weight:
                raise ValueError(f"universe element {asn} has no weight")
        if any(c <= 0 for c in self.cost.values()):
            raise ValueError("costs must be positive")
        if any(w <= 0 for w in self.weight.values()):
            raise ValueError("weights must be positive")


@dataclass(frozen=True)
class PlacementSolution:
    chosen: tuple[str, ...]
    covered: frozenset[int]
    total_cost: float
    total_weight: float


def _solution(instance: CoverageInstance, chosen: Iterable[str]) -> PlacementSolution:
    chosen = tuple(chosen)
    covered = frozenset().union(*(instance.candidates[c] for c in chosen)) if chosen else frozenset()
    return PlacementSolution(
        chosen=chosen,
        covered=covered,
        total_cost=sum(instance.cost[c] for c in chosen),
        total_weight=sum(instance.weight[a] for a in covered),
    )


def build_instance(
    graph: BipartiteGraph,
    targets: Iterable[int],
    costs: Mapping[str, float] | None = None,
    weights: Mapping[int, float] | None = None,
) -> CoverageInstance:
    """Coverage instance over a graph: candidates are the IXPs hosting at
    least one target; absent costs and weights default to 1.0."""
    universe = frozenset(targets)
    missing = sorted(a for a in universe if a not in graph.ases)
    if missing:
        raise UnknownTarget(f"targets not in graph: {', '.join(map(str, missing))}")
    costs = dict(costs or {})
    weights = dict(weights or {})
    candidates = {}
    for ixp_id in graph.ixps:
        covered = frozenset(graph.members(ixp_id) & universe)
        if covered:
            candidates[ixp_id] = covered
    return CoverageInstance(
        universe=universe,
        candidates=candidates,
        cost={c: float(costs.get(c, 1.0)) for c in candidates},
        weight={a: float(weights.get(a, 1.0)) for a in universe},
    )


def greedy_set_cover(instance: CoverageInstance) -> PlacementSolution:
    """Cost-effectiveness greedy cover of the whole universe.

    Each round picks the candidate minimizing cost per newly covered
    weight; ties go to the larger newly covered weight, then to the
    lexicographically smallest ixp_id, making the pick order total.
    """
    coverable = frozenset().union(*instance.candidates.values()) if instance.candidates else frozenset()
    residue = instance.universe - coverable
    if residue:
        raise Uncoverable(residue)

    chosen = []
    covered: set[int] = set()
    while covered != instance.universe:
        best = None
        best_key = None
        for ixp_id, subset in instance.candidates.items():
            new_weight = sum(instance.weight[a] for a in subset - covered)
            if new_weight <= 0:
                continue
            key = (instance.cost[ixp_id] / new_weight, -new_weight, ixp_id)
            if best_key is None or key < best_key:
                best, best_key = ixp_id, key
        chosen.append(best)
        covered |= instance.candidates[best]
    return _solution(instance, chosen)


def budgeted_max_coverage(instance: CoverageInstance, budget: float) -> PlacementSolution:
    """Maximize covered weight without exceeding the budget.

    Runs the weight-per-cost greedy under the budget and separately
    considers the single affordable candidate of maximum weight, returning
    the heavier of the two (the standard (1 - 1/e)/2 approximation
    scheme). A budget too small for any candidate yields an empty
    solution.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")

    chosen = []
    covered: set[int] = set()
    remaining = budget
    while True:
        best = None
        best_key = None
        for ixp_id, subset in instance.candidates.items():
            if ixp_id in chosen or instance.cost[ixp_id] > remaining:
                continue
            new_weight = sum(instance.weight[a] for a in subset - covered)
            if new_weight <= 0:
                continue
            key = (-new_weight / instance.cost[ixp_id], -new_weight, ixp_id)
            if best_key is None or key < best_key:
                best, best_key = ixp_id, key
        if best is None:
            break
        chosen.append(best)
        covered |= instance.candidates[best]
        remaining -= instance.cost[best]
    greedy = _solution(instance, chosen)

    singles = [
        ixp_id for ixp_id in instance.candidates if instance.cost[ixp_id] <= budget
    ]
    if singles:
        best_single = min(
            singles,
            key=lambda c: (-sum(instance.weight[a] for a in instance.candidates[c]), c),
        )
        single = _solution(instance, [best_single])
        if single.total_weight > greedy.total_weight:
            return single
    return greedy


def exhaustive_cover_oracle(
    instance: CoverageInstance, budget: float | None = None
) -> PlacementSolution:
    """Optimal solution by subset enumeration; guard-railed to at most
    20 candidates.

    Without a budget: the minimum-cost full cover (ties: fewer sets, then
    lexicographic). With a budget: the maximum-weight selection within it
    (ties: lower cost, then lexicographic). The chosen list is sorted, as
    enumeration has no pick order.
    """
    ids = sorted(instance.candidates)
    if len(ids) > EXHAUSTIVE_CANDIDATE_LIMIT:
        raise TooLarge(
            f"{len(ids)} candidates exceed the exhaustive limit of {EXHAUSTIVE_CANDIDATE_LIMIT}"
        )
    best = None
    best_key = None
    for r in range(len(ids) + 1):
        for combo in combinations(ids, r):
            sol = _solution(instance, combo)
            if budget is None:
                if sol.covered != instance.universe:
                    continue
                key = (sol.total_cost, len(combo), combo)
            else:
                if sol.total_cost > budget:
                    continue
                key = (-sol.total_weight, sol.total_cost, combo)
            if best_key is None or key < best_key:
                best, best_key = sol, key
    if best is None:
        coverable = frozenset().union(*instance.candidates.values()) if instance.candidates else frozenset()
        raise Uncoverable(instance.universe - coverable)
    return best


def rank_tunnels(graph: BipartiteGraph, asn: int) -> list[tuple[int, int]]:
    """Remote-peering resellers for an AS, best first.

    Every AS co-located with ``asn`` at one or more IXPs is a potential
    tunnel; each is scored by its remote-peering gain and the list is
    sorted by descending gain, then ascending ASN.
    """
    if asn not in graph.ases:
        raise UnknownNode(f"unknown AS {asn}")
    partners = set()
    for ixp_id in graph.memberships(asn):
        partners |= graph.members(ixp_id)
    partners.discard(asn)
    ranked = [(b, metrics.remote_peering_gain(graph, asn, b)) for b in sorted(partners)]
    ranked.sort(key=lambda bg: (-bg[1], bg[0]))
    return ranked


def site_selection_score(
    graph: BipartiteGraph,
    location: tuple[str, str],
    ixp_locations: Mapping[str, tuple[str, str]] | None = None,
    score_fn: Callable[[int], float] | None = None,
) -> float:
    """Attractiveness of a location for a new IXP site.

    An AS is attributed to the location when it has a membership at any
    IXP there (matched on country and city, case-insensitively). Each
    attributed AS contributes 1 / (1 + degree), so a location scores high
    when it hosts many ASes that are still poorly connected elsewhere.
    The contribution function is pluggable via ``score_fn``.
    """
    if score_fn is None:
        score_fn = lambda deg: 1.0 / (1.0 + deg)

    def norm(loc: tuple[str, str]) -> tuple[str, str]:
        return (loc[0].casefold(), loc[1].casefold())

    if ixp_locations is None:
        ixp_locations = {
            ixp_id: (node.location.country, node.location.city)
            for ixp_id, node in graph.ixps.items()
            if node.location is not None
        }
    if not ixp_locations:
        raise NoLocationData("no IXP has location data")

    target = norm(location)
    local_ixps = [i for i, loc in ixp_locations.items() if norm(loc) == target]
    attributed: set[int] = set()
    for ixp_id in local_ixps:
        attributed |= graph.members(ixp_id)
    return float(sum(score_fn(len(graph.memberships(a))) for a in sorted(attributed)))
